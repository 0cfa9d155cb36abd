//! Exact maximum cover-free (and intersecting) family computation by
//! depth-first branch and bound over the canonical subspace order.
//!
//! Candidates are branched in enumeration order and a family may only be
//! extended by candidates later than its last member, so each family is
//! generated exactly once and results are deterministic. Feasibility of a
//! new member is checked incrementally: only triples involving the new
//! candidate are examined, with all dimension arithmetic done on projective
//! point masks.
//!
//! Two prunes run on top of the live-candidate count. For even k = 2t the
//! count of private t-subspaces gives a budget: every member of a cover-free
//! family keeps at least q^t [2t-1, t] private t-subspaces, private
//! t-subspaces of future members cannot lie inside any current member, and
//! private sets are pairwise disjoint. For cover-free searches the theorem
//! bound floor acts as a global cutoff: reaching it ends the search with a
//! verified witness, and exceeding it aborts loudly.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::family::{classify_extremal, ExtremalClassification, Family};
use crate::mask::{Mask, PointTable};
use crate::qbinom::{cf_bound, qbinom_int};
use crate::subspace::{enumerate_k, Ambient, Subspace};

/// Cap on the candidate level size [n, k]_q.
pub const SEARCH_CAP: u64 = 4096;

pub const DEFAULT_NODE_LIMIT: u64 = 100_000_000;
pub const DEFAULT_TIME_LIMIT: Duration = Duration::from_secs(300);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchPredicate {
    CoverFree,
    Intersecting,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub predicate: SearchPredicate,
    /// Stop as soon as a family of this size is found (max-size queries).
    pub target: Option<usize>,
    /// Root the search at the lexicographically least candidate. Valid for
    /// maximum-size queries only: GL(n, q) acts transitively on [V, k], so
    /// some maximum family contains the least k-subspace.
    pub fix_first: bool,
    pub node_limit: u64,
    pub time_limit: Duration,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            predicate: SearchPredicate::CoverFree,
            target: None,
            fix_first: false,
            node_limit: DEFAULT_NODE_LIMIT,
            time_limit: DEFAULT_TIME_LIMIT,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub max_size: usize,
    pub witness: Family,
    /// True iff the search tree was exhausted (or the theorem cutoff was
    /// reached); false when resource caps or a user target stopped it early.
    pub optimal: bool,
    pub nodes: u64,
    pub all_maximum: Option<Vec<Family>>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Max,
    /// Record every family of exactly the target size.
    Enumerate,
    /// Record every family of size 1..=target.
    Collect,
}

struct Budget {
    tmasks: Vec<Mask>,
    total: u32,
    per_member: u32,
    words: usize,
}

struct Searcher<'a> {
    k: usize,
    predicate: SearchPredicate,
    pt: &'a PointTable,
    pmask: &'a [Mask],
    budget: Option<&'a Budget>,
    node_limit: u64,
    deadline: Instant,
    nodes: u64,
    capped: bool,
    /// Theorem ceiling (cover-free mode): reached => stop, exceeded => abort.
    cutoff: Option<usize>,
    /// User-requested early stop.
    user_target: Option<usize>,
    stopped_early: bool,
    mode: Mode,
    target: usize,
    best: usize,
    best_set: Vec<u32>,
    found: Vec<Vec<u32>>,
}

impl<'a> Searcher<'a> {
    fn covered_triple(&self, f0: &Mask, f1: &Mask, f2: &Mask) -> bool {
        let d1 = self.pt.dim_of_count(f0.and_count(f1));
        let d2 = self.pt.dim_of_count(f0.and_count(f2));
        d1 + d2 >= self.k && d1 + d2 - self.pt.dim_of_count(f0.and3_count(f1, f2)) == self.k
    }

    /// May `x` still join once `c` is added to `chosen`? Only triples
    /// containing both c and x are new; everything else was checked when x
    /// entered the live list.
    fn extension_ok(&self, chosen: &[u32], c: u32, x: u32) -> bool {
        match self.predicate {
            SearchPredicate::Intersecting => {
                self.pmask[x as usize].and_count(&self.pmask[c as usize]) > 0
            }
            SearchPredicate::CoverFree => {
                let mx = &self.pmask[x as usize];
                let mc = &self.pmask[c as usize];
                for &s in chosen {
                    let ms = &self.pmask[s as usize];
                    if self.covered_triple(mx, mc, ms)
                        || self.covered_triple(mc, mx, ms)
                        || self.covered_triple(ms, mx, mc)
                    {
                        return false;
                    }
                }
                true
            }
        }
    }

    fn upper_bound(&self, chosen_len: usize, live_len: usize, covered: Option<&Mask>) -> usize {
        let mut ub = chosen_len + live_len;
        if let (Some(b), Some(cov)) = (self.budget, covered) {
            let remaining = b.total - cov.count();
            ub = ub.min(chosen_len + (remaining / b.per_member) as usize);
        }
        ub
    }

    fn stop_size(&self) -> Option<usize> {
        match (self.cutoff, self.user_target) {
            (Some(c), Some(t)) => Some(c.min(t)),
            (Some(c), None) => Some(c),
            (None, Some(t)) => Some(t),
            (None, None) => None,
        }
    }

    fn dfs(&mut self, chosen: &mut Vec<u32>, live: &[u32], covered: Option<&Mask>) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.node_limit
            || (self.nodes.is_multiple_of(1024) && Instant::now() >= self.deadline)
        {
            self.capped = true;
            return Ok(());
        }

        match self.mode {
            Mode::Collect => {
                if !chosen.is_empty() {
                    self.found.push(chosen.clone());
                }
                if chosen.len() == self.target {
                    return Ok(());
                }
            }
            Mode::Enumerate => {
                if chosen.len() == self.target {
                    self.found.push(chosen.clone());
                    return Ok(());
                }
            }
            Mode::Max => {
                if chosen.len() > self.best {
                    self.best = chosen.len();
                    self.best_set = chosen.clone();
                    if let Some(cut) = self.cutoff {
                        if self.best > cut {
                            return Err(Error::Inconsistency(format!(
                                "found a family of size {} above the theorem bound floor {cut}",
                                self.best
                            )));
                        }
                    }
                    if let Some(stop) = self.stop_size() {
                        if self.best >= stop {
                            self.stopped_early = true;
                            return Ok(());
                        }
                    }
                }
            }
        }

        let ub = self.upper_bound(chosen.len(), live.len(), covered);
        match self.mode {
            Mode::Max => {
                if ub <= self.best {
                    return Ok(());
                }
            }
            Mode::Enumerate => {
                if ub < self.target {
                    return Ok(());
                }
            }
            Mode::Collect => {}
        }

        for pos in 0..live.len() {
            let enough = match self.mode {
                Mode::Max => chosen.len() + (live.len() - pos) > self.best,
                Mode::Enumerate => chosen.len() + (live.len() - pos) >= self.target,
                Mode::Collect => true,
            };
            if !enough {
                break;
            }
            let c = live[pos];
            let child_live: Vec<u32> = live[pos + 1..]
                .iter()
                .copied()
                .filter(|&x| self.extension_ok(chosen, c, x))
                .collect();
            let child_cov = match (self.budget, covered) {
                (Some(b), Some(cov)) => {
                    let mut x = cov.clone();
                    x.or_assign(&b.tmasks[c as usize]);
                    Some(x)
                }
                _ => None,
            };
            chosen.push(c);
            self.dfs(chosen, &child_live, child_cov.as_ref())?;
            chosen.pop();
            if self.capped || self.stopped_early {
                return Ok(());
            }
        }
        Ok(())
    }
}

struct Prepared {
    amb: Ambient,
    k: usize,
    cands: Vec<Subspace>,
    pt: PointTable,
    pmask: Vec<Mask>,
    cutoff: Option<usize>,
    budget: Option<Budget>,
}

fn prepare(q: u64, n: usize, k: usize, predicate: SearchPredicate) -> Result<Prepared> {
    let amb = Ambient::new(n, q)?;
    if k < 1 || k > n {
        return Err(Error::InvalidArgument(format!(
            "search needs 1 <= k <= n (got k={k}, n={n})"
        )));
    }
    let count = qbinom_int(n as i64, k as i64, q)?;
    match count.to_u64() {
        Some(c) if c <= SEARCH_CAP => {}
        _ => {
            return Err(Error::Infeasible {
                what: format!("search over [{n}, {k}]_{q}"),
                estimate: count.to_string(),
            })
        }
    }
    let cands: Vec<Subspace> = enumerate_k(&amb, k)?.collect();
    let pt = PointTable::new(&amb)?;
    let pmask: Vec<Mask> = cands.iter().map(|s| pt.mask_of(s)).collect();

    let cutoff = if predicate == SearchPredicate::CoverFree && n > k {
        cf_bound(n as i64, k as i64, q)?.floor.to_usize()
    } else {
        None
    };

    let budget = if predicate == SearchPredicate::CoverFree && k.is_multiple_of(2) && n > k {
        let t = k / 2;
        let tspaces: Vec<Subspace> = enumerate_k(&amb, t)?.collect();
        let index: std::collections::HashMap<&Subspace, u32> = tspaces
            .iter()
            .enumerate()
            .map(|(i, s)| (s, i as u32))
            .collect();
        let words = tspaces.len().div_ceil(64);
        let mut tmasks = Vec::with_capacity(cands.len());
        for c in &cands {
            let mut m = Mask::empty(words);
            for sub in c.subspaces_of(t)? {
                m.set(index[&sub] as usize);
            }
            tmasks.push(m);
        }
        let per_member =
            BigUint::from(q).pow(t as u32) * qbinom_int(2 * t as i64 - 1, t as i64, q)?;
        per_member.to_u32().map(|per_member| Budget {
            tmasks,
            total: tspaces.len() as u32,
            per_member,
            words,
        })
    } else {
        None
    };

    Ok(Prepared {
        amb,
        k,
        cands,
        pt,
        pmask,
        cutoff,
        budget,
    })
}

fn run<'a>(
    prep: &'a Prepared,
    cfg: &SearchConfig,
    mode: Mode,
    target: usize,
) -> Result<Searcher<'a>> {
    let mut searcher = Searcher {
        k: prep.k,
        predicate: cfg.predicate,
        pt: &prep.pt,
        pmask: &prep.pmask,
        budget: prep.budget.as_ref(),
        node_limit: cfg.node_limit,
        deadline: Instant::now() + cfg.time_limit,
        nodes: 0,
        capped: false,
        cutoff: if mode == Mode::Max { prep.cutoff } else { None },
        user_target: if mode == Mode::Max { cfg.target } else { None },
        stopped_early: false,
        mode,
        target,
        best: 0,
        best_set: Vec::new(),
        found: Vec::new(),
    };
    let all: Vec<u32> = (0..prep.cands.len() as u32).collect();
    let root_cov = prep.budget.as_ref().map(|b| Mask::empty(b.words));
    let mut chosen = Vec::new();
    if cfg.fix_first && mode == Mode::Max && !all.is_empty() {
        let c = 0u32;
        let live: Vec<u32> = all[1..]
            .iter()
            .copied()
            .filter(|&x| searcher.extension_ok(&[], c, x))
            .collect();
        let cov = match (prep.budget.as_ref(), &root_cov) {
            (Some(b), Some(cv)) => {
                let mut x = cv.clone();
                x.or_assign(&b.tmasks[0]);
                Some(x)
            }
            _ => None,
        };
        chosen.push(c);
        searcher.best = 1;
        searcher.best_set = chosen.clone();
        searcher.dfs(&mut chosen, &live, cov.as_ref())?;
    } else {
        searcher.dfs(&mut chosen, &all, root_cov.as_ref())?;
    }
    Ok(searcher)
}

fn family_of(prep: &Prepared, set: &[u32]) -> Result<Family> {
    let members: Vec<Subspace> = set
        .iter()
        .map(|&i| prep.cands[i as usize].clone())
        .collect();
    Family::new(&prep.amb, prep.k, members)
}

/// Slow definitional verification, independent of the mask path.
fn verify(predicate: SearchPredicate, fam: &Family) -> Result<()> {
    let ok = match predicate {
        SearchPredicate::CoverFree => fam.is_cover_free(),
        SearchPredicate::Intersecting => fam.is_intersecting(),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Inconsistency(
            "search produced a family that fails the definitional predicate check".into(),
        ))
    }
}

/// Exact maximum family for the configured predicate.
pub fn search_maximum(q: u64, n: usize, k: usize, cfg: &SearchConfig) -> Result<SearchResult> {
    let prep = prepare(q, n, k, cfg.predicate)?;
    let searcher = run(&prep, cfg, Mode::Max, 0)?;
    let witness = family_of(&prep, &searcher.best_set)?;
    verify(cfg.predicate, &witness)?;
    if let Some(cut) = prep.cutoff {
        if searcher.best > cut {
            return Err(Error::Inconsistency(format!(
                "maximum {} exceeds the theorem bound floor {cut}",
                searcher.best
            )));
        }
    }
    // stopping at the theorem cutoff still proves maximality; stopping at a
    // smaller user target or on resource caps does not
    let proved = !searcher.capped
        && (!searcher.stopped_early || prep.cutoff.is_some_and(|c| searcher.best == c));
    Ok(SearchResult {
        max_size: searcher.best,
        witness,
        optimal: proved,
        nodes: searcher.nodes,
        all_maximum: None,
    })
}

/// Exact maximum cover-free family size and witness.
pub fn max_cover_free(q: u64, n: usize, k: usize, cfg: &SearchConfig) -> Result<SearchResult> {
    let cfg = SearchConfig {
        predicate: SearchPredicate::CoverFree,
        ..cfg.clone()
    };
    search_maximum(q, n, k, &cfg)
}

/// Exact maximum intersecting family size and witness.
pub fn max_intersecting(q: u64, n: usize, k: usize, cfg: &SearchConfig) -> Result<SearchResult> {
    let cfg = SearchConfig {
        predicate: SearchPredicate::Intersecting,
        ..cfg.clone()
    };
    search_maximum(q, n, k, &cfg)
}

/// Every maximum-size family for the predicate, each re-verified. Symmetry
/// fixing stays disabled throughout.
pub fn enumerate_maximum_with(
    q: u64,
    n: usize,
    k: usize,
    predicate: SearchPredicate,
) -> Result<SearchResult> {
    let cfg = SearchConfig {
        predicate,
        ..SearchConfig::default()
    };
    let prep = prepare(q, n, k, predicate)?;
    let max_pass = run(&prep, &cfg, Mode::Max, 0)?;
    if max_pass.capped {
        return Err(Error::Infeasible {
            what: format!("maximum pass for (q={q}, n={n}, k={k}) hit resource caps"),
            estimate: format!("{} nodes", max_pass.nodes),
        });
    }
    let max_size = max_pass.best;
    let enum_pass = run(&prep, &cfg, Mode::Enumerate, max_size)?;
    if enum_pass.capped {
        return Err(Error::Infeasible {
            what: format!("enumeration pass for (q={q}, n={n}, k={k}) hit resource caps"),
            estimate: format!("{} nodes", enum_pass.nodes),
        });
    }
    let mut families = Vec::with_capacity(enum_pass.found.len());
    for set in &enum_pass.found {
        let fam = family_of(&prep, set)?;
        verify(predicate, &fam)?;
        families.push(fam);
    }
    let witness = families
        .first()
        .cloned()
        .unwrap_or_else(|| Family::empty(&prep.amb, prep.k));
    Ok(SearchResult {
        max_size,
        witness,
        optimal: true,
        nodes: max_pass.nodes + enum_pass.nodes,
        all_maximum: Some(families),
    })
}

/// Every maximum-size cover-free family.
pub fn enumerate_maximum(q: u64, n: usize, k: usize) -> Result<Vec<Family>> {
    Ok(enumerate_maximum_with(q, n, k, SearchPredicate::CoverFree)?
        .all_maximum
        .expect("enumeration pass fills all_maximum"))
}

/// Every cover-free family of size 1..=size_cap, in deterministic order.
pub fn enumerate_cover_free_up_to(
    q: u64,
    n: usize,
    k: usize,
    size_cap: usize,
) -> Result<Vec<Family>> {
    let cfg = SearchConfig::default();
    let prep = prepare(q, n, k, SearchPredicate::CoverFree)?;
    let pass = run(&prep, &cfg, Mode::Collect, size_cap)?;
    if pass.capped {
        return Err(Error::Infeasible {
            what: format!("cover-free collection for (q={q}, n={n}, k={k})"),
            estimate: format!("{} nodes", pass.nodes),
        });
    }
    pass.found.iter().map(|set| family_of(&prep, set)).collect()
}

/// Outcome of checking the maximum-size theorem on one instance.
#[derive(Debug, Clone)]
pub struct TheoremReport {
    pub q: u64,
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub bound: BigRational,
    pub floor: BigUint,
    pub max: usize,
    pub optimal: bool,
    pub nodes: u64,
    /// max equals the bound exactly (so the bound is an integer).
    pub attained: bool,
    /// bound - max, exact.
    pub gap: BigRational,
    pub maximum_count: Option<usize>,
    /// When attained: every maximum family classifies per the theorem
    /// (pencil over a Steiner system for even k, Steiner system for odd k).
    pub classification_ok: Option<bool>,
}

pub fn verify_theorem(q: u64, n: usize, k: usize) -> Result<TheoremReport> {
    let bound = cf_bound(n as i64, k as i64, q)?;
    let result = max_cover_free(q, n, k, &SearchConfig::default())?;
    let max_rational = BigRational::from_integer(result.max_size.into());
    let attained = result.optimal && max_rational == bound.bound;
    let gap = &bound.bound - &max_rational;
    let (maximum_count, classification_ok) = if attained {
        let all = enumerate_maximum(q, n, k)?;
        let ok = all.iter().try_fold(true, |acc, fam| -> Result<bool> {
            let class = classify_extremal(fam)?;
            let matches = if k.is_multiple_of(2) {
                matches!(class, ExtremalClassification::PencilSteiner { .. })
            } else {
                matches!(class, ExtremalClassification::Steiner { .. })
            };
            Ok(acc && matches)
        })?;
        (Some(all.len()), Some(ok))
    } else {
        (None, None)
    };
    Ok(TheoremReport {
        q,
        n,
        k,
        t: bound.t as usize,
        bound: bound.bound,
        floor: bound.floor,
        max: result.max_size,
        optimal: result.optimal,
        nodes: result.nodes,
        attained,
        gap,
        maximum_count,
        classification_ok,
    })
}
