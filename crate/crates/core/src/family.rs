//! Families of equal-dimension subspaces: cover-free / intersecting /
//! q-Steiner predicates, shadow and chi operators, the complement bijection,
//! lifting, and extremal-structure construction and classification.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::qbinom::{cf_bound, chi_bound, qbinom_int};
use crate::subspace::{
    enumerate_avoiding, enumerate_k, lex_complement, Ambient, Subspace, MAX_AMBIENT_DIM,
};
use crate::util::SplitMix64;

/// Edge cap for the complement-bijection matcher.
const PSI_EDGE_CAP: u128 = 4_000_000;

/// A deduplicated family of k-dimensional subspaces, kept in canonical
/// subspace order so serialization and iteration are deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    ambient: Ambient,
    k: usize,
    members: Vec<Subspace>,
}

/// Three distinct members with F0 <= (F0 ∩ F1) + (F0 ∩ F2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverWitness {
    pub f0: Subspace,
    pub f1: Subspace,
    pub f2: Subspace,
}

impl CoverWitness {
    /// Re-verify the witness from the definition.
    pub fn verify(&self) -> Result<bool> {
        let m1 = self.f0.meet(&self.f1)?;
        let m2 = self.f0.meet(&self.f2)?;
        Ok(self.f0 != self.f1
            && self.f0 != self.f2
            && self.f1 != self.f2
            && m1.join(&m2)?.contains(&self.f0)?)
    }
}

impl Family {
    pub fn new(amb: &Ambient, k: usize, mut members: Vec<Subspace>) -> Result<Family> {
        if k > amb.n() {
            return Err(Error::InvalidArgument(format!(
                "member dimension {k} exceeds ambient dimension {}",
                amb.n()
            )));
        }
        for m in &members {
            if m.ambient() != amb {
                return Err(Error::AmbientMismatch);
            }
            if m.dim() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    got: m.dim(),
                });
            }
        }
        members.sort();
        members.dedup();
        Ok(Family {
            ambient: amb.clone(),
            k,
            members,
        })
    }

    pub fn empty(amb: &Ambient, k: usize) -> Family {
        Family {
            ambient: amb.clone(),
            k,
            members: Vec::new(),
        }
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn members(&self) -> &[Subspace] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains_member(&self, s: &Subspace) -> bool {
        self.members.binary_search(s).is_ok()
    }

    pub fn with_member(&self, s: Subspace) -> Result<Family> {
        let mut members = self.members.clone();
        members.push(s);
        Family::new(&self.ambient, self.k, members)
    }

    /// First violating triple in canonical order, if any. Iterates F0 over
    /// members, pruning pairs whose meet dimensions cannot reach k; pair
    /// meets with F0 are cached per F0.
    pub fn cover_violation(&self) -> Option<CoverWitness> {
        let k = self.k;
        let m = self.members.len();
        for i in 0..m {
            let f0 = &self.members[i];
            let meets: Vec<(usize, Subspace)> = (0..m)
                .filter(|&j| j != i)
                .map(|j| {
                    let meet = f0.meet(&self.members[j]).expect("same ambient");
                    (j, meet)
                })
                .collect();
            for a in 0..meets.len() {
                let (j1, ref m1) = meets[a];
                for &(j2, ref m2) in meets.iter().skip(a + 1) {
                    if m1.dim() + m2.dim() < k {
                        continue;
                    }
                    let join = m1.join(m2).expect("same ambient");
                    if join.dim() == k {
                        return Some(CoverWitness {
                            f0: f0.clone(),
                            f1: self.members[j1].clone(),
                            f2: self.members[j2].clone(),
                        });
                    }
                }
            }
        }
        None
    }

    pub fn is_cover_free(&self) -> bool {
        self.cover_violation().is_none()
    }

    /// Every pair of members meets in dimension >= 1.
    pub fn is_intersecting(&self) -> bool {
        for (i, a) in self.members.iter().enumerate() {
            for b in self.members.iter().skip(i + 1) {
                if a.meet(b).expect("same ambient").is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Exact S_q(t, k, n) check: every t-subspace of V lies in exactly one
    /// member. Runs the cardinality identity |F| [k,t] = [n,t] first.
    pub fn is_steiner(&self, t: usize) -> Result<bool> {
        if t < 1 || t > self.k {
            return Err(Error::InvalidArgument(format!(
                "Steiner parameter t must be in 1..={} (got {t})",
                self.k
            )));
        }
        let q = self.ambient.q();
        let blocks = BigUint::from(self.members.len());
        let per_block = qbinom_int(self.k as i64, t as i64, q)?;
        let total = qbinom_int(self.ambient.n() as i64, t as i64, q)?;
        if blocks * per_block != total {
            return Ok(false);
        }
        for t_sub in enumerate_k(&self.ambient, t)? {
            let mut cover = 0;
            for m in &self.members {
                if m.contains(&t_sub)? {
                    cover += 1;
                    if cover > 1 {
                        return Ok(false);
                    }
                }
            }
            if cover != 1 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// All (k-1)-subspaces contained in some member.
    pub fn shadow(&self) -> Result<Family> {
        if self.k < 1 {
            return Err(Error::InvalidArgument(
                "shadow needs member dimension >= 1".into(),
            ));
        }
        let mut out: Vec<Subspace> = Vec::new();
        for m in &self.members {
            out.extend(m.subspaces_of(self.k - 1)?);
        }
        Family::new(&self.ambient, self.k - 1, out)
    }

    /// All (k+1)-subspaces whose every k-subspace belongs to the family.
    /// The shadow-complement bound |chi(H)| <= [m, k+1] with [m, k] = |H| is
    /// re-checked on every call; a violation would falsify the theorem and
    /// aborts loudly.
    pub fn chi(&self) -> Result<Family> {
        if self.k + 1 > self.ambient.n() {
            return Err(Error::InvalidArgument(
                "chi needs member dimension at most n - 1".into(),
            ));
        }
        if self.is_empty() {
            return Ok(Family::empty(&self.ambient, self.k + 1));
        }
        let set: HashSet<&Subspace> = self.members.iter().collect();
        let mut out = Vec::new();
        'cand: for t_sub in enumerate_k(&self.ambient, self.k + 1)? {
            for s in t_sub.subspaces_of(self.k)? {
                if !set.contains(&s) {
                    continue 'cand;
                }
            }
            out.push(t_sub);
        }
        let bound = chi_bound(self.members.len() as f64, self.k as i64, self.ambient.q())?;
        if out.len() as f64 > bound + 1e-9 * bound.max(1.0) {
            return Err(Error::Inconsistency(format!(
                "|chi(H)| = {} exceeds the shadow-complement bound {bound}",
                out.len()
            )));
        }
        Family::new(&self.ambient, self.k + 1, out)
    }

    /// F_T: members containing T.
    pub fn residual(&self, t_sub: &Subspace) -> Result<Family> {
        if t_sub.ambient() != &self.ambient {
            return Err(Error::AmbientMismatch);
        }
        if t_sub.dim() > self.k {
            return Err(Error::InvalidArgument(
                "residual subspace dimension exceeds member dimension".into(),
            ));
        }
        let members = self
            .members
            .iter()
            .filter(|m| m.contains(t_sub).expect("same ambient"))
            .cloned()
            .collect();
        Family::new(&self.ambient, self.k, members)
    }

    /// Partition of [member, t] into private (|F_T| = 1) and shared
    /// (|F_T| > 1) t-subspaces: (M_t(member), N_t(member)).
    pub fn private_split(&self, member: &Subspace, t: usize) -> Result<(Family, Family)> {
        if !self.contains_member(member) {
            return Err(Error::NotInFamily);
        }
        if t < 1 || t > self.k {
            return Err(Error::InvalidArgument(format!(
                "private_split needs 1 <= t <= {} (got {t})",
                self.k
            )));
        }
        let mut private = Vec::new();
        let mut shared = Vec::new();
        for t_sub in member.subspaces_of(t)? {
            let count = self
                .members
                .iter()
                .filter(|m| m.contains(&t_sub).expect("same ambient"))
                .count();
            debug_assert!(count >= 1);
            if count == 1 {
                private.push(t_sub);
            } else {
                shared.push(t_sub);
            }
        }
        Ok((
            Family::new(&self.ambient, t, private)?,
            Family::new(&self.ambient, t, shared)?,
        ))
    }

    /// Extend the ambient space by one coordinate and join every member with
    /// the new 1-dimensional direction E: {E ⊕ F}. Preserves cover-freeness.
    pub fn lift(&self) -> Result<Family> {
        let n = self.ambient.n();
        if n + 1 > MAX_AMBIENT_DIM {
            return Err(Error::InvalidArgument(format!(
                "lift would exceed the ambient dimension cap {MAX_AMBIENT_DIM}"
            )));
        }
        let big = Ambient::new(n + 1, self.ambient.q())?;
        let mut members = Vec::with_capacity(self.members.len());
        for m in &self.members {
            let mut rows: Vec<Vec<u8>> = m
                .rows()
                .iter()
                .map(|r| {
                    let mut v = r.clone();
                    v.push(0);
                    v
                })
                .collect();
            rows.push(big.unit_vector(n));
            members.push(Subspace::canonicalize(&big, &rows)?);
        }
        Family::new(&big, self.k + 1, members)
    }

    /// The new direction introduced by `lift` on this family's ambient.
    pub fn lift_direction(amb: &Ambient) -> Result<Subspace> {
        let big = Ambient::new(amb.n() + 1, amb.q())?;
        Ok(Subspace::from_span_of_units(&big, &[amb.n()]))
    }
}

/// Outcome of matching a family against the extremal structures of the
/// maximum-size theorem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtremalClassification {
    /// Even k = 2t: all members share a 1-dimensional E, and the residues
    /// {F ∩ W} on a complement W form an S_q(t, 2t-1, n-1). The residue is
    /// given in W-local coordinates (an honest Steiner system on its own
    /// (n-1)-dimensional space).
    PencilSteiner {
        e: Subspace,
        w: Subspace,
        residue: Family,
    },
    /// Odd k = 2t-1: the family itself is an S_q(t, 2t-1, n).
    Steiner { t: usize },
    /// No extremal structure (wrong size, not cover-free, or checks failed).
    None,
}

/// Classify a family against the equality structures: pencil over a q-Steiner
/// system for even k, a q-Steiner system itself for odd k. Families whose
/// size differs from the bound floor classify as `None`.
pub fn classify_extremal(f: &Family) -> Result<ExtremalClassification> {
    let n = f.ambient().n();
    let k = f.k();
    let q = f.ambient().q();
    if k < 1 || n < k + 1 || f.is_empty() {
        return Ok(ExtremalClassification::None);
    }
    let bound = cf_bound(n as i64, k as i64, q)?;
    if BigUint::from(f.len()) != bound.floor {
        return Ok(ExtremalClassification::None);
    }
    if !f.is_cover_free() {
        return Ok(ExtremalClassification::None);
    }
    if k.is_multiple_of(2) {
        let t = k / 2;
        let mut common = f.members()[0].clone();
        for m in f.members().iter().skip(1) {
            common = common.meet(m)?;
        }
        if common.dim() != 1 {
            return Ok(ExtremalClassification::None);
        }
        let e = common;
        let w = lex_complement(&e);
        let local_amb = Ambient::new(n - 1, q)?;
        let mut locals = Vec::with_capacity(f.len());
        for m in f.members() {
            let s = m.meet(&w)?;
            if s.dim() != k - 1 {
                return Ok(ExtremalClassification::None);
            }
            let local = s.express_in(&w)?;
            debug_assert_eq!(local.ambient(), &local_amb);
            locals.push(local);
        }
        let residue = Family::new(&local_amb, k - 1, locals)?;
        if residue.len() != f.len() {
            return Ok(ExtremalClassification::None);
        }
        if residue.is_steiner(t)? {
            Ok(ExtremalClassification::PencilSteiner { e, w, residue })
        } else {
            Ok(ExtremalClassification::None)
        }
    } else {
        let t = k.div_ceil(2);
        if f.is_steiner(t)? {
            Ok(ExtremalClassification::Steiner { t })
        } else {
            Ok(ExtremalClassification::None)
        }
    }
}

/// Build the extremal pencil family from a q-Steiner system S_q(t, 2t-1, n-1)
/// given on its own (n-1)-dimensional space: {E ⊕ S}. The input is checked;
/// the output is verified cover-free and of the bound size.
pub fn construct_pencil(steiner: &Family) -> Result<Family> {
    let k_in = steiner.k();
    if k_in.is_multiple_of(2) {
        return Err(Error::NotSteiner(format!(
            "pencil construction needs blocks of odd dimension 2t-1 (got {k_in})"
        )));
    }
    let t = k_in.div_ceil(2);
    if !steiner.is_steiner(t)? {
        return Err(Error::NotSteiner(format!(
            "input is not an S_q({t}, {k_in}, {})",
            steiner.ambient().n()
        )));
    }
    let lifted = steiner.lift()?;
    let n = lifted.ambient().n();
    let bound = cf_bound(n as i64, lifted.k() as i64, steiner.ambient().q())?;
    if BigUint::from(lifted.len()) != bound.floor || !lifted.is_cover_free() {
        return Err(Error::Inconsistency(
            "pencil over a verified Steiner system must attain the cover-free bound".into(),
        ));
    }
    Ok(lifted)
}

/// A perfect matching psi: [V, a] -> [V, n-a] with A ⊕ psi(A) = V for all A,
/// found by augmenting-path maximum matching. The underlying bipartite graph
/// is regular, so a perfect matching always exists; failing to find one is an
/// internal error.
pub fn psi_matching(amb: &Ambient, a: usize) -> Result<Vec<(Subspace, Subspace)>> {
    let n = amb.n();
    if a < 1 || a > n - 1 {
        return Err(Error::InvalidArgument(format!(
            "psi needs 1 <= a <= n-1 (got a={a}, n={n})"
        )));
    }
    let q = amb.q();
    let left_count = qbinom_int(n as i64, a as i64, q)?
        .to_u128()
        .ok_or_else(|| Error::Infeasible {
            what: format!("psi matching side [{n}, {a}]_{q}"),
            estimate: "over u128".into(),
        })?;
    let per_left = (q as u128).pow((a * (n - a)) as u32);
    let edges = left_count * per_left;
    if edges > PSI_EDGE_CAP {
        return Err(Error::Infeasible {
            what: format!("psi matching for (q={q}, n={n}, a={a})"),
            estimate: format!("{edges} edges"),
        });
    }

    let left: Vec<Subspace> = enumerate_k(amb, a)?.collect();
    let right: Vec<Subspace> = enumerate_k(amb, n - a)?.collect();
    let right_index: std::collections::HashMap<&Subspace, u32> = right
        .iter()
        .enumerate()
        .map(|(i, s)| (s, i as u32))
        .collect();
    let v = Subspace::full(amb);
    let mut adj: Vec<Vec<u32>> = Vec::with_capacity(left.len());
    for s in &left {
        let complements = enumerate_avoiding(&v, s, n - a)?;
        adj.push(complements.iter().map(|c| right_index[c]).collect());
    }

    let match_left = hopcroft_karp(&adj, right.len());
    let mut pairs = Vec::with_capacity(left.len());
    for (i, m) in match_left.iter().enumerate() {
        let j =
            m.ok_or_else(|| Error::Inconsistency("complement matching is not perfect".into()))?;
        let (l, r) = (&left[i], &right[j as usize]);
        if !l.is_direct_complement(r)? {
            return Err(Error::Inconsistency(
                "matched pair is not a direct sum".into(),
            ));
        }
        pairs.push((l.clone(), r.clone()));
    }
    Ok(pairs)
}

/// Hopcroft-Karp maximum bipartite matching. Returns, per left vertex, the
/// matched right vertex.
fn hopcroft_karp(adj: &[Vec<u32>], n_right: usize) -> Vec<Option<u32>> {
    let n_left = adj.len();
    let mut match_l: Vec<Option<u32>> = vec![None; n_left];
    let mut match_r: Vec<Option<u32>> = vec![None; n_right];
    loop {
        let mut dist = vec![u32::MAX; n_left];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for (u, m) in match_l.iter().enumerate() {
            if m.is_none() {
                dist[u] = 0;
                queue.push_back(u);
            }
        }
        let mut reachable_free = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                match match_r[v as usize] {
                    None => reachable_free = true,
                    Some(u2) => {
                        let u2 = u2 as usize;
                        if dist[u2] == u32::MAX {
                            dist[u2] = dist[u] + 1;
                            queue.push_back(u2);
                        }
                    }
                }
            }
        }
        if !reachable_free {
            break;
        }
        let mut advanced = false;
        for u in 0..n_left {
            if match_l[u].is_none() && dist[u] == 0 {
                advanced |= augment(u, adj, &mut dist, &mut match_l, &mut match_r);
            }
        }
        if !advanced {
            break;
        }
    }
    match_l
}

fn augment(
    u: usize,
    adj: &[Vec<u32>],
    dist: &mut [u32],
    match_l: &mut [Option<u32>],
    match_r: &mut [Option<u32>],
) -> bool {
    let d = dist[u];
    dist[u] = u32::MAX;
    for &v in &adj[u] {
        let ok = match match_r[v as usize] {
            None => true,
            Some(u2) => {
                let u2 = u2 as usize;
                dist[u2] == d + 1 && augment(u2, adj, dist, match_l, match_r)
            }
        };
        if ok {
            match_l[u] = Some(v);
            match_r[v as usize] = Some(u as u32);
            return true;
        }
    }
    false
}

/// Seeded greedy cover-free family: shuffle the level canonically enumerated,
/// then insert every candidate that keeps the family cover-free.
pub fn random_cover_free(amb: &Ambient, k: usize, seed: u64) -> Result<Family> {
    let mut candidates: Vec<Subspace> = enumerate_k(amb, k)?.collect();
    let mut rng = SplitMix64::new(seed);
    rng.shuffle(&mut candidates);
    let mut chosen: Vec<Subspace> = Vec::new();
    for c in candidates {
        if extension_stays_cover_free(&chosen, &c, k) {
            chosen.push(c);
        }
    }
    Family::new(amb, k, chosen)
}

/// Triple check restricted to triples involving the new member.
fn extension_stays_cover_free(members: &[Subspace], c: &Subspace, k: usize) -> bool {
    let meets_c: Vec<Subspace> = members
        .iter()
        .map(|m| c.meet(m).expect("same ambient"))
        .collect();
    // c as the covered member
    for i in 0..members.len() {
        for j in (i + 1)..members.len() {
            if meets_c[i].dim() + meets_c[j].dim() < k {
                continue;
            }
            if meets_c[i].join(&meets_c[j]).expect("same ambient").dim() == k {
                return false;
            }
        }
    }
    // an existing member as the covered one, paired with c
    for (i, f0) in members.iter().enumerate() {
        let m_c = f0.meet(c).expect("same ambient");
        for (j, f1) in members.iter().enumerate() {
            if i == j {
                continue;
            }
            let m1 = f0.meet(f1).expect("same ambient");
            if m_c.dim() + m1.dim() < k {
                continue;
            }
            if m_c.join(&m1).expect("same ambient").dim() == k {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfq::make_field;
    use crate::qbinom::{invert_qbinom, qbinom_real};

    fn amb(n: usize, q: u64) -> Ambient {
        Ambient::new(n, q).unwrap()
    }

    fn sp(a: &Ambient, rows: &[&[u8]]) -> Subspace {
        Subspace::canonicalize(a, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn level(a: &Ambient, k: usize) -> Family {
        Family::new(a, k, enumerate_k(a, k).unwrap().collect()).unwrap()
    }

    /// All 2-subspaces through a fixed point.
    fn pencil(a: &Ambient, e: &Subspace, k: usize) -> Family {
        let members: Vec<Subspace> = enumerate_k(a, k)
            .unwrap()
            .filter(|s| s.contains(e).unwrap())
            .collect();
        Family::new(a, k, members).unwrap()
    }

    /// Brute-force oracle: scan every ordered triple from the definition.
    fn cover_free_oracle(f: &Family) -> bool {
        let ms = f.members();
        for (i, f0) in ms.iter().enumerate() {
            for (j, f1) in ms.iter().enumerate() {
                for (l, f2) in ms.iter().enumerate() {
                    if i == j || i == l || j == l {
                        continue;
                    }
                    let m1 = f0.meet(f1).unwrap();
                    let m2 = f0.meet(f2).unwrap();
                    if m1.join(&m2).unwrap().contains(f0).unwrap() {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// The 5 GF(4)-lines of GF(2)^4 = GF(4)^2: a line spread.
    fn line_spread() -> Family {
        let f4 = make_field(4).unwrap();
        let a = amb(4, 2);
        let to_bits = |x: u8, y: u8| vec![x & 1, x >> 1, y & 1, y >> 1];
        let mut reps: Vec<(u8, u8)> = vec![(1, 0)];
        for x in 0..4u8 {
            reps.push((x, 1));
        }
        let members: Vec<Subspace> = reps
            .into_iter()
            .map(|(x, y)| {
                let v1 = to_bits(x, y);
                let v2 = to_bits(f4.mul(2, x), f4.mul(2, y));
                Subspace::canonicalize(&a, &[v1, v2]).unwrap()
            })
            .collect();
        Family::new(&a, 2, members).unwrap()
    }

    #[test]
    fn cover_free_examples() {
        let a3 = amb(3, 2);
        // all 1-subspaces are trivially cover-free
        assert!(level(&a3, 1).is_cover_free());

        // the 3 planes through a common point
        let e = sp(&a3, &[&[1, 0, 0]]);
        let p = pencil(&a3, &e, 2);
        assert_eq!(p.len(), 3);
        assert!(p.is_cover_free());
        assert!(cover_free_oracle(&p));

        // 3 planes with no common point: covered
        let f = Family::new(
            &a3,
            2,
            vec![
                sp(&a3, &[&[1, 0, 0], &[0, 1, 0]]),
                sp(&a3, &[&[0, 1, 0], &[0, 0, 1]]),
                sp(&a3, &[&[1, 0, 0], &[0, 0, 1]]),
            ],
        )
        .unwrap();
        let w = f.cover_violation().expect("violating triple exists");
        assert!(w.verify().unwrap());
        assert!(!cover_free_oracle(&f));
    }

    #[test]
    fn cover_free_matches_oracle_on_seeded_families() {
        let a4 = amb(4, 2);
        for seed in 0..40u64 {
            // random subsets of [V, 2], not only cover-free ones
            let mut rng = SplitMix64::new(seed);
            let mut members: Vec<Subspace> = enumerate_k(&a4, 2).unwrap().collect();
            rng.shuffle(&mut members);
            members.truncate(3 + rng.below(6));
            let f = Family::new(&a4, 2, members).unwrap();
            assert_eq!(f.is_cover_free(), cover_free_oracle(&f), "seed {seed}");
        }
    }

    #[test]
    fn intersecting_examples() {
        let a3 = amb(3, 2);
        assert!(level(&a3, 2).is_intersecting()); // 2 + 2 > 3

        let spread = line_spread();
        assert_eq!(spread.len(), 5);
        assert!(!spread.is_intersecting());

        let a4 = amb(4, 2);
        let e = sp(&a4, &[&[1, 0, 0, 0]]);
        let star = pencil(&a4, &e, 2);
        assert_eq!(star.len(), 7);
        assert!(star.is_intersecting());
    }

    #[test]
    fn steiner_examples() {
        let a3 = amb(3, 2);
        // [V, t] with k = t: every T is its own unique block
        assert!(level(&a3, 1).is_steiner(1).unwrap());
        assert!(level(&a3, 2).is_steiner(2).unwrap());

        // a line spread is an S_2(1, 2, 4) with 15/3 = 5 blocks
        let spread = line_spread();
        assert!(spread.is_steiner(1).unwrap());

        // 7 lines through a point cover that point 7 times
        let a4 = amb(4, 2);
        let e = sp(&a4, &[&[1, 0, 0, 0]]);
        assert!(!pencil(&a4, &e, 2).is_steiner(1).unwrap());

        assert!(level(&a3, 2).is_steiner(0).is_err());
        assert!(level(&a3, 2).is_steiner(3).is_err());
    }

    #[test]
    fn verified_steiner_systems_are_cover_free() {
        // point systems S_q(1, 1, n)
        for (n, q) in [(3usize, 2u64), (4, 2), (3, 3)] {
            let a = amb(n, q);
            let f = level(&a, 1);
            assert!(f.is_steiner(1).unwrap());
            assert!(f.is_cover_free());
            assert!(f.lift().unwrap().is_cover_free());
        }
        // the line spread S_2(1, 2, 4)
        let spread = line_spread();
        assert!(spread.is_steiner(1).unwrap());
        assert!(spread.is_cover_free());
        assert!(spread.lift().unwrap().is_cover_free());
    }

    #[test]
    fn shadow_examples() {
        let a3 = amb(3, 2);
        let single = Family::new(&a3, 2, vec![sp(&a3, &[&[1, 0, 0], &[0, 1, 0]])]).unwrap();
        assert_eq!(single.shadow().unwrap().len(), 3); // [2,1]_2 hyperplanes

        let a4 = amb(4, 2);
        let m = sp(&a4, &[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0]]);
        let h = Family::new(&a4, 2, m.subspaces_of(2).unwrap()).unwrap();
        let sh = h.shadow().unwrap();
        assert_eq!(sh.len(), 7); // [3,1]_2: the shadow is [M, 1]
        for s in sh.members() {
            assert!(m.contains(s).unwrap());
        }

        assert_eq!(Family::empty(&a4, 2).shadow().unwrap().len(), 0);
    }

    #[test]
    fn chi_examples() {
        let a4 = amb(4, 2);
        let m = sp(&a4, &[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0]]);
        let h = Family::new(&a4, 2, m.subspaces_of(2).unwrap()).unwrap();
        assert_eq!(h.len(), 7);
        let chi = h.chi().unwrap();
        assert_eq!(chi.members(), std::slice::from_ref(&m)); // equality case of the bound

        let all = level(&a4, 2);
        assert_eq!(all.chi().unwrap().len(), 15); // all of [V, 3]

        let single = Family::new(&a4, 2, vec![sp(&a4, &[&[1, 0, 0, 0], &[0, 1, 0, 0]])]).unwrap();
        assert!(single.chi().unwrap().is_empty());
    }

    #[test]
    fn chi_bound_on_size_strata() {
        // |chi(H)| <= [m, k+1] with [m, k] = |H|, sampled per size stratum
        let a4 = amb(4, 2);
        let lines: Vec<Subspace> = enumerate_k(&a4, 2).unwrap().collect();
        for size in 1..=12usize {
            for seed in 0..20u64 {
                let mut rng = SplitMix64::new(seed * 100 + size as u64);
                let mut pick = lines.clone();
                rng.shuffle(&mut pick);
                pick.truncate(size);
                let h = Family::new(&a4, 2, pick).unwrap();
                // chi() internally asserts the bound and errors on violation
                let chi = h.chi().unwrap();
                let rhs = chi_bound(size as f64, 2, 2).unwrap();
                assert!(chi.len() as f64 <= rhs + 1e-9 * rhs.max(1.0));
            }
        }
    }

    #[test]
    fn residual_and_private_split() {
        let a4 = amb(4, 2);
        let e = sp(&a4, &[&[1, 0, 0, 0]]);
        let p = pencil(&a4, &e, 2);
        assert_eq!(p.residual(&Subspace::zero(&a4)).unwrap(), p);
        let member = p.members()[0].clone();
        assert_eq!(
            p.residual(&member).unwrap().members(),
            std::slice::from_ref(&member)
        );
        assert_eq!(p.residual(&e).unwrap().len(), 7);

        // each pencil member: 2 private points, shared point E
        for m in p.members() {
            let (private, shared) = p.private_split(m, 1).unwrap();
            assert_eq!(private.len(), 2); // q^t [2t-1, t] = 2 with equality
            assert_eq!(shared.members(), std::slice::from_ref(&e));
        }

        // singleton family: everything private
        let single = Family::new(&a4, 2, vec![member]).unwrap();
        let (private, shared) = single.private_split(&single.members()[0], 1).unwrap();
        assert_eq!(private.len(), 3);
        assert!(shared.is_empty());

        let outsider = sp(&a4, &[&[0, 1, 0, 0], &[0, 0, 1, 0]]);
        assert!(matches!(
            single.private_split(&outsider, 1),
            Err(Error::NotInFamily)
        ));
    }

    #[test]
    fn pencil_private_split_in_dimension_three() {
        let a3 = amb(3, 2);
        let e = sp(&a3, &[&[1, 0, 0]]);
        let p = pencil(&a3, &e, 2);
        for m in p.members() {
            let (private, shared) = p.private_split(m, 1).unwrap();
            assert_eq!(private.len(), 2);
            assert_eq!(shared.members(), std::slice::from_ref(&e));
        }
    }

    #[test]
    fn lift_examples() {
        let a3 = amb(3, 2);
        let f = level(&a3, 1);
        let lifted = f.lift().unwrap();
        assert_eq!(lifted.ambient().n(), 4);
        assert_eq!(lifted.k(), 2);
        assert_eq!(lifted.len(), 7);
        assert!(lifted.is_cover_free());
        let e = Family::lift_direction(&a3).unwrap();
        for m in lifted.members() {
            assert!(m.contains(&e).unwrap());
        }

        assert!(Family::empty(&a3, 1).lift().unwrap().is_empty());

        let full = Family::new(&a3, 3, vec![Subspace::full(&a3)]).unwrap();
        let lifted_full = full.lift().unwrap();
        assert_eq!(lifted_full.len(), 1);
        assert!(lifted_full.members()[0].is_full());
    }

    #[test]
    fn lift_preserves_cover_freeness_on_seeded_families() {
        for (n, q) in [(3usize, 2u64), (4, 2), (3, 3)] {
            let a = amb(n, q);
            for seed in 0..200u64 {
                let f = random_cover_free(&a, 2, seed).unwrap();
                assert!(f.is_cover_free());
                assert!(
                    f.lift().unwrap().is_cover_free(),
                    "(q={q}, n={n}, seed={seed})"
                );
            }
        }
    }

    #[test]
    fn psi_matching_small() {
        // n = 2, a = 1 over GF(2): any two distinct points of the plane are
        // complementary, so a 3-cycle style assignment exists
        let a2 = amb(2, 2);
        let pairs = psi_matching(&a2, 1).unwrap();
        assert_eq!(pairs.len(), 3);
        for (l, r) in &pairs {
            assert_ne!(l, r);
            assert!(l.is_direct_complement(r).unwrap());
        }

        let a3 = amb(3, 2);
        let pairs = psi_matching(&a3, 1).unwrap();
        assert_eq!(pairs.len(), 7);
        for (l, r) in &pairs {
            assert!(l.meet(r).unwrap().is_zero());
            assert!(l.join(r).unwrap().is_full());
        }

        assert!(psi_matching(&a3, 0).is_err());
        assert!(psi_matching(&a3, 3).is_err());
    }

    #[test]
    fn construct_pencil_examples() {
        // S_2(1,1,3) = all points of GF(2)^3 -> 7 lines of GF(2)^4 through E
        let a3 = amb(3, 2);
        let s = level(&a3, 1);
        let pencil_fam = construct_pencil(&s).unwrap();
        assert_eq!(pencil_fam.len(), 7);
        assert_eq!(
            BigUint::from(pencil_fam.len()),
            cf_bound(4, 2, 2).unwrap().floor
        );

        // S_3(1,1,2) = 4 points of GF(3)^2 -> 4 planes of GF(3)^3, bound 4
        let a2 = amb(2, 3);
        let s = level(&a2, 1);
        let pencil_fam = construct_pencil(&s).unwrap();
        assert_eq!(pencil_fam.len(), 4);
        assert_eq!(
            BigUint::from(pencil_fam.len()),
            cf_bound(3, 2, 3).unwrap().floor
        );

        // non-Steiner input is rejected (empty fails the count identity)
        let not_steiner = Family::empty(&a3, 1);
        assert!(matches!(
            construct_pencil(&not_steiner),
            Err(Error::NotSteiner(_))
        ));
    }

    #[test]
    fn classify_examples() {
        // pencil of 7 lines in GF(2)^4 -> PencilSteiner with residue [W, 1]
        let a3 = amb(3, 2);
        let s = level(&a3, 1);
        let p = construct_pencil(&s).unwrap();
        match classify_extremal(&p).unwrap() {
            ExtremalClassification::PencilSteiner { e, w, residue } => {
                assert_eq!(e.dim(), 1);
                assert!(e.is_direct_complement(&w).unwrap());
                assert_eq!(residue, s);
            }
            other => panic!("expected PencilSteiner, got {other:?}"),
        }

        // all of [V, 1] in GF(2)^3 is extremal for odd k = 1: S_2(1,1,3)
        match classify_extremal(&level(&a3, 1)).unwrap() {
            ExtremalClassification::Steiner { t } => assert_eq!(t, 1),
            other => panic!("expected Steiner, got {other:?}"),
        }

        // a size-3 family at (2,4,3): below the floor 5, classifies None
        let a4 = amb(4, 2);
        let plane = sp(&a4, &[&[1, 0, 0, 0], &[0, 1, 0, 0]]);
        let hyper: Vec<Subspace> = enumerate_k(&a4, 3)
            .unwrap()
            .filter(|h| h.contains(&plane).unwrap())
            .collect();
        let f = Family::new(&a4, 3, hyper).unwrap();
        assert_eq!(f.len(), 3);
        assert!(f.is_cover_free());
        assert_eq!(classify_extremal(&f).unwrap(), ExtremalClassification::None);
    }

    #[test]
    fn classify_round_trips_construction() {
        for (n, q) in [(3usize, 2u64), (4, 2), (2, 3), (3, 3)] {
            let a = amb(n, q);
            let s = level(&a, 1); // S_q(1, 1, n)
            let p = construct_pencil(&s).unwrap();
            match classify_extremal(&p).unwrap() {
                ExtremalClassification::PencilSteiner { residue, .. } => {
                    assert_eq!(residue, s, "(q={q}, n={n})");
                }
                other => panic!("expected PencilSteiner, got {other:?}"),
            }
        }
    }

    #[test]
    fn shadow_fiber_lower_bound_instances() {
        // H ⊆ [V, k, 0]_E closed under fibers: |shadow(H)| >= q^{k-1} [m, k-1]
        let a4 = amb(4, 2);
        let e = sp(&a4, &[&[0, 0, 0, 1]]);
        let w = sp(&a4, &[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0]]);
        let k = 2usize;
        let bs: Vec<Subspace> = w.subspaces_of(k).unwrap();
        // unions of fibers over seeded subsets of [W, k]
        for seed in 0..30u64 {
            let mut rng = SplitMix64::new(seed);
            let mut pick = bs.clone();
            rng.shuffle(&mut pick);
            pick.truncate(1 + rng.below(bs.len()));
            let mut members = Vec::new();
            for b in &pick {
                members.extend(crate::subspace::fiber(b, &e).unwrap());
            }
            let h = Family::new(&a4, k, members).unwrap();
            let size = h.len() as f64;
            let m = invert_qbinom(size / 4.0, k as i64, 2).unwrap(); // |H| = q^k [m, k]
            let rhs = 2.0 * qbinom_real(m, k as i64 - 1, 2).unwrap();
            let sh = h.shadow().unwrap().len() as f64;
            assert!(sh >= rhs - 1e-9, "seed {seed}: {sh} < {rhs}");
        }

        // equality case: H = [M ⊕ E, k, 0]_E gives |shadow| = q^{k-1} [m, k-1]
        let m_sub = sp(&a4, &[&[1, 0, 0, 0], &[0, 1, 0, 0]]);
        let u = m_sub.join(&e).unwrap();
        let h = Family::new(
            &a4,
            k,
            crate::subspace::enumerate_avoiding(&u, &e, k).unwrap(),
        )
        .unwrap();
        assert_eq!(h.len(), 4); // q^k [m, k] with m = 2
        assert_eq!(h.shadow().unwrap().len(), 6); // 2 * [2, 1]_2
    }

    #[test]
    fn family_constructor_validates() {
        let a3 = amb(3, 2);
        let p = sp(&a3, &[&[1, 0, 0]]);
        assert!(Family::new(&a3, 2, vec![p.clone()]).is_err());
        let f = Family::new(&a3, 1, vec![p.clone(), p.clone()]).unwrap();
        assert_eq!(f.len(), 1, "duplicates are removed");
        let a4 = amb(4, 2);
        assert!(Family::new(&a4, 1, vec![p]).is_err());
    }
}
