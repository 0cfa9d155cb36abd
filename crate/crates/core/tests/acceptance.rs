//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the values it established. Every expected value is recomputed from the
//! defining formulas at run time; the literal constants beside them are
//! frozen cross-checks.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use qcover::audit::{check_lemma, run_registry, Outcome};
use qcover::family::{
    classify_extremal, psi_matching, random_cover_free, ExtremalClassification, Family,
};
use qcover::qbinom::{cf_bound, chi_bound, qbinom_int};
use qcover::search::{
    enumerate_cover_free_up_to, enumerate_maximum, enumerate_maximum_with, max_cover_free,
    SearchConfig, SearchPredicate,
};
use qcover::subspace::{
    enumerate_avoiding, enumerate_k, lex_complement, partition_avoiding, Ambient, Subspace,
};
use qcover::util::SplitMix64;

fn floor_u64(n: usize, k: usize, q: u64) -> u64 {
    cf_bound(n as i64, k as i64, q)
        .unwrap()
        .floor
        .to_u64()
        .unwrap()
}

fn qb(m: i64, k: i64, q: u64) -> u64 {
    qbinom_int(m, k, q).unwrap().to_u64().unwrap()
}

#[test]
fn criterion_01_bound_attainment_even_k_t1() {
    let instances: [(u64, usize, usize, u64); 4] =
        [(2, 3, 2, 3), (2, 4, 2, 7), (2, 5, 2, 15), (3, 3, 2, 4)];
    for (q, n, k, frozen) in instances {
        let start = Instant::now();
        let floor = floor_u64(n, k, q);
        assert_eq!(floor, frozen, "bound formula at (q={q}, n={n}, k={k})");
        let result = max_cover_free(q, n, k, &SearchConfig::default()).unwrap();
        assert!(
            result.optimal,
            "search must complete at (q={q}, n={n}, k={k})"
        );
        assert_eq!(
            result.max_size as u64, floor,
            "max = floor at (q={q}, n={n}, k={k})"
        );
        let elapsed = start.elapsed();
        let budget = if (q, n) == (2, 5) {
            Duration::from_secs(300)
        } else {
            Duration::from_secs(10)
        };
        assert!(elapsed < budget, "(q={q}, n={n}, k={k}) took {elapsed:?}");
        println!(
            "ACCEPTANCE criterion 1 (q={q}, n={n}, k={k}): max = floor = {floor} in {elapsed:?}: PASS"
        );
    }
}

#[test]
fn criterion_02_extremal_uniqueness_and_counts() {
    let instances: [(u64, usize, usize, u64); 4] =
        [(2, 3, 2, 7), (2, 4, 2, 15), (2, 5, 2, 31), (3, 3, 2, 13)];
    for (q, n, k, frozen_count) in instances {
        let expected = qb(n as i64, 1, q); // number of 1-subspaces
        assert_eq!(expected, frozen_count);
        let all = enumerate_maximum(q, n, k).unwrap();
        assert_eq!(
            all.len() as u64,
            expected,
            "labeled maximum count at (q={q}, n={n}, k={k})"
        );
        for fam in &all {
            assert!(
                matches!(
                    classify_extremal(fam).unwrap(),
                    ExtremalClassification::PencilSteiner { .. }
                ),
                "every maximum family is a pencil over a Steiner system"
            );
        }
        println!(
            "ACCEPTANCE criterion 2 (q={q}, n={n}, k={k}): {} maximum families, all pencil_steiner: PASS",
            all.len()
        );
    }
}

#[test]
fn criterion_03_strict_inequality_no_steiner_2_3_4() {
    let start = Instant::now();
    let bound = cf_bound(4, 3, 2).unwrap();
    assert_eq!(bound.floor, BigUint::from(5u32));
    let result = max_cover_free(2, 4, 3, &SearchConfig::default()).unwrap();
    assert!(result.optimal);
    assert_eq!(result.max_size, 3);

    // no S_2(2, 3, 4) exists: the cardinality identity 5 * [3,2] = [4,2]
    // holds, but coverage counting fails for every 5-set of hyperplanes
    let amb = Ambient::new(4, 2).unwrap();
    let hyperplanes: Vec<Subspace> = enumerate_k(&amb, 3).unwrap().collect();
    assert_eq!(hyperplanes.len(), 15);
    let mut steiner_count = 0usize;
    let mut idx = [0usize, 1, 2, 3, 4];
    loop {
        let members: Vec<Subspace> = idx.iter().map(|&i| hyperplanes[i].clone()).collect();
        let fam = Family::new(&amb, 3, members).unwrap();
        if fam.is_steiner(2).unwrap() {
            steiner_count += 1;
        }
        let mut i = 5;
        let mut advanced = false;
        while i > 0 {
            i -= 1;
            if idx[i] < 15 - 5 + i {
                idx[i] += 1;
                for j in (i + 1)..5 {
                    idx[j] = idx[j - 1] + 1;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            break;
        }
    }
    assert_eq!(steiner_count, 0, "no 5-set of hyperplanes is an S_2(2,3,4)");
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    println!(
        "ACCEPTANCE criterion 3 (q=2, n=4, k=3): bound 5, max 3, no S_2(2,3,4) among all 3003 candidates in {elapsed:?}: PASS"
    );
}

#[test]
fn criterion_04_odd_k1_attained_by_the_point_steiner() {
    for (n, frozen) in [(3usize, 7u64), (4, 15), (5, 31)] {
        let expected = qb(n as i64, 1, 2);
        assert_eq!(expected, frozen);
        let result = max_cover_free(2, n, 1, &SearchConfig::default()).unwrap();
        assert!(result.optimal);
        assert_eq!(result.max_size as u64, expected);
        let amb = Ambient::new(n, 2).unwrap();
        let all_points = Family::new(&amb, 1, enumerate_k(&amb, 1).unwrap().collect()).unwrap();
        assert_eq!(all_points.len() as u64, expected);
        assert!(all_points.is_cover_free());
        assert!(all_points.is_steiner(1).unwrap(), "S_2(1,1,{n})");
        println!("ACCEPTANCE criterion 4 (q=2, n={n}, k=1): max = {expected}, S_2(1,1,{n}) certified: PASS");
    }
}

#[test]
fn criterion_05_lifting_preserves_cover_freeness() {
    for (q, n, k) in [(2u64, 3usize, 2usize), (3, 3, 2)] {
        let amb = Ambient::new(n, q).unwrap();
        let mut failures = 0usize;
        for seed in 0..200u64 {
            let fam = random_cover_free(&amb, k, seed).unwrap();
            assert!(fam.is_cover_free());
            if !fam.lift().unwrap().is_cover_free() {
                failures += 1;
            }
        }
        assert_eq!(failures, 0, "(q={q}, n={n}, k={k})");
        println!(
            "ACCEPTANCE criterion 5 (q={q}, n={n}, k={k}): 200 seeded lifts, zero failures: PASS"
        );
    }
}

#[test]
fn criterion_06_erdos_ko_rado_reproduction() {
    let start = Instant::now();
    let result = enumerate_maximum_with(2, 4, 2, SearchPredicate::Intersecting).unwrap();
    let expected = qb(3, 1, 2); // [n-1, k-1]_2
    assert_eq!(result.max_size as u64, expected);
    let all = result.all_maximum.unwrap();
    assert!(!all.is_empty());
    for fam in &all {
        assert!(fam.is_intersecting());
        // shape 1: point star {H : E <= H}; shape 2: [Y, 2] for dim Y = 3
        let mut common = fam.members()[0].clone();
        let mut span = fam.members()[0].clone();
        for m in fam.members().iter().skip(1) {
            common = common.meet(m).unwrap();
            span = span.join(m).unwrap();
        }
        let star = common.dim() == 1;
        let level_of_solid = span.dim() == 3;
        assert!(
            star || level_of_solid,
            "a maximum intersecting family must be a point star or the 2-subspaces of a 3-space"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!(
        "ACCEPTANCE criterion 6 (q=2, n=4, k=2): max intersecting = {expected}, {} maximum families all of the two shapes in {elapsed:?}: PASS",
        all.len()
    );
}

#[test]
fn criterion_07_counting_lemma_and_fiber_partition() {
    let mut cells = 0usize;
    for q in [2u64, 3] {
        for n in 2..=6usize {
            let amb = Ambient::new(n, q).unwrap();
            let v = Subspace::full(&amb);
            for m_dim in 0..n {
                for l in 1..=(n - m_dim) {
                    // a canonical M plus a seeded non-canonical one
                    let canonical_m: Subspace = enumerate_k(&amb, m_dim).unwrap().next().unwrap();
                    let mut rng = SplitMix64::new(
                        (q * 1000 + n as u64 * 100 + m_dim as u64 * 10 + l as u64) ^ 0x5eed,
                    );
                    let all_m: Vec<Subspace> = enumerate_k(&amb, m_dim).unwrap().collect();
                    let random_m = all_m[rng.below(all_m.len())].clone();
                    for m_sub in [&canonical_m, &random_m] {
                        let avoid = enumerate_avoiding(&v, m_sub, l).unwrap();
                        let expected = (q as u128).pow((l * m_dim) as u32)
                            * qbinom_int((n - m_dim) as i64, l as i64, q)
                                .unwrap()
                                .to_u128()
                                .unwrap();
                        assert_eq!(
                            avoid.len() as u128,
                            expected,
                            "count at (q={q}, n={n}, m={m_dim}, l={l})"
                        );
                        // fibers partition the avoiding set
                        let w = lex_complement(m_sub);
                        let parts = partition_avoiding(&v, m_sub, &w, l).unwrap();
                        let mut union: Vec<Subspace> = parts.into_iter().flatten().collect();
                        let total = union.len();
                        union.sort();
                        union.dedup();
                        assert_eq!(union.len(), total, "fibers are pairwise disjoint");
                        assert_eq!(union, avoid, "fiber union equals the avoiding set");
                        cells += 1;
                    }
                }
            }
        }
    }
    println!(
        "ACCEPTANCE criterion 7: counting identity and fiber partition on {cells} cells: PASS"
    );
}

#[test]
fn criterion_08_chi_bound_exhaustive_and_sampled() {
    let amb = Ambient::new(4, 2).unwrap();
    let lines: Vec<Subspace> = enumerate_k(&amb, 2).unwrap().collect();
    assert_eq!(lines.len(), 35);
    let line_index: std::collections::HashMap<&Subspace, usize> =
        lines.iter().enumerate().map(|(i, s)| (s, i)).collect();
    // per 3-space: the bitmask of its seven 2-subspaces
    let solids: Vec<Subspace> = enumerate_k(&amb, 3).unwrap().collect();
    let tmasks: Vec<u64> = solids
        .iter()
        .map(|t| {
            t.subspaces_of(2)
                .unwrap()
                .iter()
                .fold(0u64, |acc, s| acc | 1 << line_index[s])
        })
        .collect();
    let chi_mask = |h: u64| tmasks.iter().filter(|&&tm| tm & h == tm).count();

    // validate the mask route against the definitional operator
    let mut rng = SplitMix64::new(88);
    for _ in 0..200 {
        let size = 1 + rng.below(35);
        let mut pick: Vec<usize> = (0..35).collect();
        rng.shuffle(&mut pick);
        pick.truncate(size);
        let h_mask = pick.iter().fold(0u64, |acc, &i| acc | 1 << i);
        let fam = Family::new(&amb, 2, pick.iter().map(|&i| lines[i].clone()).collect()).unwrap();
        assert_eq!(
            chi_mask(h_mask),
            fam.chi().unwrap().len(),
            "mask chi matches definitional chi"
        );
    }

    // right-hand sides cached per family size
    let rhs: Vec<f64> = (0..=35)
        .map(|s| {
            if s == 0 {
                0.0
            } else {
                chi_bound(s as f64, 2, 2).unwrap()
            }
        })
        .collect();

    // exhaustive over all subsets of size 1..=8
    let mut checked = 0u64;
    for (size, &bound) in rhs.iter().enumerate().skip(1).take(8) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let h = idx.iter().fold(0u64, |acc, &i| acc | 1 << i);
            let chi = chi_mask(h) as f64;
            assert!(
                chi <= bound + 1e-9 * bound.max(1.0),
                "chi bound violated for mask {h:#x} of size {size}"
            );
            checked += 1;
            let mut i = size;
            let mut advanced = false;
            while i > 0 {
                i -= 1;
                if idx[i] < 35 - size + i {
                    idx[i] += 1;
                    for j in (i + 1)..size {
                        idx[j] = idx[j - 1] + 1;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
    }

    // 10^4 seeded random larger subsets
    let mut rng = SplitMix64::new(20240117);
    for _ in 0..10_000 {
        let size = 9 + rng.below(35 - 9 + 1);
        let mut pick: Vec<usize> = (0..35).collect();
        rng.shuffle(&mut pick);
        pick.truncate(size);
        let h = pick.iter().fold(0u64, |acc, &i| acc | 1 << i);
        let chi = chi_mask(h) as f64;
        assert!(chi <= rhs[size] + 1e-9 * rhs[size].max(1.0));
        checked += 1;
    }
    println!("ACCEPTANCE criterion 8: chi bound on {checked} subsets (exhaustive <= 8 plus 10^4 sampled), zero violations: PASS");
}

#[test]
fn criterion_09_psi_bijection() {
    let mut ran = 0usize;
    let mut skipped = Vec::new();
    for q in [2u64, 3] {
        for n in 2..=6usize {
            for a in 1..n {
                let amb = Ambient::new(n, q).unwrap();
                match psi_matching(&amb, a) {
                    Ok(pairs) => {
                        let expected = qb(n as i64, a as i64, q);
                        assert_eq!(pairs.len() as u64, expected, "(q={q}, n={n}, a={a})");
                        for (l, r) in &pairs {
                            assert!(l.is_direct_complement(r).unwrap());
                        }
                        // both sides are hit exactly once
                        let mut rights: Vec<&Subspace> = pairs.iter().map(|(_, r)| r).collect();
                        rights.sort();
                        rights.dedup();
                        assert_eq!(rights.len(), pairs.len());
                        ran += 1;
                    }
                    Err(qcover::Error::Infeasible { .. }) => skipped.push((q, n, a)),
                    Err(e) => panic!("(q={q}, n={n}, a={a}): {e}"),
                }
            }
        }
    }
    assert!(ran >= 15, "the bulk of the grid is feasible");
    println!(
        "ACCEPTANCE criterion 9: psi matching verified on {ran} cells (skipped as infeasible: {skipped:?}): PASS"
    );
}

#[test]
fn criterion_10_audit_suite() {
    let start = Instant::now();
    let registry_ids = [
        "r1",
        "s",
        "c1",
        "l1",
        "l2",
        "ff",
        "cc",
        "global-weight-cap",
        "weight-sum",
    ];

    // every maximum family from criteria 1-3
    let even_instances: [(u64, usize, usize); 4] = [(2, 3, 2), (2, 4, 2), (2, 5, 2), (3, 3, 2)];
    for (q, n, k) in even_instances {
        for fam in enumerate_maximum(q, n, k).unwrap() {
            for id in registry_ids {
                let rep = check_lemma(&fam, id).unwrap();
                assert!(
                    !rep.failed(),
                    "(q={q}, n={n}, k={k}) lemma {id} failed: lhs={} rhs={} witness={:?}",
                    rep.lhs_string(),
                    rep.rhs_string(),
                    rep.witness
                );
                assert!(
                    rep.passed(),
                    "(q={q}, n={n}, k={k}) lemma {id} must pass on extremal even-k instances, got {:?}",
                    rep.outcome
                );
            }
        }
    }
    // odd-k maxima: the registry reports inapplicable, never failed
    for fam in enumerate_maximum(2, 4, 3).unwrap() {
        for rep in run_registry(&fam, None).unwrap() {
            assert!(
                matches!(rep.outcome, Outcome::Inapplicable(_)),
                "odd-k lemma {} must be inapplicable, got {:?}",
                rep.lemma_id,
                rep.outcome
            );
        }
    }

    // the aft / t0 lemmas on every cover-free family at (2, 5, 4) up to
    // size 4; the full registry runs alongside and must never report a
    // failure on any of these families
    let fams = enumerate_cover_free_up_to(2, 5, 4, 4).unwrap();
    assert_eq!(fams.len(), 651); // 31 singletons + 465 pairs + 155 pencils
    let must_pass = [
        "le20",
        "pair-count",
        "sum",
        "weight-sum",
        "global-weight-cap",
        "r1",
        "s",
    ];
    let mut audited = 0usize;
    for fam in &fams {
        for rep in run_registry(fam, None).unwrap() {
            assert!(
                !rep.failed(),
                "lemma {} on |F|={}: lhs={} rhs={} witness={:?}",
                rep.lemma_id,
                fam.len(),
                rep.lhs_string(),
                rep.rhs_string(),
                rep.witness
            );
            if must_pass.contains(&rep.lemma_id.as_str()) {
                assert!(
                    rep.passed(),
                    "lemma {} on |F|={}: expected pass, got {:?}",
                    rep.lemma_id,
                    fam.len(),
                    rep.outcome
                );
                audited += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(600),
        "audit suite took {elapsed:?}"
    );
    println!(
        "ACCEPTANCE criterion 10: registry clean on all maximum families; {audited} aft-lemma checks on 651 families at (2,5,4) in {elapsed:?}: PASS"
    );
}

#[test]
fn criterion_11_global_bound_consistency() {
    let instances: [(u64, usize, usize); 8] = [
        (2, 3, 2),
        (2, 4, 2),
        (2, 5, 2),
        (3, 3, 2),
        (2, 4, 3),
        (2, 3, 1),
        (2, 4, 1),
        (2, 5, 1),
    ];
    for (q, n, k) in instances {
        let result = max_cover_free(q, n, k, &SearchConfig::default()).unwrap();
        assert!(result.optimal);
        let floor = floor_u64(n, k, q);
        assert!(
            result.max_size as u64 <= floor,
            "(q={q}, n={n}, k={k}): max {} above floor {floor}",
            result.max_size
        );
    }
    println!(
        "ACCEPTANCE criterion 11: max <= floor(bound) on all {} completed instances: PASS",
        instances.len()
    );
}
