//! Canonical subspaces of V = GF(q)^n and their lattice operations.
//!
//! Every subspace is stored as its reduced row echelon basis, so subspace
//! equality is structural equality and the deterministic enumeration order
//! (pivot-column set lexicographic, then free entries read row-major) is
//! well defined. The representation is normative: all operations return
//! canonical values.

use std::cmp::Ordering;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::gfq::{make_field, Code, FieldSpec};
use crate::qbinom::qbinom_int;

/// Largest ambient dimension accepted; [16, 8]_2 already exceeds 10^18, so
/// enumeration-based operations additionally check count feasibility.
pub const MAX_AMBIENT_DIM: usize = 16;

/// Largest number of subspaces an enumeration-based operation will produce.
pub const ENUM_CAP: u64 = 4_000_000;

/// The ambient pair (n, GF(q)).
#[derive(Clone)]
pub struct Ambient {
    n: usize,
    field: Arc<FieldSpec>,
}

impl Ambient {
    pub fn new(n: usize, q: u64) -> Result<Ambient> {
        if !(1..=MAX_AMBIENT_DIM).contains(&n) {
            return Err(Error::InvalidArgument(format!(
                "ambient dimension must be in 1..={MAX_AMBIENT_DIM} (got {n})"
            )));
        }
        Ok(Ambient {
            n,
            field: Arc::new(make_field(q)?),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.field.q()
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn zero_vector(&self) -> Vec<Code> {
        vec![0; self.n]
    }

    pub fn unit_vector(&self, i: usize) -> Vec<Code> {
        let mut v = self.zero_vector();
        v[i] = 1;
        v
    }

    /// Same field, different dimension.
    pub fn with_dim(&self, n: usize) -> Result<Ambient> {
        if !(1..=MAX_AMBIENT_DIM).contains(&n) {
            return Err(Error::InvalidArgument(format!(
                "ambient dimension must be in 1..={MAX_AMBIENT_DIM} (got {n})"
            )));
        }
        Ok(Ambient {
            n,
            field: Arc::clone(&self.field),
        })
    }
}

impl PartialEq for Ambient {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.q() == other.q()
    }
}
impl Eq for Ambient {}

impl Hash for Ambient {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.q().hash(state);
    }
}

impl std::fmt::Debug for Ambient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GF({})^{}", self.q(), self.n)
    }
}

/// A subspace in canonical (RREF) form. The zero space is the empty row list.
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient: Ambient,
    rows: Vec<Vec<Code>>,
}

impl Hash for Subspace {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ambient.hash(state);
        self.rows.hash(state);
    }
}

impl std::fmt::Debug for Subspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Subspace{:?}{:?}", self.ambient, self.rows)
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical total order: ambient (n, q), then pivot-column set
/// lexicographic, then all entries read row-major.
impl Ord for Subspace {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.ambient.n, self.ambient.q())
            .cmp(&(other.ambient.n, other.ambient.q()))
            .then_with(|| self.pivot_cols().cmp(&other.pivot_cols()))
            .then_with(|| {
                for (a, b) in self.rows.iter().zip(other.rows.iter()) {
                    match a.cmp(b) {
                        Ordering::Equal => {}
                        ord => return ord,
                    }
                }
                Ordering::Equal
            })
    }
}

impl Subspace {
    pub fn zero(amb: &Ambient) -> Subspace {
        Subspace {
            ambient: amb.clone(),
            rows: Vec::new(),
        }
    }

    pub fn full(amb: &Ambient) -> Subspace {
        let rows = (0..amb.n()).map(|i| amb.unit_vector(i)).collect();
        Subspace {
            ambient: amb.clone(),
            rows,
        }
    }

    /// Canonical form of the span of the given vectors. Idempotent.
    pub fn canonicalize(amb: &Ambient, vectors: &[Vec<Code>]) -> Result<Subspace> {
        for v in vectors {
            if v.len() != amb.n() {
                return Err(Error::DimensionMismatch {
                    expected: amb.n(),
                    got: v.len(),
                });
            }
            if v.iter().any(|&c| c as u64 >= amb.q()) {
                return Err(Error::InvalidArgument(format!(
                    "vector entry out of range for GF({})",
                    amb.q()
                )));
            }
        }
        let rows = rref(amb.field(), amb.n(), vectors.to_vec());
        Ok(Subspace {
            ambient: amb.clone(),
            rows,
        })
    }

    pub fn from_span_of_units(amb: &Ambient, cols: &[usize]) -> Subspace {
        let rows = cols.iter().map(|&c| amb.unit_vector(c)).collect();
        Subspace {
            ambient: amb.clone(),
            rows,
        }
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Code>] {
        &self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ambient.n()
    }

    pub fn pivot_cols(&self) -> Vec<usize> {
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .position(|&c| c != 0)
                    .expect("canonical rows are nonzero")
            })
            .collect()
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch);
        }
        Ok(())
    }

    /// Reduce a vector against this (canonical) basis; the remainder is zero
    /// exactly when the vector lies in the subspace.
    fn reduce_vector(&self, v: &[Code]) -> Vec<Code> {
        let f = self.ambient.field();
        let mut v = v.to_vec();
        for row in &self.rows {
            let p = row.iter().position(|&c| c != 0).unwrap();
            let c = v[p];
            if c != 0 {
                for (x, &r) in v.iter_mut().zip(row.iter()) {
                    *x = f.sub(*x, f.mul(c, r));
                }
            }
        }
        v
    }

    pub fn contains_vector(&self, v: &[Code]) -> bool {
        v.len() == self.ambient.n() && self.reduce_vector(v).iter().all(|&c| c == 0)
    }

    /// B <= A, i.e. every basis vector of `other` lies in `self`.
    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        self.check_ambient(other)?;
        Ok(other.rows.iter().all(|r| self.contains_vector(r)))
    }

    /// Intersection, by the Zassenhaus double-matrix reduction.
    pub fn meet(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let n = self.ambient.n();
        let f = self.ambient.field();
        let mut wide: Vec<Vec<Code>> = Vec::with_capacity(self.dim() + other.dim());
        for r in &self.rows {
            let mut w = r.clone();
            w.extend_from_slice(r);
            wide.push(w);
        }
        for r in &other.rows {
            let mut w = r.clone();
            w.extend(std::iter::repeat_n(0, n));
            wide.push(w);
        }
        let reduced = rref(f, 2 * n, wide);
        let meet_rows: Vec<Vec<Code>> = reduced
            .into_iter()
            .filter(|w| w[..n].iter().all(|&c| c == 0))
            .map(|w| w[n..].to_vec())
            .collect();
        Subspace::canonicalize(&self.ambient, &meet_rows)
    }

    /// Linear span of the union.
    pub fn join(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Subspace::canonicalize(&self.ambient, &rows)
    }

    pub fn is_direct_complement(&self, other: &Subspace) -> Result<bool> {
        self.check_ambient(other)?;
        if self.dim() + other.dim() != self.ambient.n() {
            return Ok(false);
        }
        Ok(self.meet(other)?.is_zero())
    }

    /// All q^dim vectors of the subspace.
    pub fn vectors(&self) -> Vec<Vec<Code>> {
        let f = self.ambient.field();
        let q = self.ambient.q() as usize;
        let d = self.dim();
        let n = self.ambient.n();
        let total = q.pow(d as u32);
        let mut out = Vec::with_capacity(total);
        let mut coeffs = vec![0u8; d];
        loop {
            let mut v = vec![0u8; n];
            for (i, &c) in coeffs.iter().enumerate() {
                if c != 0 {
                    for (x, &r) in v.iter_mut().zip(self.rows[i].iter()) {
                        *x = f.add(*x, f.mul(c, r));
                    }
                }
            }
            out.push(v);
            // odometer
            let mut i = d;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if (coeffs[i] as usize) + 1 < q {
                    coeffs[i] += 1;
                    break;
                }
                coeffs[i] = 0;
            }
        }
    }

    /// All j-dimensional subspaces of `self`, in a deterministic order.
    pub fn subspaces_of(&self, j: usize) -> Result<Vec<Subspace>> {
        let d = self.dim();
        if j > d {
            return Ok(Vec::new());
        }
        if j == 0 {
            return Ok(vec![Subspace::zero(&self.ambient)]);
        }
        if j == d {
            return Ok(vec![self.clone()]);
        }
        check_feasible(
            d as i64,
            j as i64,
            self.ambient.q(),
            "subspaces of a subspace",
        )?;
        let local = self.ambient.with_dim(d)?;
        let mut out = Vec::new();
        for loc in enumerate_k(&local, j)? {
            out.push(Subspace::embed_from(self, &loc)?);
        }
        Ok(out)
    }

    /// Coordinates of `self` (<= carrier) relative to the carrier's canonical
    /// basis, as a subspace of GF(q)^{dim carrier}.
    pub fn express_in(&self, carrier: &Subspace) -> Result<Subspace> {
        self.check_ambient(carrier)?;
        if !carrier.contains(self)? {
            return Err(Error::InvalidArgument(
                "express_in: subspace is not contained in the carrier".into(),
            ));
        }
        let local = self.ambient.with_dim(carrier.dim())?;
        let pivots = carrier.pivot_cols();
        let rows: Vec<Vec<Code>> = self
            .rows
            .iter()
            .map(|v| pivots.iter().map(|&p| v[p]).collect())
            .collect();
        Subspace::canonicalize(&local, &rows)
    }

    /// Inverse of `express_in`: map a subspace of GF(q)^{dim carrier} back
    /// into the carrier.
    pub fn embed_from(carrier: &Subspace, local: &Subspace) -> Result<Subspace> {
        if local.ambient.n() != carrier.dim() || local.ambient.q() != carrier.ambient.q() {
            return Err(Error::DimensionMismatch {
                expected: carrier.dim(),
                got: local.ambient.n(),
            });
        }
        let f = carrier.ambient.field();
        let n = carrier.ambient.n();
        let rows: Vec<Vec<Code>> = local
            .rows
            .iter()
            .map(|lr| {
                let mut v = vec![0u8; n];
                for (i, &c) in lr.iter().enumerate() {
                    if c != 0 {
                        for (x, &r) in v.iter_mut().zip(carrier.rows[i].iter()) {
                            *x = f.add(*x, f.mul(c, r));
                        }
                    }
                }
                v
            })
            .collect();
        Subspace::canonicalize(&carrier.ambient, &rows)
    }
}

/// Reduced row echelon form over GF(q); returns only the nonzero rows, in
/// pivot order.
fn rref(f: &FieldSpec, width: usize, mut rows: Vec<Vec<Code>>) -> Vec<Vec<Code>> {
    let mut rank = 0;
    for col in 0..width {
        let Some(src) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(rank, src);
        let inv = f.inv(rows[rank][col]).expect("pivot is nonzero");
        if inv != 1 {
            for x in rows[rank].iter_mut() {
                *x = f.mul(*x, inv);
            }
        }
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row[col] != 0 {
                let c = row[col];
                for (x, &r) in row.iter_mut().zip(pivot_row.iter()) {
                    *x = f.sub(*x, f.mul(c, r));
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    rows
}

/// Count check for enumeration-based operations; errors with an estimate when
/// the request exceeds the desk-scale cap.
pub fn check_feasible(m: i64, k: i64, q: u64, what: &str) -> Result<u64> {
    let count = qbinom_int(m, k, q)?;
    match count.to_u64() {
        Some(c) if c <= ENUM_CAP => Ok(c),
        _ => Err(Error::Infeasible {
            what: format!("{what} [{m}, {k}]_{q}"),
            estimate: count.to_string(),
        }),
    }
}

/// Deterministic stream of all k-dimensional subspaces of the ambient space:
/// pivot-column sets in lexicographic order, then free entries in row-major
/// lexicographic order.
pub struct SubspaceStream {
    amb: Ambient,
    k: usize,
    pivots: Vec<usize>,
    free_pos: Vec<(usize, usize)>,
    free_vals: Vec<Code>,
    started: bool,
    done: bool,
}

pub fn enumerate_k(amb: &Ambient, k: usize) -> Result<SubspaceStream> {
    if k > amb.n() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} exceeds ambient dimension {}",
            amb.n()
        )));
    }
    check_feasible(amb.n() as i64, k as i64, amb.q(), "enumeration of")?;
    let pivots: Vec<usize> = (0..k).collect();
    let free_pos = free_positions(amb.n(), &pivots);
    Ok(SubspaceStream {
        amb: amb.clone(),
        k,
        free_vals: vec![0; free_pos.len()],
        pivots,
        free_pos,
        started: false,
        done: false,
    })
}

/// Number of k-dimensional subspaces, for convenience next to the stream.
pub fn count_k(amb: &Ambient, k: usize) -> Result<num_bigint::BigUint> {
    qbinom_int(amb.n() as i64, k as i64, amb.q())
}

fn free_positions(n: usize, pivots: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, &p) in pivots.iter().enumerate() {
        for c in (p + 1)..n {
            if !pivots.contains(&c) {
                out.push((i, c));
            }
        }
    }
    out
}

impl SubspaceStream {
    fn build(&self) -> Subspace {
        let n = self.amb.n();
        let mut rows = vec![vec![0u8; n]; self.k];
        for (i, &p) in self.pivots.iter().enumerate() {
            rows[i][p] = 1;
        }
        for (&(i, c), &v) in self.free_pos.iter().zip(self.free_vals.iter()) {
            rows[i][c] = v;
        }
        Subspace {
            ambient: self.amb.clone(),
            rows,
        }
    }

    /// Advance free entries (last position fastest); on wrap, advance the
    /// pivot combination. Returns false when exhausted.
    fn advance(&mut self) -> bool {
        let q = self.amb.q() as u8;
        let mut i = self.free_vals.len();
        while i > 0 {
            i -= 1;
            if self.free_vals[i] + 1 < q {
                self.free_vals[i] += 1;
                return true;
            }
            self.free_vals[i] = 0;
        }
        // next pivot combination in lexicographic order
        let n = self.amb.n();
        let k = self.k;
        if k == 0 {
            return false;
        }
        let mut idx = k;
        loop {
            if idx == 0 {
                return false;
            }
            idx -= 1;
            if self.pivots[idx] < n - k + idx {
                self.pivots[idx] += 1;
                for j in (idx + 1)..k {
                    self.pivots[j] = self.pivots[idx] + (j - idx);
                }
                self.free_pos = free_positions(n, &self.pivots);
                self.free_vals = vec![0; self.free_pos.len()];
                return true;
            }
        }
    }
}

impl Iterator for SubspaceStream {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.build());
        }
        if self.advance() {
            Some(self.build())
        } else {
            self.done = true;
            None
        }
    }
}

/// First subspace R (in enumeration order) with T ⊕ R = V.
pub fn lex_complement(t: &Subspace) -> Subspace {
    let amb = t.ambient();
    let c = amb.n() - t.dim();
    enumerate_k(amb, c)
        .expect("complement enumeration is feasible whenever T was constructed")
        .find(|r| t.meet(r).map(|m| m.is_zero()).unwrap_or(false))
        .expect("every subspace has a complement")
}

/// First W <= U (in the deterministic order of `subspaces_of`) with
/// W ⊕ M = U.
pub fn complement_in(u: &Subspace, m: &Subspace) -> Result<Subspace> {
    if !u.contains(m)? {
        return Err(Error::InvalidArgument(
            "complement_in: M must lie inside U".into(),
        ));
    }
    let c = u.dim() - m.dim();
    u.subspaces_of(c)?
        .into_iter()
        .find(|w| m.meet(w).map(|x| x.is_zero()).unwrap_or(false))
        .ok_or_else(|| Error::Inconsistency("no complement found inside carrier".into()))
}

/// The fiber [B ⊕ M, k, 0]_M: all subspaces spanned by {b_i + v_i} with
/// v_i in M, where {b_i} is B's canonical basis. Exactly q^{dim(M) dim(B)}
/// distinct subspaces, each meeting M trivially.
pub fn fiber(b: &Subspace, m: &Subspace) -> Result<Vec<Subspace>> {
    b.check_ambient(m)?;
    if !b.meet(m)?.is_zero() {
        return Err(Error::InvalidArgument(
            "fiber: B and M must intersect trivially".into(),
        ));
    }
    let k = b.dim();
    let mdim = m.dim();
    let q = b.ambient.q();
    let size = (q as u128)
        .checked_pow((mdim * k) as u32)
        .unwrap_or(u128::MAX);
    if size > ENUM_CAP as u128 {
        return Err(Error::Infeasible {
            what: format!("fiber of dimension-{k} base over dimension-{mdim} M"),
            estimate: size.to_string(),
        });
    }
    if k == 0 {
        return Ok(vec![b.clone()]);
    }
    let f = b.ambient.field();
    let mvecs = m.vectors();
    let mut out = Vec::with_capacity(size as usize);
    let mut choice = vec![0usize; k];
    loop {
        let rows: Vec<Vec<Code>> = b
            .rows
            .iter()
            .zip(choice.iter())
            .map(|(br, &ci)| {
                br.iter()
                    .zip(mvecs[ci].iter())
                    .map(|(&x, &y)| f.add(x, y))
                    .collect()
            })
            .collect();
        out.push(Subspace::canonicalize(&b.ambient, &rows)?);
        let mut i = k;
        loop {
            if i == 0 {
                out.sort();
                debug_assert!(
                    out.windows(2).all(|w| w[0] != w[1]),
                    "fiber members are distinct"
                );
                return Ok(out);
            }
            i -= 1;
            if choice[i] + 1 < mvecs.len() {
                choice[i] += 1;
                break;
            }
            choice[i] = 0;
        }
    }
}

/// All k-dimensional subspaces of U meeting M trivially, generated fiber by
/// fiber over a complement of M in U. Count: q^{dim(M) k} [dim U - dim M, k].
pub fn enumerate_avoiding(u: &Subspace, m: &Subspace, k: usize) -> Result<Vec<Subspace>> {
    if !u.contains(m)? {
        return Err(Error::InvalidArgument(
            "enumerate_avoiding: M must lie inside U".into(),
        ));
    }
    let mdim = m.dim();
    if k + mdim > u.dim() {
        return Ok(Vec::new());
    }
    if k == 0 {
        return Ok(vec![Subspace::zero(u.ambient())]);
    }
    let q = u.ambient.q();
    let base = check_feasible(
        (u.dim() - mdim) as i64,
        k as i64,
        q,
        "avoiding enumeration base",
    )?;
    let per_fiber = (q as u128).pow((mdim * k) as u32);
    let total = per_fiber * base as u128;
    if total > ENUM_CAP as u128 {
        return Err(Error::Infeasible {
            what: format!("[U, {k}, 0]_M with dim U = {}, dim M = {mdim}", u.dim()),
            estimate: total.to_string(),
        });
    }
    let w = complement_in(u, m)?;
    let mut out = Vec::with_capacity(total as usize);
    for b in w.subspaces_of(k)? {
        out.extend(fiber(&b, m)?);
    }
    out.sort();
    debug_assert!(out.windows(2).all(|x| x[0] != x[1]));
    Ok(out)
}

/// The fibers {[B ⊕ M, k, 0]_M : B in [W, k]}; pairwise disjoint with union
/// [U, k, 0]_M.
pub fn partition_avoiding(
    u: &Subspace,
    m: &Subspace,
    w: &Subspace,
    k: usize,
) -> Result<Vec<Vec<Subspace>>> {
    if !u.contains(m)? || !u.contains(w)? {
        return Err(Error::InvalidArgument(
            "partition_avoiding: M, W must lie inside U".into(),
        ));
    }
    if !(m.meet(w)?.is_zero() && m.dim() + w.dim() == u.dim()) {
        return Err(Error::InvalidArgument(
            "partition_avoiding: W and M must be complementary in U".into(),
        ));
    }
    if k < 1 || k > w.dim() {
        return Err(Error::InvalidArgument(format!(
            "partition_avoiding: k must be in 1..={} (got {k})",
            w.dim()
        )));
    }
    w.subspaces_of(k)?.iter().map(|b| fiber(b, m)).collect()
}
