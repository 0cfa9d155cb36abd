//! Gaussian binomial coefficients: exact integer values, exact rational
//! cover-free bounds, and the real-argument evaluation/inversion used by the
//! shadow machinery.
//!
//! The defining product is
//! `[m, k]_q = prod_{i=0}^{k-1} (q^{m-i} - 1) / (q^{k-i} - 1)`,
//! an exact integer for integer m >= k >= 0 and a continuous, strictly
//! increasing function of real m on [k, oo) for fixed k and q.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact `[m, k]_q` for integer arguments. Zero when m < k.
pub fn qbinom_int(m: i64, k: i64, q: u64) -> Result<BigUint> {
    if m < 0 || k < 0 {
        return Err(Error::InvalidArgument(format!(
            "Gaussian binomial needs m, k >= 0 (got m={m}, k={k})"
        )));
    }
    if q < 2 {
        return Err(Error::InvalidArgument(format!("q must be >= 2 (got {q})")));
    }
    if k > m {
        return Ok(BigUint::zero());
    }
    let q = BigUint::from(q);
    let one = BigUint::one();
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= q.pow((m - i) as u32) - &one;
        den *= q.pow((k - i) as u32) - &one;
    }
    let (quot, rem) = num.div_rem(&den);
    debug_assert!(rem.is_zero(), "q-binomial product is always an integer");
    Ok(quot)
}

/// Exact `[m, k]_q` as a rational, convenient for bound arithmetic.
pub fn qbinom_rational(m: i64, k: i64, q: u64) -> Result<BigRational> {
    Ok(BigRational::from_integer(BigInt::from(qbinom_int(
        m, k, q,
    )?)))
}

/// q^z as an exact rational, z any integer (negative exponents allowed).
pub fn q_pow(q: u64, z: i64) -> BigRational {
    let base = BigInt::from(q);
    if z >= 0 {
        BigRational::from_integer(base.pow(z as u32))
    } else {
        BigRational::new(BigInt::one(), base.pow((-z) as u32))
    }
}

/// `[m, k]_q` for real m >= k, via the product formula in f64.
///
/// Relative error stays far below the 1e-9 tolerances used by callers for the
/// desk-scale arguments involved (m <= ~32, q <= 16).
pub fn qbinom_real(m: f64, k: i64, q: u64) -> Result<f64> {
    if k < 0 {
        return Err(Error::InvalidArgument(format!("k must be >= 0 (got {k})")));
    }
    if q < 2 {
        return Err(Error::InvalidArgument(format!("q must be >= 2 (got {q})")));
    }
    if m < k as f64 {
        return Err(Error::InvalidArgument(format!(
            "real-argument Gaussian binomial needs m >= k (got m={m}, k={k})"
        )));
    }
    let qf = q as f64;
    let mut value = 1.0;
    for i in 0..k {
        value *= (qf.powf(m - i as f64) - 1.0) / (qf.powi((k - i) as i32) - 1.0);
    }
    Ok(value)
}

/// The unique real m >= k with `[m, k]_q = n_val`, by bisection.
///
/// Bracket: `[m, k]_q >= q^{k(m-k)}`, so m <= k + log_q(N) always holds;
/// the bracket [k, k + log_q(N) + 2] is safe. Bisection runs to relative
/// tolerance 1e-12, giving round-trip error well under 1e-9.
pub fn invert_qbinom(n_val: f64, k: i64, q: u64) -> Result<f64> {
    if n_val.is_nan() || n_val < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "no m >= k solves [m,k]_q = {n_val} < 1"
        )));
    }
    if k < 0 || q < 2 {
        return Err(Error::InvalidArgument("need k >= 0, q >= 2".into()));
    }
    if n_val == 1.0 {
        return Ok(k as f64);
    }
    let mut lo = k as f64;
    let mut hi = k as f64 + n_val.ln() / (q as f64).ln() + 2.0;
    debug_assert!(qbinom_real(hi, k, q)? >= n_val);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if qbinom_real(mid, k, q)? < n_val {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi.max(1.0) {
            break;
        }
    }
    Ok((0.5 * (lo + hi)).max(k as f64))
}

/// Right-hand side of the shadow-complement (chi) bound: `[m, k+1]_q` where
/// m >= k is defined by `[m, k]_q = h_size`.
///
/// The product formula extends continuously to k <= m < k+1 (the last factor
/// drops below one, reaching 0 at m = k), which is exactly the range the
/// theorem needs for small families.
pub fn chi_bound(h_size: f64, k: i64, q: u64) -> Result<f64> {
    let m = invert_qbinom(h_size, k, q)?;
    let j = k + 1;
    let qf = q as f64;
    let mut value = 1.0;
    for i in 0..j {
        value *= ((qf.powf(m - i as f64) - 1.0) / (qf.powi((j - i) as i32) - 1.0)).max(0.0);
    }
    Ok(value)
}

/// The maximum-size upper bound for a cover-free family in `[V, k]` with
/// dim V = n, as an exact rational together with its floor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CFBound {
    pub n: i64,
    pub k: i64,
    pub q: u64,
    pub t: i64,
    pub bound: BigRational,
    pub floor: BigUint,
}

/// Bound for even k = 2t: `[n-1, t] / [2t-1, t]`; for odd k = 2t-1:
/// `[n, t] / [2t-1, t]`. Requires n >= k+1 (at n = k the maximum family is
/// trivially a single subspace and the formula does not apply).
pub fn cf_bound(n: i64, k: i64, q: u64) -> Result<CFBound> {
    if k < 1 {
        return Err(Error::InvalidArgument(format!("k must be >= 1 (got {k})")));
    }
    if n < k + 1 {
        return Err(Error::InvalidArgument(format!(
            "bound needs n >= k+1 (got n={n}, k={k}); for n = k the maximum family size is 1"
        )));
    }
    let t = (k + 1) / 2;
    let numerator = if k % 2 == 0 {
        qbinom_rational(n - 1, t, q)?
    } else {
        qbinom_rational(n, t, q)?
    };
    let bound = numerator / qbinom_rational(2 * t - 1, t, q)?;
    let floor = bound
        .floor()
        .to_integer()
        .to_biguint()
        .ok_or_else(|| Error::Inconsistency("negative cover-free bound".into()))?;
    Ok(CFBound {
        n,
        k,
        q,
        t,
        bound,
        floor,
    })
}

/// floor <= bound < floor + 1: ties the integer field to the exact rational.
pub fn floor_consistent(b: &CFBound) -> bool {
    let f = BigRational::from_integer(BigInt::from(b.floor.clone()));
    f <= b.bound && b.bound < f + BigRational::one()
}

/// Floor of the bound as u64 when it fits.
pub fn cf_bound_floor_u64(n: i64, k: i64, q: u64) -> Result<u64> {
    let b = cf_bound(n, k, q)?;
    b.floor.to_u64().ok_or_else(|| Error::Infeasible {
        what: format!("cover-free bound floor for (q={q}, n={n}, k={k})"),
        estimate: b.floor.to_string(),
    })
}

/// Necessary divisibility for an S_q(t, 2t-1, n-1) to exist:
/// q^t - 1 divides q^{n-t} - 1 (equivalently t | n-t).
pub fn steiner_divisibility_ok(n: i64, t: i64, q: u64) -> bool {
    if n < 2 * t {
        return false;
    }
    let q = BigUint::from(q);
    let one = BigUint::one();
    let a = q.pow(t as u32) - &one;
    let b = q.pow((n - t) as u32) - &one;
    (b % a).is_zero()
}

/// Rational (q^{n-t} - 1) / (q^t - 1), the residual-size threshold of the
/// weight function and the extremal residual degree.
pub fn residual_threshold(n: i64, t: i64, q: u64) -> BigRational {
    let q = BigInt::from(q);
    let one = BigInt::one();
    BigRational::new(q.pow((n - t) as u32) - &one, q.pow(t as u32) - one)
}

/// Render a rational as "num/den" with positive denominator.
pub fn rational_string(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// True when the rational is a nonnegative integer equal to the given count.
pub fn rational_equals_count(x: &BigRational, count: usize) -> bool {
    x.is_integer() && !x.is_negative() && x.to_integer() == BigInt::from(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn product_formula_examples() {
        assert_eq!(qbinom_int(3, 1, 2).unwrap(), big(7));
        assert_eq!(qbinom_int(4, 2, 2).unwrap(), big(35));
        assert_eq!(qbinom_int(5, 2, 2).unwrap(), big(155));
        assert_eq!(qbinom_int(3, 2, 3).unwrap(), big(13));
        assert_eq!(qbinom_int(2, 1, 3).unwrap(), big(4));
        for k in 0..6 {
            assert_eq!(qbinom_int(k, k, 2).unwrap(), big(1), "[k,k] = 1");
        }
        assert_eq!(qbinom_int(2, 3, 2).unwrap(), big(0), "[m,k] = 0 for m < k");
        assert_eq!(qbinom_int(0, 0, 5).unwrap(), big(1));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(qbinom_int(-1, 0, 2).is_err());
        assert!(qbinom_int(3, -2, 2).is_err());
        assert!(qbinom_int(3, 1, 1).is_err());
        assert!(qbinom_real(1.5, 2, 2).is_err());
        assert!(invert_qbinom(0.5, 2, 2).is_err());
    }

    #[test]
    fn q_pascal_recurrence() {
        // [m,k] = [m-1,k-1] + q^k [m-1,k]
        for q in [2u64, 3, 4, 5] {
            for m in 1..=12i64 {
                for k in 1..=m {
                    let lhs = qbinom_int(m, k, q).unwrap();
                    let rhs = qbinom_int(m - 1, k - 1, q).unwrap()
                        + big(q).pow(k as u32) * qbinom_int(m - 1, k, q).unwrap();
                    assert_eq!(lhs, rhs, "q-Pascal at (q={q}, m={m}, k={k})");
                }
            }
        }
    }

    #[test]
    fn symmetry() {
        for q in [2u64, 3, 4, 5] {
            for m in 0..=12i64 {
                for k in 0..=m {
                    assert_eq!(
                        qbinom_int(m, k, q).unwrap(),
                        qbinom_int(m, m - k, q).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn real_evaluation_matches_integer_path() {
        assert!((qbinom_real(4.0, 2, 2).unwrap() - 35.0).abs() < 1e-9);
        assert_eq!(qbinom_real(2.0, 2, 3).unwrap(), 1.0);
        for q in [2u64, 3] {
            for m in 1..=10i64 {
                for k in 0..=m {
                    let exact = qbinom_int(m, k, q).unwrap().to_f64().unwrap();
                    let real = qbinom_real(m as f64, k, q).unwrap();
                    assert!(
                        (real - exact).abs() <= 1e-9 * exact,
                        "(q={q}, m={m}, k={k}): {real} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn real_evaluation_strictly_increasing() {
        let a = qbinom_real(4.0, 2, 2).unwrap();
        let b = qbinom_real(4.5, 2, 2).unwrap();
        assert!(b > a);
        let mut prev = qbinom_real(2.0, 2, 2).unwrap();
        let mut m = 2.1;
        while m < 9.0 {
            let cur = qbinom_real(m, 2, 2).unwrap();
            assert!(cur > prev);
            prev = cur;
            m += 0.1;
        }
    }

    #[test]
    fn inversion_round_trip() {
        assert!((invert_qbinom(35.0, 2, 2).unwrap() - 4.0).abs() < 1e-9);
        assert!((invert_qbinom(7.0, 1, 2).unwrap() - 3.0).abs() < 1e-9);
        assert_eq!(invert_qbinom(1.0, 3, 2).unwrap(), 3.0);
        for q in [2u64, 3, 5] {
            for k in 1..=4i64 {
                let mut m = k as f64;
                while m <= 12.0 {
                    let n_val = qbinom_real(m, k, q).unwrap();
                    let back = invert_qbinom(n_val, k, q).unwrap();
                    let round = qbinom_real(back, k, q).unwrap();
                    assert!(
                        (round - n_val).abs() <= 1e-9 * n_val.max(1.0),
                        "round trip at (q={q}, k={k}, m={m})"
                    );
                    m += 0.37;
                }
            }
        }
    }

    #[test]
    fn cover_free_bounds() {
        let b = cf_bound(3, 2, 2).unwrap();
        assert_eq!(b.t, 1);
        assert_eq!(b.bound, BigRational::from_u64(3).unwrap());
        assert_eq!(b.floor, big(3));

        let b = cf_bound(4, 3, 2).unwrap();
        assert_eq!(b.t, 2);
        assert_eq!(b.bound, BigRational::from_u64(5).unwrap()); // 35/7
        assert_eq!(b.floor, big(5));

        let b = cf_bound(4, 2, 2).unwrap();
        assert_eq!(b.floor, big(7));

        let b = cf_bound(3, 2, 3).unwrap();
        assert_eq!(b.floor, big(4));

        assert!(cf_bound(2, 2, 2).is_err());
        assert!(cf_bound(3, 0, 2).is_err());
    }

    #[test]
    fn parity_reduction_bounds_coincide() {
        // bound(n, 2t-1) with numerator [n,t] equals bound(n+1, 2t) with
        // numerator [(n+1)-1, t]
        for q in [2u64, 3] {
            for t in 1..=3i64 {
                for n in (2 * t)..=9 {
                    let odd = cf_bound(n, 2 * t - 1, q).unwrap();
                    let even = cf_bound(n + 1, 2 * t, q).unwrap();
                    assert_eq!(odd.bound, even.bound, "(q={q}, t={t}, n={n})");
                }
            }
        }
    }

    #[test]
    fn divisibility_predicate() {
        // q^t - 1 | q^{n-t} - 1 iff t | n - t
        for q in [2u64, 3] {
            for t in 1..=4i64 {
                for n in (2 * t)..=12 {
                    assert_eq!(
                        steiner_divisibility_ok(n, t, q),
                        (n - t) % t == 0,
                        "(q={q}, t={t}, n={n})"
                    );
                }
            }
        }
    }

    #[test]
    fn threshold_matches_formula() {
        let th = residual_threshold(4, 1, 2);
        assert_eq!(th, BigRational::from_u64(7).unwrap());
        let th = residual_threshold(5, 2, 2);
        assert_eq!(th, BigRational::new(BigInt::from(7), BigInt::from(3)));
    }
}
