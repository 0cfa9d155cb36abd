//! Exact arithmetic in GF(q) for prime powers q <= 16.
//!
//! All four operations are table-driven, so element arithmetic is branch-free
//! and identical for prime and extension fields. Elements are integer codes in
//! `0..q`; for q = p^e the code is the base-p digit encoding of the residue
//! polynomial (digit i = coefficient of x^i), reduced modulo the
//! lexicographically least monic irreducible of degree e over GF(p).

use crate::error::{Error, Result};

/// Largest supported field order. q in {2,3,4,5} covers every experiment the
/// crate runs; 16 keeps the tables trivially small while leaving headroom.
pub const MAX_Q: u64 = 16;

/// An element code in `0..q`. Code 0 is the additive identity, code 1 the
/// multiplicative identity.
pub type Code = u8;

/// A fully tabulated finite field GF(q), q = p^e.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    q: u64,
    p: u64,
    e: u32,
    /// Modulus polynomial coefficients, low degree first, length e+1.
    /// For prime fields this is the trivial [0, 1] (the polynomial x).
    modulus: Vec<u8>,
    add: Vec<Code>,
    mul: Vec<Code>,
    neg: Vec<Code>,
    inv: Vec<Code>, // inv[0] is unused
}

impl FieldSpec {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn extension_degree(&self) -> u32 {
        self.e
    }

    /// Coefficients (low degree first) of the irreducible modulus used for
    /// extension fields.
    pub fn modulus(&self) -> &[u8] {
        &self.modulus
    }

    #[inline]
    pub fn add(&self, a: Code, b: Code) -> Code {
        self.add[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: Code, b: Code) -> Code {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Code, b: Code) -> Code {
        self.mul[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: Code) -> Code {
        self.neg[a as usize]
    }

    pub fn inv(&self, a: Code) -> Result<Code> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.inv[a as usize])
    }

    pub fn pow(&self, a: Code, n: u64) -> Code {
        let mut acc: Code = 1;
        let mut base = a;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    pub fn elements(&self) -> impl Iterator<Item = Code> {
        0..self.q as Code
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: Code) -> Result<u64> {
        if a == 0 {
            return Err(Error::InvalidArgument("order of 0 is undefined".into()));
        }
        let mut x = a;
        let mut ord = 1;
        while x != 1 {
            x = self.mul(x, a);
            ord += 1;
        }
        Ok(ord)
    }
}

/// Construct GF(q) for a prime power q with 2 <= q <= 16.
pub fn make_field(q: u64) -> Result<FieldSpec> {
    if q > MAX_Q {
        return Err(Error::FieldTooLarge { q, cap: MAX_Q });
    }
    let (p, e) = factor_prime_power(q).ok_or(Error::NotPrimePower { q })?;
    let modulus = if e == 1 {
        vec![0, 1]
    } else {
        least_irreducible(p, e)
    };

    let qu = q as usize;
    let mut add = vec![0u8; qu * qu];
    let mut mul = vec![0u8; qu * qu];
    let mut neg = vec![0u8; qu];
    let mut inv = vec![0u8; qu];

    for a in 0..qu {
        let pa = decode(a as u64, p, e);
        neg[a] = encode(&poly_neg(&pa, p), p);
        for b in 0..qu {
            let pb = decode(b as u64, p, e);
            add[a * qu + b] = encode(&poly_add(&pa, &pb, p), p);
            mul[a * qu + b] = encode(&poly_mul_mod(&pa, &pb, &modulus, p), p);
        }
    }
    for a in 1..qu {
        let mut found = None;
        for b in 1..qu {
            if mul[a * qu + b] == 1 {
                found = Some(b as u8);
                break;
            }
        }
        inv[a] = found.ok_or_else(|| {
            Error::Inconsistency(format!("no inverse for element {a} in GF({q})"))
        })?;
    }

    Ok(FieldSpec {
        q,
        p,
        e,
        modulus,
        add,
        mul,
        neg,
        inv,
    })
}

fn factor_prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            let mut rem = q;
            let mut e = 0;
            while rem.is_multiple_of(p) {
                rem /= p;
                e += 1;
            }
            return if rem == 1 { Some((p, e)) } else { None };
        }
        p += 1;
    }
    Some((q, 1)) // q itself is prime
}

// --- polynomial arithmetic over GF(p), coefficients low degree first ---

fn decode(code: u64, p: u64, e: u32) -> Vec<u8> {
    let mut c = code;
    let mut out = vec![0u8; e as usize];
    for digit in out.iter_mut() {
        *digit = (c % p) as u8;
        c /= p;
    }
    out
}

fn encode(poly: &[u8], p: u64) -> u8 {
    let mut code = 0u64;
    for &c in poly.iter().rev() {
        code = code * p + c as u64;
    }
    code as u8
}

fn poly_add(a: &[u8], b: &[u8], p: u64) -> Vec<u8> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = *a.get(i).unwrap_or(&0) as u64;
            let y = *b.get(i).unwrap_or(&0) as u64;
            ((x + y) % p) as u8
        })
        .collect()
}

fn poly_neg(a: &[u8], p: u64) -> Vec<u8> {
    a.iter().map(|&c| ((p - c as u64) % p) as u8).collect()
}

fn poly_mul_mod(a: &[u8], b: &[u8], modulus: &[u8], p: u64) -> Vec<u8> {
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
        }
    }
    // reduce modulo the monic modulus of degree d
    let d = modulus.len() - 1;
    for i in (d..prod.len()).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        for (j, &m) in modulus.iter().enumerate().take(d) {
            let idx = i - d + j;
            prod[idx] = (prod[idx] + c * ((p - m as u64) % p)) % p;
        }
    }
    prod.truncate(d.max(1));
    prod.iter().map(|&c| c as u8).collect()
}

/// Evaluate-free irreducibility: no monic factor of degree 1..=deg/2 divides.
fn is_irreducible(poly: &[u8], p: u64) -> bool {
    let deg = poly.len() - 1;
    for fd in 1..=deg / 2 {
        // all monic polynomials of degree fd
        let count = p.pow(fd as u32);
        for code in 0..count {
            let mut f = decode(code, p, fd as u32);
            f.push(1); // monic leading coefficient
            if poly_rem(poly, &f, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn poly_rem(a: &[u8], b: &[u8], p: u64) -> Vec<u8> {
    let db = b.len() - 1;
    let mut rem: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    debug_assert_eq!(b[db], 1, "divisor must be monic");
    for i in (db..rem.len()).rev() {
        let c = rem[i];
        if c == 0 {
            continue;
        }
        rem[i] = 0;
        for (j, &m) in b.iter().enumerate().take(db) {
            let idx = i - db + j;
            rem[idx] = (rem[idx] + c * ((p - m as u64) % p)) % p;
        }
    }
    rem.truncate(db);
    rem.iter().map(|&c| c as u8).collect()
}

/// The lexicographically least monic irreducible of degree e over GF(p),
/// where "least" orders monic polynomials by their integer encoding
/// p^e + c_{e-1} p^{e-1} + ... + c_0.
fn least_irreducible(p: u64, e: u32) -> Vec<u8> {
    let count = p.pow(e);
    for code in 0..count {
        let mut f = decode(code, p, e);
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("an irreducible of every degree exists over GF(p)")
}
