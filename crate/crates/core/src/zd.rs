//! Exact arithmetic over `Z_d` and the d-th roots of unity.
//!
//! Phase factors attached to basis operators are always integer exponents of
//! `ω = exp(2πi/d)`. Whether an integer combination of roots vanishes is
//! decided exactly — by reduction modulo the d-th cyclotomic polynomial —
//! never by a floating-point tolerance. For prime `d` the reduction collapses
//! to the minimal-polynomial identity `ω^{d-1} = -(1 + ω + … + ω^{d-2})`, so
//! a combination with non-negative weights summing to `d` vanishes exactly
//! when every weight equals one.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Largest dimension accepted by [`enumerate_vanishing_sums`]; the search
/// space is the number of weak compositions of `d` into `d` parts, which is
/// already 5.2 million at `d = 13`.
pub const ENUMERATION_LIMIT: usize = 13;

// ---------------------------------------------------------------------------
// Dimension
// ---------------------------------------------------------------------------

/// A Hilbert-space dimension `d ≥ 2` with a cached primality flag.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Dimension {
    d: usize,
    prime: bool,
}

impl Dimension {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::DimensionTooSmall(d));
        }
        Ok(Self {
            d,
            prime: trial_division_is_prime(d),
        })
    }

    pub fn get(self) -> usize {
        self.d
    }

    /// Primality decided by deterministic trial division.
    pub fn is_prime(self) -> bool {
        self.prime
    }

    /// Prime factorization with multiplicity, in ascending order.
    pub fn prime_factors(self) -> Vec<usize> {
        let mut n = self.d;
        let mut out = Vec::new();
        let mut p = 2;
        while p * p <= n {
            while n.is_multiple_of(p) {
                out.push(p);
                n /= p;
            }
            p += 1;
        }
        if n > 1 {
            out.push(n);
        }
        out
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.d)
    }
}

impl Serialize for Dimension {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u64(self.d as u64)
    }
}

impl<'de> Deserialize<'de> for Dimension {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let d = usize::deserialize(deserializer)?;
        Dimension::new(d).map_err(serde::de::Error::custom)
    }
}

fn trial_division_is_prime(d: usize) -> bool {
    if d < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= d {
        if d.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

// ---------------------------------------------------------------------------
// PhaseExp
// ---------------------------------------------------------------------------

/// The exponent `k` of `ω^k` with `ω = exp(2πi/d)`, closed under addition
/// modulo `d`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub struct PhaseExp {
    k: usize,
    d: usize,
}

impl PhaseExp {
    pub fn new(k: i64, d: usize) -> Self {
        assert!(d >= 1, "phase modulus must be positive");
        Self {
            k: k.rem_euclid(d as i64) as usize,
            d,
        }
    }

    pub fn zero(d: usize) -> Self {
        Self::new(0, d)
    }

    pub fn exponent(self) -> usize {
        self.k
    }

    pub fn modulus(self) -> usize {
        self.d
    }

    pub fn is_zero(self) -> bool {
        self.k == 0
    }

    /// `ω^k` as a complex number of unit modulus.
    pub fn as_complex(self) -> C64 {
        C64::from_polar(1.0, TAU * self.k as f64 / self.d as f64)
    }

    /// Scalar multiple `m·k mod d`.
    pub fn scaled(self, m: usize) -> Self {
        Self::new((self.k as i64) * (m as i64 % self.d as i64), self.d)
    }
}

impl Add for PhaseExp {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.d, rhs.d, "phase moduli differ");
        Self::new(self.k as i64 + rhs.k as i64, self.d)
    }
}

impl Sub for PhaseExp {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        assert_eq!(self.d, rhs.d, "phase moduli differ");
        Self::new(self.k as i64 - rhs.k as i64, self.d)
    }
}

impl Neg for PhaseExp {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-(self.k as i64), self.d)
    }
}

impl fmt::Display for PhaseExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ω^{}", self.k)
    }
}

// ---------------------------------------------------------------------------
// Cyclotomic integers
// ---------------------------------------------------------------------------

/// An integer combination `Σ_s a_s ω^s` of d-th roots of unity, stored on the
/// redundant generating set `{1, ω, …, ω^{d-1}}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CycInt {
    d: usize,
    coeffs: Vec<i64>,
}

impl CycInt {
    pub fn zero(d: usize) -> Self {
        Self {
            d,
            coeffs: vec![0; d],
        }
    }

    pub fn root(p: PhaseExp) -> Self {
        let mut v = Self::zero(p.modulus());
        v.coeffs[p.exponent()] = 1;
        v
    }

    pub fn modulus(&self) -> usize {
        self.d
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn add_root(&mut self, p: PhaseExp, weight: i64) {
        assert_eq!(self.d, p.modulus(), "phase moduli differ");
        self.coeffs[p.exponent()] += weight;
    }

    /// Subtract the integer `s` (i.e. `s·ω^0`).
    pub fn sub_scalar(mut self, s: i64) -> Self {
        self.coeffs[0] -= s;
        self
    }

    /// Exact test for `Σ_s a_s ω^s = 0`.
    ///
    /// For prime `d` the coefficients vanish exactly when they are all equal;
    /// for general `d` the polynomial is reduced modulo the d-th cyclotomic
    /// polynomial and the remainder compared with zero.
    pub fn is_zero(&self) -> bool {
        if trial_division_is_prime(self.d) {
            // ω^{d-1} = -(1 + ω + … + ω^{d-2}); subtracting the last
            // coefficient from each leaves the representation on a basis.
            let last = self.coeffs[self.d - 1];
            return self.coeffs.iter().all(|&c| c == last);
        }
        let phi = cyclotomic_polynomial(self.d);
        remainder_is_zero(&self.coeffs, &phi)
    }

    pub fn to_complex(&self) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (s, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                acc += PhaseExp::new(s as i64, self.d).as_complex() * c as f64;
            }
        }
        acc
    }
}

/// Coefficients of the d-th cyclotomic polynomial, ascending in degree.
///
/// Computed by exact integer polynomial division of `x^d - 1` by the
/// cyclotomic polynomials of all proper divisors of `d`.
pub fn cyclotomic_polynomial(d: usize) -> Vec<i64> {
    assert!(d >= 1);
    let mut num = vec![0i64; d + 1];
    num[0] = -1;
    num[d] = 1;
    for e in 1..d {
        if d.is_multiple_of(e) {
            num = poly_divide_exact(&num, &cyclotomic_polynomial(e));
        }
    }
    num
}

/// Exact polynomial division over the integers; panics if the division
/// leaves a remainder (which cannot happen for cyclotomic factors).
fn poly_divide_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = num.len() - 1;
    let dd = den.len() - 1;
    assert!(dn >= dd && den[dd] == 1);
    let mut rem = num.to_vec();
    let mut quot = vec![0i64; dn - dd + 1];
    for k in (0..=dn - dd).rev() {
        let c = rem[k + dd];
        quot[k] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[k + j] -= c * dj;
            }
        }
    }
    assert!(rem.iter().all(|&c| c == 0), "non-exact polynomial division");
    quot
}

/// Remainder test of `coeffs` (ascending) modulo the monic polynomial `phi`.
fn remainder_is_zero(coeffs: &[i64], phi: &[i64]) -> bool {
    let deg = phi.len() - 1;
    let mut rem = coeffs.to_vec();
    for k in (deg..rem.len()).rev() {
        let c = rem[k];
        if c != 0 {
            for (j, &pj) in phi.iter().enumerate() {
                rem[k - deg + j] -= c * pj;
            }
        }
    }
    rem.iter().all(|&c| c == 0)
}

// ---------------------------------------------------------------------------
// Vanishing sums
// ---------------------------------------------------------------------------

/// Non-negative integer weights `c_s` attached to the roots `ω^s`,
/// `s = 0, …, d-1`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CsVector {
    d: Dimension,
    c: Vec<u64>,
}

impl CsVector {
    pub fn new(d: Dimension, c: Vec<u64>) -> Result<Self> {
        if c.len() != d.get() {
            return Err(Error::DimensionMismatch(c.len(), d.get()));
        }
        Ok(Self { d, c })
    }

    pub fn dimension(&self) -> Dimension {
        self.d
    }

    pub fn entries(&self) -> &[u64] {
        &self.c
    }

    pub fn sum(&self) -> u64 {
        self.c.iter().sum()
    }

    pub fn to_cyc_int(&self) -> CycInt {
        let mut v = CycInt::zero(self.d.get());
        for (s, &c) in self.c.iter().enumerate() {
            v.coeffs[s] = c as i64;
        }
        v
    }

    /// Floating-point evaluation of `Σ_s c_s ω^s`, for cross-checks only.
    pub fn float_sum(&self) -> C64 {
        self.to_cyc_int().to_complex()
    }
}

/// Exact test for `Σ_s c_s ω^s = 0`.
pub fn vanishing_sum_check(v: &CsVector) -> bool {
    v.to_cyc_int().is_zero()
}

/// All weight vectors with `Σ c_s = d` and `Σ c_s ω^s = 0`, found by
/// exhaustive enumeration over the weak compositions of `d` and decided by
/// exact arithmetic.
///
/// For prime `d` the result is exactly the all-ones vector; composite `d`
/// admits further solutions (e.g. `2 + 2ω² = 0` at `d = 4`).
pub fn enumerate_vanishing_sums(d: Dimension) -> Result<Vec<CsVector>> {
    let n = d.get();
    if n > ENUMERATION_LIMIT {
        return Err(Error::ResourceLimit {
            what: "vanishing-sum enumeration dimension",
            limit: ENUMERATION_LIMIT,
            requested: n,
        });
    }
    let prime = d.is_prime();
    let phi = if prime {
        Vec::new()
    } else {
        cyclotomic_polynomial(n)
    };
    let mut out = Vec::new();
    let mut c = vec![0u64; n];
    let mut scratch = vec![0i64; n];
    enumerate_rec(d, n as u64, 0, &mut c, &mut scratch, prime, &phi, &mut out);
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn enumerate_rec(
    d: Dimension,
    remaining: u64,
    pos: usize,
    c: &mut Vec<u64>,
    scratch: &mut Vec<i64>,
    prime: bool,
    phi: &[i64],
    out: &mut Vec<CsVector>,
) {
    let n = c.len();
    if pos == n - 1 {
        c[n - 1] = remaining;
        let vanishes = if prime {
            let first = c[0];
            c.iter().all(|&x| x == first)
        } else {
            for (s, &x) in c.iter().enumerate() {
                scratch[s] = x as i64;
            }
            remainder_is_zero(scratch, phi)
        };
        if vanishes {
            out.push(CsVector::new(d, c.clone()).expect("length matches"));
        }
        return;
    }
    for v in 0..=remaining {
        c[pos] = v;
        enumerate_rec(d, remaining - v, pos + 1, c, scratch, prime, phi, out);
    }
}
