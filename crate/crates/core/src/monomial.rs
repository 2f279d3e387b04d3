//! Exact algebra of generalized permutation ("monomial") operators.
//!
//! A monomial operator on a d-dimensional space is `M = Σ_n ω^{p(n)} |π(n)⟩⟨n|`
//! for a permutation `π` and integer phase exponents `p(n)`: exactly one
//! unimodular entry per row and per column. Every measurement-basis element
//! lives in this representation, so products, adjoints, traces, inner
//! products, spectra and eigenbases are all computed exactly from `(π, p)`;
//! dense matrices only appear when interfacing with arbitrary gates.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dense::{self, CMatrix, CVector};
use crate::zd::{CycInt, Dimension, PhaseExp};
use crate::{Error, Result};

/// Default tolerance for structural detection on dense input (monomial
/// pattern recognition, unitarity checks). Exact integer paths carry no
/// tolerance.
pub const STRUCTURE_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// MonomialOperator
// ---------------------------------------------------------------------------

/// `M = Σ_n ω^{phase(n)} |perm(n)⟩⟨n|` with `ω = exp(2πi/d)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MonomialOperator {
    d: Dimension,
    perm: Vec<usize>,
    phase: Vec<PhaseExp>,
}

impl MonomialOperator {
    /// Build from a permutation (column `n` maps to row `perm[n]`) and phase
    /// exponents; rejects non-bijective `perm`.
    pub fn new(d: Dimension, perm: Vec<usize>, phase_exponents: Vec<usize>) -> Result<Self> {
        let n = d.get();
        if perm.len() != n || phase_exponents.len() != n {
            return Err(Error::DimensionMismatch(
                perm.len().max(phase_exponents.len()),
                n,
            ));
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidPermutation(n));
            }
            seen[p] = true;
        }
        let phase = phase_exponents
            .into_iter()
            .map(|k| PhaseExp::new(k as i64, n))
            .collect();
        Ok(Self { d, perm, phase })
    }

    pub fn identity(d: Dimension) -> Self {
        let n = d.get();
        Self {
            d,
            perm: (0..n).collect(),
            phase: vec![PhaseExp::zero(n); n],
        }
    }

    pub fn dimension(&self) -> Dimension {
        self.d
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn phases(&self) -> &[PhaseExp] {
        &self.phase
    }

    pub fn phase_exponents(&self) -> Vec<usize> {
        self.phase.iter().map(|p| p.exponent()).collect()
    }

    /// Exact composition `self · rhs`: `perm = π_self ∘ π_rhs` and
    /// `phase(n) = phase_rhs(n) ⊕ phase_self(π_rhs(n))`.
    pub fn multiply(&self, rhs: &Self) -> Result<Self> {
        if self.d != rhs.d {
            return Err(Error::DimensionMismatch(self.d.get(), rhs.d.get()));
        }
        let n = self.d.get();
        let mut perm = vec![0; n];
        let mut phase = vec![PhaseExp::zero(n); n];
        for col in 0..n {
            let mid = rhs.perm[col];
            perm[col] = self.perm[mid];
            phase[col] = rhs.phase[col] + self.phase[mid];
        }
        Ok(Self {
            d: self.d,
            perm,
            phase,
        })
    }

    /// `self^k` by repeated exact multiplication.
    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::identity(self.d);
        for _ in 0..k {
            acc = acc.multiply(self).expect("same dimension");
        }
        acc
    }

    /// Adjoint: `perm = π⁻¹`, `phase(n) = ⊖phase(π⁻¹(n))`; satisfies
    /// `self · adjoint(self) = identity` exactly.
    pub fn adjoint(&self) -> Self {
        let n = self.d.get();
        let mut perm = vec![0; n];
        let mut phase = vec![PhaseExp::zero(n); n];
        for col in 0..n {
            let row = self.perm[col];
            perm[row] = col;
            phase[row] = -self.phase[col];
        }
        Self {
            d: self.d,
            perm,
            phase,
        }
    }

    /// Exact conjugation `u · self · u†` inside the monomial group.
    pub fn conjugated_by(&self, u: &Self) -> Result<Self> {
        u.multiply(self)?.multiply(&u.adjoint())
    }

    /// Kronecker product, with `self` on the most significant index. Phases
    /// combine as `ω_{d1}^{k1} ω_{d2}^{k2} = ω_{D}^{k1 d2 + k2 d1}` with
    /// `D = d1 d2`, so the result is again monomial with d-nary phases.
    pub fn tensor(&self, rhs: &Self) -> Self {
        let (d1, d2) = (self.d.get(), rhs.d.get());
        let dd = d1 * d2;
        let d = Dimension::new(dd).expect("product of dimensions is >= 2");
        let mut perm = vec![0; dd];
        let mut phase = vec![PhaseExp::zero(dd); dd];
        for n1 in 0..d1 {
            for n2 in 0..d2 {
                let col = n1 * d2 + n2;
                perm[col] = self.perm[n1] * d2 + rhs.perm[n2];
                let k = self.phase[n1].exponent() * d2 + rhs.phase[n2].exponent() * d1;
                phase[col] = PhaseExp::new(k as i64, dd);
            }
        }
        Self { d, perm, phase }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(n, &p)| p == n) && self.phase.iter().all(|p| p.is_zero())
    }

    /// `Some(t)` iff `self = ω^t · identity` exactly.
    pub fn scalar_identity(&self) -> Option<PhaseExp> {
        self.proportional_to(&Self::identity(self.d))
    }

    /// `Some(t)` iff `self = ω^t · other` exactly (same permutation, constant
    /// phase offset).
    pub fn proportional_to(&self, other: &Self) -> Option<PhaseExp> {
        if self.d != other.d || self.perm != other.perm {
            return None;
        }
        let t = self.phase[0] - other.phase[0];
        for n in 1..self.d.get() {
            if self.phase[n] - other.phase[n] != t {
                return None;
            }
        }
        Some(t)
    }

    /// Exact trace `Σ_{n: π(n)=n} ω^{phase(n)}` as a cyclotomic integer.
    pub fn trace_exact(&self) -> CycInt {
        let n = self.d.get();
        let mut acc = CycInt::zero(n);
        for col in 0..n {
            if self.perm[col] == col {
                acc.add_root(self.phase[col], 1);
            }
        }
        acc
    }

    /// Normalized Hilbert-Schmidt inner product `(1/d) Tr[self · rhs†]` as an
    /// exact cyclotomic value. Only columns where the two permutations agree
    /// contribute, each with the phase-exponent difference.
    pub fn hs_inner(&self, rhs: &Self) -> Result<HsInner> {
        if self.d != rhs.d {
            return Err(Error::DimensionMismatch(self.d.get(), rhs.d.get()));
        }
        let n = self.d.get();
        let mut numerator = CycInt::zero(n);
        for col in 0..n {
            if self.perm[col] == rhs.perm[col] {
                numerator.add_root(self.phase[col] - rhs.phase[col], 1);
            }
        }
        Ok(HsInner { d: n, numerator })
    }

    /// Cycles of the permutation, each listed from its smallest element,
    /// ordered by that element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.d.get();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut cur = self.perm[start];
            while cur != start {
                seen[cur] = true;
                cycle.push(cur);
                cur = self.perm[cur];
            }
            out.push(cycle);
        }
        out
    }

    /// Exact spectrum from the cycle structure: a cycle of length `L` with
    /// accumulated phase exponent `P` contributes the `L` roots
    /// `exp(2πi (P + d·j) / (d·L))`, `j = 0, …, L-1`.
    pub fn spectrum(&self) -> SpectrumReport {
        let d = self.d.get();
        let mut eigenvalues = Vec::with_capacity(d);
        for cycle in self.cycles() {
            let len = cycle.len();
            let total: usize = cycle.iter().map(|&n| self.phase[n].exponent()).sum();
            let p = total % d;
            for j in 0..len {
                eigenvalues.push(UnitRoot::new((p + d * j) as i128, (d * len) as u64));
            }
        }
        eigenvalues.sort();
        let mut multiplicities: Vec<(UnitRoot, usize)> = Vec::new();
        for &ev in &eigenvalues {
            match multiplicities.last_mut() {
                Some((root, count)) if *root == ev => *count += 1,
                _ => multiplicities.push((ev, 1)),
            }
        }
        // Non-degenerate with equal angular gaps of 1/d means the spectrum is
        // ρ·{ω^k} for the smallest angle ρ; strictly d-nary when ρ = 1.
        let gauge = if multiplicities.len() == d {
            let step_ok = (0..d).all(|j| {
                let a = eigenvalues[j];
                let b = eigenvalues[(j + 1) % d];
                b.minus(a) == UnitRoot::new(1, d as u64)
            });
            step_ok.then_some(eigenvalues[0])
        } else {
            None
        };
        let is_dnary = gauge == Some(UnitRoot::one());
        SpectrumReport {
            d,
            eigenvalues,
            multiplicities,
            is_dnary,
            gauge,
        }
    }

    /// Analytic eigenbasis, ordered so that index `k` carries eigenvalue
    /// `gauge · ω^k`. Requires a non-degenerate d-nary spectrum (up to the
    /// global-phase gauge); eigenvectors are supported on single permutation
    /// cycles and gauged so their first nonzero component is real positive.
    pub fn eigenbasis(&self) -> Result<OrderedEigenbasis> {
        let spec = self.spectrum();
        let gauge = spec.gauge.ok_or_else(|| {
            Error::NotDnarySpectrum(format!(
                "{} distinct eigenvalues over dimension {}",
                spec.multiplicities.len(),
                spec.d
            ))
        })?;
        let d = self.d.get();
        let mut columns = CMatrix::zeros((d, d));
        for cycle in self.cycles() {
            let len = cycle.len();
            let total: usize = cycle.iter().map(|&n| self.phase[n].exponent()).sum();
            let p = total % d;
            // Phase accumulated along the cycle up to position t.
            let mut prefix = vec![0usize; len];
            for t in 1..len {
                prefix[t] = prefix[t - 1] + self.phase[cycle[t - 1]].exponent();
            }
            let norm = 1.0 / (len as f64).sqrt();
            for j in 0..len {
                let root = UnitRoot::new((p + d * j) as i128, (d * len) as u64);
                let k = root
                    .minus(gauge)
                    .phase_exp(d)
                    .expect("gauged spectrum steps in d-th roots")
                    .exponent();
                let f = root.angle();
                for (t, &pos) in cycle.iter().enumerate() {
                    let angle = TAU * (prefix[t] as f64 / d as f64 - t as f64 * f);
                    columns[[pos, k]] = C64::from_polar(norm, angle);
                }
            }
        }
        Ok(OrderedEigenbasis { d, gauge, columns })
    }

    pub fn to_dense(&self) -> DenseOperator {
        let n = self.d.get();
        let mut entries = CMatrix::zeros((n, n));
        for col in 0..n {
            entries[[self.perm[col], col]] = self.phase[col].as_complex();
        }
        DenseOperator { entries }
    }

    /// Recover the exact `(perm, phase)` representation from a dense matrix.
    ///
    /// Rejects matrices with more or less than one significant entry per row
    /// or column (`NotMonomial`) and matrices whose nonzero entries are not
    /// within `tol` of a d-th root of unity (`NotDnaryPhase`).
    pub fn from_dense(op: &DenseOperator, tol: f64) -> Result<Self> {
        let n = op.dim();
        let d = Dimension::new(n)?;
        let m = op.entries();
        let mut perm = vec![usize::MAX; n];
        let mut phase = vec![0usize; n];
        let mut row_used = vec![false; n];
        for col in 0..n {
            let mut hits = Vec::new();
            for row in 0..n {
                if m[[row, col]].norm() > tol {
                    hits.push(row);
                }
            }
            if hits.len() != 1 {
                return Err(Error::NotMonomial(format!(
                    "column {col} has {} entries above tolerance",
                    hits.len()
                )));
            }
            let row = hits[0];
            if row_used[row] {
                return Err(Error::NotMonomial(format!(
                    "row {row} holds entries from two columns"
                )));
            }
            row_used[row] = true;
            let entry = m[[row, col]];
            if (entry.norm() - 1.0).abs() > tol {
                return Err(Error::NotMonomial(format!(
                    "entry ({row}, {col}) has modulus {:.6}",
                    entry.norm()
                )));
            }
            let k = (entry.arg().rem_euclid(TAU) / TAU * n as f64).round() as i64;
            let snapped = PhaseExp::new(k, n);
            if (entry - snapped.as_complex()).norm() > tol {
                return Err(Error::NotDnaryPhase(n));
            }
            perm[col] = row;
            phase[col] = snapped.exponent();
        }
        MonomialOperator::new(d, perm, phase)
    }
}

impl Serialize for MonomialOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Raw<'a> {
            d: usize,
            perm: &'a [usize],
            phase: Vec<usize>,
        }
        Raw {
            d: self.d.get(),
            perm: &self.perm,
            phase: self.phase_exponents(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MonomialOperator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            d: usize,
            perm: Vec<usize>,
            phase: Vec<usize>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let d = Dimension::new(raw.d).map_err(serde::de::Error::custom)?;
        MonomialOperator::new(d, raw.perm, raw.phase).map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// HsInner
// ---------------------------------------------------------------------------

/// The normalized inner product `(1/d) Tr[A B†]`, held exactly as a
/// cyclotomic-integer numerator over the fixed denominator `d`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HsInner {
    d: usize,
    numerator: CycInt,
}

impl HsInner {
    pub fn numerator(&self) -> &CycInt {
        &self.numerator
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.numerator.clone().sub_scalar(self.d as i64).is_zero()
    }

    /// Exact Kronecker delta for orthonormal-basis elements.
    pub fn is_delta(&self, equal: bool) -> bool {
        if equal {
            self.is_one()
        } else {
            self.is_zero()
        }
    }

    pub fn to_complex(&self) -> C64 {
        self.numerator.to_complex() / self.d as f64
    }
}

// ---------------------------------------------------------------------------
// UnitRoot
// ---------------------------------------------------------------------------

/// A root of unity `exp(2πi·num/den)` as an exact reduced fraction of a full
/// turn, with `0 ≤ num < den`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub struct UnitRoot {
    num: u64,
    den: u64,
}

impl UnitRoot {
    pub fn new(num: i128, den: u64) -> Self {
        assert!(den > 0);
        let num = num.rem_euclid(den as i128) as u64;
        let g = gcd(num, den);
        Self {
            num: num / g,
            den: den / g,
        }
    }

    pub fn one() -> Self {
        Self { num: 0, den: 1 }
    }

    pub fn numerator(self) -> u64 {
        self.num
    }

    pub fn denominator(self) -> u64 {
        self.den
    }

    /// Fraction of a full turn, in `[0, 1)`.
    pub fn angle(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn as_complex(self) -> C64 {
        C64::from_polar(1.0, TAU * self.angle())
    }

    /// Angle difference modulo one turn.
    pub fn minus(self, rhs: Self) -> Self {
        let den = self.den * rhs.den;
        let num = self.num as i128 * rhs.den as i128 - rhs.num as i128 * self.den as i128;
        Self::new(num, den)
    }

    /// `Some(k)` iff this root equals `ω_d^k`.
    pub fn phase_exp(self, d: usize) -> Option<PhaseExp> {
        if !(d as u64).is_multiple_of(self.den) {
            return None;
        }
        let k = self.num * (d as u64 / self.den);
        Some(PhaseExp::new(k as i64, d))
    }
}

impl Ord for UnitRoot {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let lhs = self.num as u128 * other.den as u128;
        let rhs = other.num as u128 * self.den as u128;
        lhs.cmp(&rhs)
    }
}

impl PartialOrd for UnitRoot {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

// ---------------------------------------------------------------------------
// SpectrumReport
// ---------------------------------------------------------------------------

/// Exact eigenvalue multiset of a monomial operator.
#[derive(Clone, Debug)]
pub struct SpectrumReport {
    d: usize,
    eigenvalues: Vec<UnitRoot>,
    multiplicities: Vec<(UnitRoot, usize)>,
    is_dnary: bool,
    gauge: Option<UnitRoot>,
}

impl SpectrumReport {
    pub fn dim(&self) -> usize {
        self.d
    }

    /// All eigenvalues (with repetition), sorted by angle.
    pub fn eigenvalues(&self) -> &[UnitRoot] {
        &self.eigenvalues
    }

    pub fn multiplicities(&self) -> &[(UnitRoot, usize)] {
        &self.multiplicities
    }

    /// True iff the spectrum is exactly `{ω^0, …, ω^{d-1}}`, each once.
    pub fn is_dnary(&self) -> bool {
        self.is_dnary
    }

    /// `Some(ρ)` iff the spectrum is `ρ·{ω^0, …, ω^{d-1}}`, each once; the
    /// physically irrelevant global phase `ρ` equals one in the strictly
    /// d-nary case (it is a nontrivial root only for even-dimension operators
    /// such as the qubit `XZ`, whose spectrum is `{i, -i}`).
    pub fn gauge(&self) -> Option<UnitRoot> {
        self.gauge
    }

    /// d-nary up to the global-phase freedom on each operator's spectrum.
    pub fn is_dnary_up_to_phase(&self) -> bool {
        self.gauge.is_some()
    }
}

// ---------------------------------------------------------------------------
// OrderedEigenbasis
// ---------------------------------------------------------------------------

/// Orthonormal eigenvectors of a monomial operator with index `k` carrying
/// eigenvalue `gauge · ω^k`.
#[derive(Clone, Debug)]
pub struct OrderedEigenbasis {
    d: usize,
    gauge: UnitRoot,
    columns: CMatrix,
}

impl OrderedEigenbasis {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn gauge(&self) -> UnitRoot {
        self.gauge
    }

    /// Eigenvectors as matrix columns, column `k` first.
    pub fn columns(&self) -> &CMatrix {
        &self.columns
    }

    pub fn vector(&self, k: usize) -> CVector {
        self.columns.column(k).to_owned()
    }

    pub fn vectors(&self) -> Vec<CVector> {
        (0..self.d).map(|k| self.vector(k)).collect()
    }

    /// Largest entry of `|V†V - 1|` over the eigenvector Gram matrix.
    pub fn gram_deviation(&self) -> f64 {
        dense::max_abs_diff(&dense::column_gram(&self.columns), &dense::identity(self.d))
    }

    /// Largest `‖M v_k - gauge·ω^k v_k‖₂` over all eigenvectors.
    pub fn residual(&self, m: &MonomialOperator) -> f64 {
        let dense_m = m.to_dense();
        let mut worst: f64 = 0.0;
        for k in 0..self.d {
            let v = self.vector(k);
            let mv = dense_m.entries().dot(&v);
            let lambda = self.gauge.as_complex() * PhaseExp::new(k as i64, self.d).as_complex();
            let diff: f64 = mv
                .iter()
                .zip(v.iter())
                .map(|(a, b)| (a - lambda * b).norm_sqr())
                .sum();
            worst = worst.max(diff.sqrt());
        }
        worst
    }
}

// ---------------------------------------------------------------------------
// DenseOperator
// ---------------------------------------------------------------------------

/// A plain square complex matrix; the container for gates and other
/// non-monomial operators.
#[derive(Clone, PartialEq, Debug)]
pub struct DenseOperator {
    entries: CMatrix,
}

impl DenseOperator {
    pub fn new(entries: CMatrix) -> Result<Self> {
        let (r, c) = entries.dim();
        if r != c {
            return Err(Error::DimensionMismatch(r, c));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NotMonomial("non-finite entries".into()));
        }
        Ok(Self { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn unitarity_deviation(&self) -> f64 {
        dense::unitarity_deviation(&self.entries)
    }
}

impl Serialize for DenseOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        dense::to_re_im_rows(&self.entries).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DenseOperator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(deserializer)?;
        let m = dense::from_re_im_rows(&rows)
            .ok_or_else(|| serde::de::Error::custom("ragged or empty matrix"))?;
        DenseOperator::new(m).map_err(serde::de::Error::custom)
    }
}
