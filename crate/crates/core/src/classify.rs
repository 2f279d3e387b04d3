//! Deciding whether a unitary gate maps the operator basis onto itself up to
//! phases, extracting its conjugation cycle structure, and checking that the
//! partition into mutually unbiased eigenbases is preserved.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::dense::{self, CMatrix};
use crate::monomial::MonomialOperator;
use crate::mub::MubCollection;
use crate::pauli::OperatorBasis;
use crate::zd::{Dimension, PhaseExp};
use crate::{Error, Result};

/// Unitarity tolerance for gates supplied as dense matrices.
pub const UNITARITY_TOL: f64 = 1e-9;
/// A basis element is declared the conjugation image when the overlap
/// magnitude exceeds `1 - MATCH_TOL`; orthonormality pushes every other
/// candidate down to the tolerance floor, so the margin is wide.
pub const MATCH_TOL: f64 = 1e-7;
/// Threshold for treating an eigenbasis overlap profile as 0/1-valued in the
/// partition-preservation check.
const PROFILE_TOL: f64 = 1e-6;

// ---------------------------------------------------------------------------
// UnitaryGate
// ---------------------------------------------------------------------------

/// A gate on `D = Π d_i`, unitary within [`UNITARITY_TOL`].
#[derive(Clone, Debug)]
pub struct UnitaryGate {
    dims: Vec<Dimension>,
    matrix: CMatrix,
}

impl UnitaryGate {
    pub fn new(dims: Vec<Dimension>, matrix: CMatrix) -> Result<Self> {
        Self::with_tolerance(dims, matrix, UNITARITY_TOL)
    }

    pub fn with_tolerance(dims: Vec<Dimension>, matrix: CMatrix, tol: f64) -> Result<Self> {
        let total: usize = dims.iter().map(|d| d.get()).product();
        if dims.is_empty() || matrix.nrows() != total || matrix.ncols() != total {
            return Err(Error::DimensionMismatch(matrix.nrows(), total));
        }
        let dev = dense::unitarity_deviation(&matrix);
        if dev > tol {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { dims, matrix })
    }

    pub fn from_monomial(dims: Vec<Dimension>, op: &MonomialOperator) -> Result<Self> {
        Self::new(dims, op.to_dense().entries().clone())
    }

    /// The discrete Fourier matrix `F_{jk} = ω^{jk} / √D` on the total
    /// dimension.
    pub fn fourier(dims: Vec<Dimension>) -> Result<Self> {
        let total: usize = dims.iter().map(|d| d.get()).product();
        let norm = 1.0 / (total as f64).sqrt();
        let matrix = CMatrix::from_shape_fn((total, total), |(j, k)| {
            PhaseExp::new((j * k) as i64, total).as_complex() * norm
        });
        Self::new(dims, matrix)
    }

    /// A seeded Haar-like random unitary.
    pub fn random(dims: Vec<Dimension>, seed: u64) -> Result<Self> {
        let total: usize = dims.iter().map(|d| d.get()).product();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::new(dims, dense::random_unitary(total, &mut rng))
    }

    /// Kronecker product of per-factor gates.
    pub fn tensor(gates: &[UnitaryGate]) -> Result<Self> {
        let mut dims = Vec::new();
        let mut matrix: Option<CMatrix> = None;
        for g in gates {
            dims.extend_from_slice(&g.dims);
            matrix = Some(match matrix {
                None => g.matrix.clone(),
                Some(acc) => dense::kron(&acc, &g.matrix),
            });
        }
        match matrix {
            Some(m) => Self::new(dims, m),
            None => Err(Error::DimensionTooSmall(0)),
        }
    }

    pub fn dims(&self) -> &[Dimension] {
        &self.dims
    }

    pub fn total_dimension(&self) -> usize {
        self.dims.iter().map(|d| d.get()).product()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

// ---------------------------------------------------------------------------
// Conjugation matching
// ---------------------------------------------------------------------------

/// Where one basis element lands under `M ↦ U M U†`.
#[derive(Clone, Debug)]
pub struct ConjugationMatch {
    pub source: usize,
    /// Index of the matched basis element, or `None` when nothing exceeds
    /// the match threshold.
    pub target: Option<usize>,
    /// Overlap magnitude with the best candidate.
    pub fidelity: f64,
    /// Unit-modulus phase of the best candidate's overlap.
    pub phase: C64,
    /// The phase snapped to a D-th root of unity, when within tolerance.
    pub snapped: Option<PhaseExp>,
}

impl ConjugationMatch {
    /// Whether the recorded phase is a D-th root of unity, and which one.
    pub fn dnary_phase(&self) -> (bool, Option<PhaseExp>) {
        (self.snapped.is_some(), self.snapped)
    }
}

impl Serialize for ConjugationMatch {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ConjugationMatch", 5)?;
        s.serialize_field("source", &self.source)?;
        s.serialize_field("target", &self.target)?;
        s.serialize_field("fidelity", &self.fidelity)?;
        s.serialize_field("phase", &[self.phase.re, self.phase.im])?;
        s.serialize_field("snapped", &self.snapped.map(|p| p.exponent()))?;
        s.end()
    }
}

/// Snap a unit-modulus phase to the nearest d-th root of unity if it lies
/// within [`MATCH_TOL`] of one.
pub fn snap_phase(phase: C64, d: usize) -> Option<PhaseExp> {
    let k = (phase.arg().rem_euclid(std::f64::consts::TAU) / std::f64::consts::TAU * d as f64)
        .round() as i64;
    let snapped = PhaseExp::new(k, d);
    ((phase - snapped.as_complex()).norm() < MATCH_TOL).then_some(snapped)
}

/// Compute `U M_i U†` and scan the basis for the unique element whose overlap
/// magnitude exceeds `1 - MATCH_TOL`.
pub fn conjugation_image(
    gate: &UnitaryGate,
    index: usize,
    basis: &OperatorBasis,
) -> Result<ConjugationMatch> {
    check_same_dims(gate, basis)?;
    let m = basis.element(index).op.to_dense();
    let conjugated = gate
        .matrix
        .dot(m.entries())
        .dot(&dense::dagger(&gate.matrix));
    match_against_basis(index, &conjugated, basis)
}

fn match_against_basis(
    source: usize,
    conjugated: &CMatrix,
    basis: &OperatorBasis,
) -> Result<ConjugationMatch> {
    let total_dim = basis.total_dimension();
    let mut best: Option<(usize, C64)> = None;
    let mut matches = 0usize;
    for j in 0..basis.len() {
        let overlap = basis.inner_with_dense(j, conjugated);
        if overlap.norm() > 1.0 - MATCH_TOL {
            matches += 1;
        }
        if best.is_none_or(|(_, b)| overlap.norm() > b.norm()) {
            best = Some((j, overlap));
        }
    }
    if matches > 1 {
        return Err(Error::BasisInconsistency(format!(
            "element {source} conjugates onto {matches} basis elements at once"
        )));
    }
    let (j, overlap) = best.expect("basis is non-empty");
    let matched = overlap.norm() > 1.0 - MATCH_TOL;
    let phase = overlap / overlap.norm();
    Ok(ConjugationMatch {
        source,
        target: matched.then_some(j),
        fidelity: overlap.norm(),
        phase,
        snapped: if matched {
            snap_phase(phase, total_dim)
        } else {
            None
        },
    })
}

fn check_same_dims(gate: &UnitaryGate, basis: &OperatorBasis) -> Result<()> {
    if gate.dims() != basis.dims() {
        return Err(Error::DimensionMismatch(
            gate.total_dimension(),
            basis.total_dimension(),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Cycles and reports
// ---------------------------------------------------------------------------

/// One orbit of basis indices under repeated conjugation, with the phase
/// acquired at each step.
#[derive(Clone, Debug)]
pub struct Cycle {
    pub indices: Vec<usize>,
    pub phases: Vec<C64>,
}

impl Serialize for Cycle {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Cycle", 2)?;
        s.serialize_field("indices", &self.indices)?;
        let phases: Vec<[f64; 2]> = self.phases.iter().map(|p| [p.re, p.im]).collect();
        s.serialize_field("phases", &phases)?;
        s.end()
    }
}

/// Orbit structure of the traceless basis under `M ↦ U M U†`: every
/// traceless index appears in exactly one cycle and the degrees sum to
/// `D² - 1`.
#[derive(Clone, Debug, Serialize)]
pub struct CycleDecomposition {
    pub cycles: Vec<Cycle>,
    pub degrees: Vec<usize>,
}

impl CycleDecomposition {
    pub fn total_degree(&self) -> usize {
        self.degrees.iter().sum()
    }
}

/// Classification verdict for one gate against one basis.
#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub characterizable: bool,
    pub matches: Vec<ConjugationMatch>,
    pub cycles: Option<CycleDecomposition>,
    /// Filled by [`is_mub_preserving`] when a single-prime-factor collection
    /// is available.
    pub mub_preserving: Option<bool>,
}

/// Conjugate every basis element by the gate; the gate is characterizable
/// exactly when each element lands on a basis element (up to phase), in
/// which case the induced index map is a bijection and decomposes into
/// cycles covering all `D² - 1` traceless indices.
pub fn classify(gate: &UnitaryGate, basis: &OperatorBasis) -> Result<ClassificationReport> {
    check_same_dims(gate, basis)?;
    let adjoint = dense::dagger(&gate.matrix);
    let matches = (0..basis.len())
        .into_par_iter()
        .map(|i| {
            let m = basis.element(i).op.to_dense();
            let conjugated = gate.matrix.dot(m.entries()).dot(&adjoint);
            match_against_basis(i, &conjugated, basis)
        })
        .collect::<Result<Vec<_>>>()?;

    let characterizable = matches.iter().all(|m| m.target.is_some());
    let cycles = if characterizable {
        Some(build_cycles(&matches, basis)?)
    } else {
        None
    };
    Ok(ClassificationReport {
        characterizable,
        matches,
        cycles,
        mub_preserving: None,
    })
}

fn build_cycles(matches: &[ConjugationMatch], basis: &OperatorBasis) -> Result<CycleDecomposition> {
    let identity = basis.identity_index();
    let n = matches.len();
    let mut image = vec![0usize; n];
    let mut hit = vec![false; n];
    for m in matches {
        let t = m.target.expect("characterizable");
        if hit[t] {
            return Err(Error::BasisInconsistency(
                "conjugation index map is not a bijection".into(),
            ));
        }
        hit[t] = true;
        image[m.source] = t;
    }
    if image[identity] != identity {
        return Err(Error::BasisInconsistency(
            "identity does not map to itself".into(),
        ));
    }

    let mut visited = vec![false; n];
    visited[identity] = true;
    let mut cycles = Vec::new();
    for start in 0..n {
        if visited[start] {
            continue;
        }
        let mut indices = Vec::new();
        let mut phases = Vec::new();
        let mut cur = start;
        loop {
            visited[cur] = true;
            indices.push(cur);
            phases.push(matches[cur].phase);
            cur = image[cur];
            if cur == start {
                break;
            }
        }
        cycles.push(Cycle { indices, phases });
    }
    let degrees: Vec<usize> = cycles.iter().map(|c| c.indices.len()).collect();
    let decomposition = CycleDecomposition { cycles, degrees };
    if decomposition.total_degree() != n - 1 {
        return Err(Error::BasisInconsistency(format!(
            "cycle degrees sum to {} instead of {}",
            decomposition.total_degree(),
            n - 1
        )));
    }
    Ok(decomposition)
}

/// Histogram degree → number of cycles of that degree; the weighted sum is
/// `D² - 1`.
pub fn cycle_degree_histogram(report: &ClassificationReport) -> Result<BTreeMap<usize, usize>> {
    let cycles = report.cycles.as_ref().ok_or(Error::NotCharacterizable)?;
    let mut hist = BTreeMap::new();
    for &deg in &cycles.degrees {
        *hist.entry(deg).or_insert(0) += 1;
    }
    Ok(hist)
}

// ---------------------------------------------------------------------------
// Partition preservation
// ---------------------------------------------------------------------------

/// True iff the gate maps each family eigenbasis onto exactly one collection
/// eigenbasis (up to per-vector phases and reordering) and the induced map on
/// families is a permutation.
pub fn is_mub_preserving(gate: &UnitaryGate, collection: &MubCollection) -> Result<bool> {
    let d = collection.dimension().get();
    if gate.total_dimension() != d {
        return Err(Error::DimensionMismatch(gate.total_dimension(), d));
    }
    let n = collection.len();
    let mut image_of = vec![None; n];
    for (a, family) in collection.families().iter().enumerate() {
        let images = gate.matrix.dot(family.eigenbasis().columns());
        let mut matched = Vec::new();
        for (b, other) in collection.families().iter().enumerate() {
            let overlaps = dense::dagger(other.eigenbasis().columns()).dot(&images);
            if is_permutation_profile(&overlaps) {
                matched.push(b);
            }
        }
        match matched.as_slice() {
            [single] => image_of[a] = Some(*single),
            _ => return Ok(false),
        }
    }
    let mut seen = vec![false; n];
    for target in image_of.into_iter().flatten() {
        if seen[target] {
            return Ok(false);
        }
        seen[target] = true;
    }
    Ok(true)
}

/// Whether `|overlaps|²` is a permutation matrix: exactly one entry near 1
/// per row and column, everything else near 0.
fn is_permutation_profile(overlaps: &CMatrix) -> bool {
    let (rows, cols) = overlaps.dim();
    let mut row_hits = vec![0usize; rows];
    let mut col_hits = vec![0usize; cols];
    for ((r, c), z) in overlaps.indexed_iter() {
        let p = z.norm_sqr();
        if p > 1.0 - PROFILE_TOL {
            row_hits[r] += 1;
            col_hits[c] += 1;
        } else if p > PROFILE_TOL {
            return false;
        }
    }
    row_hits.iter().all(|&h| h == 1) && col_hits.iter().all(|&h| h == 1)
}
