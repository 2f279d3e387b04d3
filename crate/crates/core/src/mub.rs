//! Partition of the traceless basis into `d + 1` Abelian families whose
//! common eigenbases are mutually unbiased, and the change-of-basis
//! permutation matrices carrying exactly one entry per cyclic diagonal.
//!
//! Matrix indexing is 0-based throughout: row `i` of a permutation matrix
//! holds its single 1 at column `row_targets[i]`, and the s-th cyclic
//! diagonal collects the entries at `(i, i + s mod d)`.

use num_complex::Complex64 as C64;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::dense::{self, CMatrix};
use crate::monomial::{DenseOperator, MonomialOperator, OrderedEigenbasis};
use crate::pauli::{pauli_label_of, OperatorBasis, PauliLabel};
use crate::zd::{vanishing_sum_check, CsVector, Dimension, PhaseExp};
use crate::{Error, Result};

/// Tolerance on cross-family overlap-squares against `1/d`.
pub const CROSS_TOL: f64 = 1e-10;
/// Tolerance on intra-family Gram matrices against identity.
pub const GRAM_TOL: f64 = 1e-12;
/// Largest dimension accepted by the exhaustive census
/// [`count_knight_unitaries`].
pub const CENSUS_LIMIT: usize = 7;

// ---------------------------------------------------------------------------
// Abelian families
// ---------------------------------------------------------------------------

/// The powers `g, g², …, g^{d-1}` of one generator, together with their
/// common phase-ordered eigenbasis.
#[derive(Clone, Debug)]
pub struct AbelianFamily {
    generator_label: PauliLabel,
    members: Vec<MonomialOperator>,
    eigenbasis: OrderedEigenbasis,
}

impl AbelianFamily {
    /// Build a family from a labelled generator with (gauge) d-nary spectrum.
    pub fn from_generator(label: PauliLabel, generator: &MonomialOperator) -> Result<Self> {
        let members = family_powers(generator)?;
        let eigenbasis = generator.eigenbasis()?;
        Ok(Self {
            generator_label: label,
            members,
            eigenbasis,
        })
    }

    pub fn generator_label(&self) -> &PauliLabel {
        &self.generator_label
    }

    pub fn generator(&self) -> &MonomialOperator {
        &self.members[0]
    }

    /// All `d - 1` non-identity members, the generator first.
    pub fn members(&self) -> &[MonomialOperator] {
        &self.members
    }

    pub fn eigenbasis(&self) -> &OrderedEigenbasis {
        &self.eigenbasis
    }

    pub fn dimension(&self) -> Dimension {
        self.members[0].dimension()
    }
}

/// The powers `{g^b}` for `b = 1, …, d-1`, verified pairwise orthonormal and
/// commuting, with `g^d` a scalar multiple of the identity (exactly the
/// spectral gauge to the d-th power).
pub fn family_powers(g: &MonomialOperator) -> Result<Vec<MonomialOperator>> {
    let spectrum = g.spectrum();
    let gauge = spectrum.gauge().ok_or_else(|| {
        Error::NotDnarySpectrum("family generators need a non-degenerate d-nary spectrum".into())
    })?;
    let d = g.dimension().get();
    let members: Vec<MonomialOperator> = (1..d).map(|b| g.pow(b)).collect();

    let closure = g.pow(d);
    let scalar = closure
        .scalar_identity()
        .ok_or_else(|| Error::BasisInconsistency("generator^d is not scalar".into()))?;
    let expected = crate::monomial::UnitRoot::new(
        (gauge.numerator() as i128) * d as i128,
        gauge.denominator(),
    );
    if expected.phase_exp(d) != Some(scalar) {
        return Err(Error::BasisInconsistency(
            "generator^d scalar disagrees with the spectral gauge".into(),
        ));
    }

    for (i, a) in members.iter().enumerate() {
        for (j, b) in members.iter().enumerate() {
            if !a.hs_inner(b)?.is_delta(i == j) {
                return Err(Error::BasisInconsistency(format!(
                    "powers {} and {} of a family generator are not orthonormal",
                    i + 1,
                    j + 1
                )));
            }
            if i < j && a.multiply(b)? != b.multiply(a)? {
                return Err(Error::BasisInconsistency(format!(
                    "powers {} and {} of a family generator do not commute",
                    i + 1,
                    j + 1
                )));
            }
        }
        if !a.trace_exact().is_zero() {
            return Err(Error::BasisInconsistency(format!(
                "power {} of a family generator is not traceless",
                i + 1
            )));
        }
    }
    Ok(members)
}

// ---------------------------------------------------------------------------
// MubCollection
// ---------------------------------------------------------------------------

/// `d + 1` Abelian families covering the `d² - 1` traceless basis elements
/// exactly once.
#[derive(Clone, Debug)]
pub struct MubCollection {
    d: Dimension,
    families: Vec<AbelianFamily>,
}

impl MubCollection {
    pub fn dimension(&self) -> Dimension {
        self.d
    }

    pub fn families(&self) -> &[AbelianFamily] {
        &self.families
    }

    pub fn len(&self) -> usize {
        self.families.len()
    }

    pub fn is_empty(&self) -> bool {
        self.families.is_empty()
    }
}

impl Serialize for MubCollection {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct RawFamily {
            generator: PauliLabel,
            members: Vec<PauliLabel>,
            /// Eigenbasis as a matrix of [re, im] pairs; column k is the
            /// eigenvector with eigenvalue gauge·ω^k.
            eigenbasis: Vec<Vec<[f64; 2]>>,
        }
        let families: Vec<RawFamily> = self
            .families
            .iter()
            .map(|f| RawFamily {
                generator: f.generator_label.clone(),
                members: f
                    .members
                    .iter()
                    .map(|m| {
                        let (a, b, _) = pauli_label_of(m).expect("members are Pauli powers");
                        PauliLabel::single(a, b)
                    })
                    .collect(),
                eigenbasis: dense::to_re_im_rows(f.eigenbasis.columns()),
            })
            .collect();
        let mut s = serializer.serialize_struct("MubCollection", 2)?;
        s.serialize_field("d", &self.d)?;
        s.serialize_field("families", &families)?;
        s.end()
    }
}

/// Partition a single prime-factor basis into the `d + 1` families generated
/// by `Z` and `X Z^m`, `m = 0, …, d-1`, and verify the disjoint cover.
pub fn partition_basis(basis: &OperatorBasis) -> Result<MubCollection> {
    if basis.dims().len() != 1 {
        return Err(Error::BasisInconsistency(
            "the family partition is defined per prime factor; partition each tensor factor".into(),
        ));
    }
    let d = basis.dims()[0];
    if !d.is_prime() {
        return Err(Error::NonPrime(
            d.get(),
            "family partition needs a prime dimension",
        ));
    }
    let n = d.get();

    let mut generator_labels = vec![PauliLabel::single(0, 1)];
    for m in 0..n {
        generator_labels.push(PauliLabel::single(1, m));
    }

    let mut families = Vec::with_capacity(n + 1);
    for label in generator_labels {
        let idx = basis
            .index_of(&label)
            .ok_or_else(|| Error::BasisInconsistency(format!("missing element {label}")))?;
        families.push(AbelianFamily::from_generator(
            label,
            &basis.element(idx).op,
        )?);
    }

    // Disjoint-cover guard: every traceless label exactly once.
    let mut seen = vec![0usize; n * n];
    for family in &families {
        for member in &family.members {
            let (a, b, _) = pauli_label_of(member).ok_or_else(|| {
                Error::BasisInconsistency("family member is not a Pauli power".into())
            })?;
            seen[a * n + b] += 1;
        }
    }
    let cover_ok = seen[0] == 0 && seen[1..].iter().all(|&c| c == 1);
    if !cover_ok {
        return Err(Error::BasisInconsistency(
            "families do not cover the traceless basis exactly once".into(),
        ));
    }
    Ok(MubCollection { d, families })
}

// ---------------------------------------------------------------------------
// MUB verification
// ---------------------------------------------------------------------------

/// Deviation report for a family collection: worst cross-family overlap
/// against `1/d` and worst intra-family Gram deviation from identity.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MubReport {
    pub max_cross_dev: f64,
    pub max_gram_dev: f64,
    pub pass: bool,
}

/// Check `|⟨ψ_n^a | ψ_m^b⟩|² = 1/d` across families and orthonormality
/// inside each family.
pub fn verify_mub(collection: &MubCollection) -> MubReport {
    let d = collection.d.get() as f64;
    let mut max_gram_dev: f64 = 0.0;
    let mut max_cross_dev: f64 = 0.0;
    for family in &collection.families {
        max_gram_dev = max_gram_dev.max(family.eigenbasis.gram_deviation());
    }
    let n = collection.families.len();
    for a in 0..n {
        for b in a + 1..n {
            let va = collection.families[a].eigenbasis.columns();
            let vb = collection.families[b].eigenbasis.columns();
            let overlaps = dense::dagger(va).dot(vb);
            for z in overlaps.iter() {
                max_cross_dev = max_cross_dev.max((z.norm_sqr() - 1.0 / d).abs());
            }
        }
    }
    MubReport {
        max_cross_dev,
        max_gram_dev,
        pass: max_cross_dev < CROSS_TOL && max_gram_dev < GRAM_TOL,
    }
}

/// Rank-1 projector onto the n-th eigenvector of a family, computed both as
/// an outer product and as the phase-weighted power sum
/// `(1/d) Σ_u (gauge·ω^n)^{-u} g^u`; the two must agree to 1e-12.
pub fn projector_from_family(family: &AbelianFamily, n: usize) -> Result<DenseOperator> {
    let d = family.dimension().get();
    if n >= d {
        return Err(Error::OutOfRange {
            what: "eigenvector index",
            value: n as i64,
            min: 0,
            max: d as i64 - 1,
        });
    }
    let v = family.eigenbasis.vector(n);
    let outer = dense::outer(&v, &v);

    let gauge = family.eigenbasis.gauge().as_complex();
    let mut power_sum = CMatrix::zeros((d, d));
    let mut power = MonomialOperator::identity(family.dimension());
    for u in 0..d {
        let weight = (gauge * PhaseExp::new(n as i64, d).as_complex())
            .powu(u as u32)
            .conj()
            / d as f64;
        power_sum = power_sum + power.to_dense().entries() * weight;
        power = power.multiply(family.generator())?;
    }

    let dev = dense::max_abs_diff(&outer, &power_sum);
    if dev > 1e-12 {
        return Err(Error::BasisInconsistency(format!(
            "projector forms disagree by {dev:.3e}"
        )));
    }
    DenseOperator::new(outer)
}

// ---------------------------------------------------------------------------
// Change-of-basis permutation matrices
// ---------------------------------------------------------------------------

/// Permutation matrix mapping one family eigenbasis onto another; row `i`
/// holds its 1 at column `(i·b) mod d`, the step pattern of a chess knight
/// wrapped cyclically.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BasisChangeMatrix {
    d: Dimension,
    b: usize,
    row_targets: Vec<usize>,
}

impl BasisChangeMatrix {
    /// Wrap explicit row targets (used by verification paths and tests);
    /// validates that the targets form a permutation but not the diagonal
    /// property, which is what [`verify_diagonal_property`] decides.
    pub fn from_row_targets(d: Dimension, b: usize, row_targets: Vec<usize>) -> Result<Self> {
        let n = d.get();
        if row_targets.len() != n {
            return Err(Error::DimensionMismatch(row_targets.len(), n));
        }
        let mut seen = vec![false; n];
        for &t in &row_targets {
            if t >= n || seen[t] {
                return Err(Error::InvalidPermutation(n));
            }
            seen[t] = true;
        }
        Ok(Self { d, b, row_targets })
    }

    pub fn dimension(&self) -> Dimension {
        self.d
    }

    /// The construction step width.
    pub fn step(&self) -> usize {
        self.b
    }

    /// Column of the single 1 in each row.
    pub fn row_targets(&self) -> &[usize] {
        &self.row_targets
    }

    pub fn to_dense(&self) -> DenseOperator {
        let n = self.d.get();
        let mut m = CMatrix::zeros((n, n));
        for (i, &t) in self.row_targets.iter().enumerate() {
            m[[i, t]] = C64::new(1.0, 0.0);
        }
        DenseOperator::new(m).expect("square by construction")
    }
}

/// A collision that prevents the step-`b` construction from being a valid
/// change of basis (it always appears for some `b` when `d` is composite).
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct KnightViolation {
    pub d: usize,
    pub b: usize,
    pub kind: ViolationKind,
    /// The colliding column or diagonal index.
    pub index: usize,
    /// Rows whose single 1 lands on that column/diagonal.
    pub rows: Vec<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    ColumnCollision,
    DiagonalCollision,
}

/// Outcome of the step-`b` construction: a valid permutation matrix with one
/// 1 per cyclic diagonal, or a first-class violation report.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KnightResult {
    Matrix(BasisChangeMatrix),
    Violation(KnightViolation),
}

impl KnightResult {
    pub fn matrix(&self) -> Option<&BasisChangeMatrix> {
        match self {
            Self::Matrix(m) => Some(m),
            Self::Violation(_) => None,
        }
    }

    pub fn violation(&self) -> Option<&KnightViolation> {
        match self {
            Self::Matrix(_) => None,
            Self::Violation(v) => Some(v),
        }
    }
}

/// Build the step-`b` change-of-basis candidate: row `i` targets column
/// `(i·b) mod d`, for `b ∈ [2, d-1]`.
///
/// For prime `d` this is always a permutation matrix with exactly one 1 per
/// cyclic diagonal and a 1 in the top-left corner. For composite `d`, a
/// column collision (when `gcd(b, d) > 1`) or diagonal collision (when
/// `gcd(b-1, d) > 1`) is reported instead.
pub fn knight_unitary(d: Dimension, b: usize) -> Result<KnightResult> {
    let n = d.get();
    if b < 2 || b >= n {
        return Err(Error::OutOfRange {
            what: "step width b",
            value: b as i64,
            min: 2,
            max: n as i64 - 1,
        });
    }
    let row_targets: Vec<usize> = (0..n).map(|i| (i * b) % n).collect();

    let mut column_rows: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut diagonal_rows: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, &t) in row_targets.iter().enumerate() {
        column_rows[t].push(i);
        diagonal_rows[(t + n - i) % n].push(i);
    }
    if let Some(col) = column_rows.iter().position(|rows| rows.len() > 1) {
        return Ok(KnightResult::Violation(KnightViolation {
            d: n,
            b,
            kind: ViolationKind::ColumnCollision,
            index: col,
            rows: column_rows[col].clone(),
        }));
    }
    if let Some(diag) = diagonal_rows.iter().position(|rows| rows.len() > 1) {
        return Ok(KnightResult::Violation(KnightViolation {
            d: n,
            b,
            kind: ViolationKind::DiagonalCollision,
            index: diag,
            rows: diagonal_rows[diag].clone(),
        }));
    }
    Ok(KnightResult::Matrix(BasisChangeMatrix {
        d,
        b,
        row_targets,
    }))
}

// ---------------------------------------------------------------------------
// Diagonal property
// ---------------------------------------------------------------------------

/// Per-diagonal occupancy of a permutation matrix: `c_s` counts the entries
/// on the s-th cyclic diagonal.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagonalReport {
    pub c: CsVector,
    /// True iff every cyclic diagonal holds exactly one entry.
    pub pass: bool,
    /// Exact vanishing test of `Σ_s c_s ω^s`; for prime `d` this is
    /// equivalent to `pass`.
    pub vanishing: bool,
}

/// Count `c_s` over the cyclic diagonals of `m` and check `c_s ≡ 1`.
pub fn verify_diagonal_property(m: &BasisChangeMatrix) -> DiagonalReport {
    diagonal_report(m.dimension(), m.row_targets())
}

pub(crate) fn diagonal_report(d: Dimension, row_targets: &[usize]) -> DiagonalReport {
    let n = d.get();
    let mut counts = vec![0u64; n];
    for (i, &t) in row_targets.iter().enumerate() {
        counts[(t + n - i) % n] += 1;
    }
    let pass = counts.iter().all(|&c| c == 1);
    let c = CsVector::new(d, counts).expect("length d by construction");
    let vanishing = vanishing_sum_check(&c);
    DiagonalReport { c, pass, vanishing }
}

// ---------------------------------------------------------------------------
// Shifts
// ---------------------------------------------------------------------------

/// Cyclic right-shift by `s`: column `k` maps to row `k ⊕ s`.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ShiftOperator {
    d: Dimension,
    s: usize,
}

impl ShiftOperator {
    pub fn new(d: Dimension, s: usize) -> Self {
        Self { d, s: s % d.get() }
    }

    pub fn dimension(&self) -> Dimension {
        self.d
    }

    pub fn shift(&self) -> usize {
        self.s
    }

    pub fn is_identity(&self) -> bool {
        self.s == 0
    }
}

/// Row targets of the product `S(s) · U`: a cyclic row shift of `U`, which
/// moves the s-th diagonal of `U` onto the main diagonal.
pub fn shift_compose(s: &ShiftOperator, m: &BasisChangeMatrix) -> Result<Vec<usize>> {
    if s.dimension() != m.dimension() {
        return Err(Error::DimensionMismatch(
            s.dimension().get(),
            m.dimension().get(),
        ));
    }
    let n = m.dimension().get();
    Ok((0..n).map(|i| m.row_targets()[(i + n - s.s) % n]).collect())
}

// ---------------------------------------------------------------------------
// Exhaustive census
// ---------------------------------------------------------------------------

/// Result of enumerating every `d × d` permutation matrix with a 1 in the
/// top-left corner and exactly one 1 per cyclic diagonal.
#[derive(Clone, Debug, Serialize)]
pub struct KnightCensus {
    pub d: usize,
    /// Number of matrices found by the exhaustive search.
    pub count: usize,
    /// Row-target vectors of everything found, sorted.
    pub found: Vec<Vec<usize>>,
    /// Row-target vectors produced by the step construction, sorted.
    pub construction: Vec<Vec<usize>>,
    /// True iff the search found exactly the constructed set.
    pub matches_construction: bool,
}

/// Enumerate all permutation matrices with `(0,0)`-entry 1 and one 1 per
/// cyclic diagonal by brute force over permutations fixing 0; guarded to
/// `d ≤ 7`. Compares the census against the step-`b` construction outputs.
pub fn count_knight_unitaries(d: Dimension) -> Result<KnightCensus> {
    let n = d.get();
    if !d.is_prime() {
        return Err(Error::NonPrime(n, "the census applies to prime dimensions"));
    }
    if n > CENSUS_LIMIT {
        return Err(Error::ResourceLimit {
            what: "census dimension",
            limit: CENSUS_LIMIT,
            requested: n,
        });
    }

    let mut found = Vec::new();
    let mut targets = vec![0usize; n];
    let mut used_cols = vec![false; n];
    let mut used_diags = vec![false; n];
    used_cols[0] = true;
    used_diags[0] = true;
    census_rec(
        1,
        n,
        &mut targets,
        &mut used_cols,
        &mut used_diags,
        &mut found,
    );
    found.sort();

    let mut construction = Vec::new();
    for b in 2..n {
        match knight_unitary(d, b)? {
            KnightResult::Matrix(m) => construction.push(m.row_targets().to_vec()),
            KnightResult::Violation(v) => {
                return Err(Error::BasisInconsistency(format!(
                    "step construction failed for prime d = {n}, b = {}: {:?}",
                    v.b, v.kind
                )))
            }
        }
    }
    construction.sort();

    let matches_construction = found == construction;
    Ok(KnightCensus {
        d: n,
        count: found.len(),
        found,
        construction,
        matches_construction,
    })
}

fn census_rec(
    row: usize,
    n: usize,
    targets: &mut Vec<usize>,
    used_cols: &mut Vec<bool>,
    used_diags: &mut Vec<bool>,
    found: &mut Vec<Vec<usize>>,
) {
    if row == n {
        found.push(targets.clone());
        return;
    }
    for col in 0..n {
        if used_cols[col] {
            continue;
        }
        let diag = (col + n - row) % n;
        if used_diags[diag] {
            continue;
        }
        used_cols[col] = true;
        used_diags[diag] = true;
        targets[row] = col;
        census_rec(row + 1, n, targets, used_cols, used_diags, found);
        used_cols[col] = false;
        used_diags[diag] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{make_pauli, make_x, make_z};

    fn dim(d: usize) -> Dimension {
        Dimension::new(d).unwrap()
    }

    #[test]
    fn family_power_examples() {
        let z = make_z(dim(3));
        let members = family_powers(&z).unwrap();
        assert_eq!(members, vec![z.clone(), z.pow(2)]);

        let x = make_x(dim(2));
        assert_eq!(family_powers(&x).unwrap(), vec![x]);

        let g = make_pauli(1, 1, dim(5)).unwrap();
        let members = family_powers(&g).unwrap();
        assert_eq!(members.len(), 4);
        for (i, a) in members.iter().enumerate() {
            for (j, b) in members.iter().enumerate() {
                assert!(a.hs_inner(b).unwrap().is_delta(i == j));
            }
        }
    }

    #[test]
    fn family_rejects_degenerate_generator() {
        let id = MonomialOperator::identity(dim(3));
        assert!(matches!(
            family_powers(&id),
            Err(Error::NotDnarySpectrum(_))
        ));
    }

    #[test]
    fn qubit_family_with_gauge_closes_to_signed_identity() {
        // (XZ)² = -1; the closure scalar must match the gauge squared.
        let xz = make_pauli(1, 1, dim(2)).unwrap();
        let members = family_powers(&xz).unwrap();
        assert_eq!(members.len(), 1);
        let sq = xz.pow(2);
        assert_eq!(sq.scalar_identity(), Some(PhaseExp::new(1, 2)));
    }

    #[test]
    fn partition_examples() {
        let basis = OperatorBasis::build(dim(2)).unwrap();
        let collection = partition_basis(&basis).unwrap();
        let generators: Vec<&PauliLabel> = collection
            .families()
            .iter()
            .map(|f| f.generator_label())
            .collect();
        assert_eq!(
            generators,
            vec![
                &PauliLabel::single(0, 1),
                &PauliLabel::single(1, 0),
                &PauliLabel::single(1, 1),
            ]
        );

        for d in [3usize, 5] {
            let basis = OperatorBasis::build(dim(d)).unwrap();
            let collection = partition_basis(&basis).unwrap();
            assert_eq!(collection.len(), d + 1);
            let total: usize = collection
                .families()
                .iter()
                .map(|f| f.members().len())
                .sum();
            assert_eq!(total, d * d - 1);
            for family in collection.families() {
                assert!(family.eigenbasis().residual(family.generator()) < 1e-12);
                assert!(family.eigenbasis().gram_deviation() < 1e-12);
            }
        }
    }

    #[test]
    fn partition_rejects_tensor_bases() {
        let basis = OperatorBasis::build_tensor(&[dim(2), dim(2)]).unwrap();
        assert!(partition_basis(&basis).is_err());
    }

    #[test]
    fn mub_overlap_examples() {
        let basis = OperatorBasis::build(dim(2)).unwrap();
        let collection = partition_basis(&basis).unwrap();
        let report = verify_mub(&collection);
        assert!(report.pass);
        assert!(report.max_cross_dev < 1e-14);

        let basis = OperatorBasis::build(dim(3)).unwrap();
        let collection = partition_basis(&basis).unwrap();
        let report = verify_mub(&collection);
        assert!(report.pass, "cross {:.3e}", report.max_cross_dev);
        assert!(report.max_cross_dev < 1e-12);
    }

    #[test]
    fn projector_examples() {
        let basis = OperatorBasis::build(dim(3)).unwrap();
        let collection = partition_basis(&basis).unwrap();
        // Families are ordered Z first.
        let z_family = &collection.families()[0];
        let p1 = projector_from_family(z_family, 1).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let expected = if r == 1 && c == 1 { 1.0 } else { 0.0 };
                assert!((p1.entries()[[r, c]] - C64::new(expected, 0.0)).norm() < 1e-14);
            }
        }

        // Completeness: the d projectors of any family sum to identity.
        for family in collection.families() {
            let mut sum = CMatrix::zeros((3, 3));
            for n in 0..3 {
                sum += projector_from_family(family, n).unwrap().entries();
            }
            assert!(dense::max_abs_diff(&sum, &dense::identity(3)) < 1e-12);
        }

        // X family of a qubit: projector onto (1,1)/√2.
        let basis = OperatorBasis::build(dim(2)).unwrap();
        let collection = partition_basis(&basis).unwrap();
        let x_family = &collection.families()[1];
        let p0 = projector_from_family(x_family, 0).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                assert!((p0.entries()[[r, c]] - C64::new(0.5, 0.0)).norm() < 1e-14);
            }
        }

        assert!(projector_from_family(x_family, 2).is_err());
    }

    #[test]
    fn knight_matrix_examples() {
        let m = knight_unitary(dim(3), 2).unwrap();
        assert_eq!(m.matrix().unwrap().row_targets(), &[0, 2, 1]);

        let m = knight_unitary(dim(5), 2).unwrap();
        assert_eq!(m.matrix().unwrap().row_targets(), &[0, 2, 4, 1, 3]);

        // d = 4, b = 2: rows 0 and 2 collide on column 0.
        let v = knight_unitary(dim(4), 2).unwrap();
        let violation = v.violation().unwrap();
        assert_eq!(violation.kind, ViolationKind::ColumnCollision);
        assert_eq!(violation.index, 0);
        assert_eq!(violation.rows, vec![0, 2]);

        // d = 4, b = 3 is a permutation but doubles up a diagonal.
        let v = knight_unitary(dim(4), 3).unwrap();
        assert_eq!(
            v.violation().unwrap().kind,
            ViolationKind::DiagonalCollision
        );

        assert!(knight_unitary(dim(5), 1).is_err());
        assert!(knight_unitary(dim(5), 5).is_err());
    }

    #[test]
    fn diagonal_property_examples() {
        let m = knight_unitary(dim(3), 2).unwrap();
        let report = verify_diagonal_property(m.matrix().unwrap());
        assert!(report.pass);
        assert!(report.vanishing);
        assert_eq!(report.c.entries(), &[1, 1, 1]);

        let m = knight_unitary(dim(5), 3).unwrap();
        let report = verify_diagonal_property(m.matrix().unwrap());
        assert!(report.pass);
        assert_eq!(report.c.entries(), &[1, 1, 1, 1, 1]);

        // Identity matrix: all mass on the main diagonal.
        let id = BasisChangeMatrix::from_row_targets(dim(3), 1, vec![0, 1, 2]).unwrap();
        let report = verify_diagonal_property(&id);
        assert!(!report.pass);
        assert!(!report.vanishing);
        assert_eq!(report.c.entries(), &[3, 0, 0]);
    }

    #[test]
    fn shift_compose_examples() {
        let d = dim(3);
        let m = knight_unitary(d, 2).unwrap();
        let m = m.matrix().unwrap();

        let unchanged = shift_compose(&ShiftOperator::new(d, 0), m).unwrap();
        assert_eq!(unchanged, m.row_targets());

        let full_cycle = shift_compose(&ShiftOperator::new(d, 3), m).unwrap();
        assert_eq!(full_cycle, m.row_targets());

        // Shift by one moves the first upper diagonal onto the main one.
        let shifted = shift_compose(&ShiftOperator::new(d, 1), m).unwrap();
        let diag_count = shifted.iter().enumerate().filter(|&(i, &t)| t == i).count();
        let c = verify_diagonal_property(m).c;
        assert_eq!(diag_count as u64, c.entries()[1]);
    }

    #[test]
    fn census_frozen_values() {
        // Counts frozen from the exhaustive search itself.
        let census = count_knight_unitaries(dim(2)).unwrap();
        assert_eq!(census.count, 0);
        assert!(census.matches_construction);

        let census = count_knight_unitaries(dim(3)).unwrap();
        assert_eq!(census.count, 1);
        assert!(census.matches_construction);

        let census = count_knight_unitaries(dim(5)).unwrap();
        assert_eq!(census.count, 3);
        assert!(census.matches_construction);

        // At d = 7 the search finds 19 matrices: the 5 step-constructed ones
        // plus 14 with non-linear row-target maps, e.g. (0,2,5,1,6,4,3).
        let census = count_knight_unitaries(dim(7)).unwrap();
        assert_eq!(census.count, 19);
        assert_eq!(census.construction.len(), 5);
        assert!(!census.matches_construction);
        for c in &census.construction {
            assert!(census.found.contains(c));
        }
        assert!(census.found.contains(&vec![0, 2, 5, 1, 6, 4, 3]));
    }

    #[test]
    fn census_guards() {
        assert!(matches!(
            count_knight_unitaries(dim(11)),
            Err(Error::ResourceLimit { .. })
        ));
        assert!(matches!(
            count_knight_unitaries(dim(6)),
            Err(Error::NonPrime(6, _))
        ));
    }

    #[test]
    fn relabeled_eigensystem_reproduces_powers() {
        // Member g^b equals Σ_k (gauge·ω^k)^b |v_k⟩⟨v_k| exactly.
        for d in [3usize, 5] {
            let basis = OperatorBasis::build(dim(d)).unwrap();
            let collection = partition_basis(&basis).unwrap();
            for family in collection.families() {
                let eb = family.eigenbasis();
                let gauge = eb.gauge().as_complex();
                for b in 1..d {
                    let mut rebuilt = CMatrix::zeros((d, d));
                    for k in 0..d {
                        let v = eb.vector(k);
                        let lambda =
                            (gauge * PhaseExp::new(k as i64, d).as_complex()).powu(b as u32);
                        rebuilt = rebuilt + dense::outer(&v, &v) * lambda;
                    }
                    let member = family.members()[b - 1].to_dense();
                    assert!(dense::max_abs_diff(&rebuilt, member.entries()) < 1e-12);
                }
            }
        }
    }
}
