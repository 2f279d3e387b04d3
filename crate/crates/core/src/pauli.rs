//! The generalized Pauli operator basis for prime dimensions, and
//! tensor-product bases for multi-qudit or composite-dimension systems.
//!
//! For prime `d` the `d²` operators `X^a Z^b` (shift and clock) form a
//! complete basis, exactly orthonormal under the normalized Hilbert-Schmidt
//! inner product, with every non-identity element traceless. Composite total
//! dimensions are always routed through their prime factorization and built
//! as tensor products of per-factor bases.

use num_complex::Complex64 as C64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dense::CMatrix;
use crate::monomial::MonomialOperator;
use crate::zd::{Dimension, PhaseExp};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Labels
// ---------------------------------------------------------------------------

/// Exponent pairs `(a_i, b_i)` labelling the tensor factor `X^{a_i} Z^{b_i}`
/// on each subsystem; `(0, 0)` on every factor labels the identity.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct PauliLabel(Vec<(usize, usize)>);

impl PauliLabel {
    pub fn single(a: usize, b: usize) -> Self {
        Self(vec![(a, b)])
    }

    pub fn tensor(factors: Vec<(usize, usize)>) -> Self {
        assert!(!factors.is_empty(), "a label needs at least one factor");
        Self(factors)
    }

    pub fn factors(&self) -> &[(usize, usize)] {
        &self.0
    }

    pub fn num_factors(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&(a, b)| a == 0 && b == 0)
    }
}

impl std::fmt::Display for PauliLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&(a, b)| {
                if a == 0 && b == 0 {
                    "I".to_string()
                } else {
                    format!("X^{a}Z^{b}")
                }
            })
            .collect();
        write!(f, "{}", parts.join("⊗"))
    }
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// The cyclic shift `X = Σ_n |n⊕1⟩⟨n|`.
pub fn make_x(d: Dimension) -> MonomialOperator {
    let n = d.get();
    let perm: Vec<usize> = (0..n).map(|m| (m + 1) % n).collect();
    MonomialOperator::new(d, perm, vec![0; n]).expect("cyclic shift is a bijection")
}

/// The clock `Z = Σ_n ω^n |n⟩⟨n|`.
pub fn make_z(d: Dimension) -> MonomialOperator {
    let n = d.get();
    MonomialOperator::new(d, (0..n).collect(), (0..n).collect()).expect("identity permutation")
}

/// `X^a Z^b` by exact monomial multiplication; exponents must lie in
/// `[0, d-1]`.
pub fn make_pauli(a: usize, b: usize, d: Dimension) -> Result<MonomialOperator> {
    let n = d.get();
    for (name, value) in [("a", a), ("b", b)] {
        if value >= n {
            return Err(Error::OutOfRange {
                what: name,
                value: value as i64,
                min: 0,
                max: n as i64 - 1,
            });
        }
    }
    let op = make_x(d).pow(a).multiply(&make_z(d).pow(b))?;
    Ok(op)
}

/// Decompose a single-system monomial as `ω^t X^a Z^b`; returns
/// `(a, b, t)` or `None` if the phases are not affine in the column index.
pub fn pauli_label_of(m: &MonomialOperator) -> Option<(usize, usize, PhaseExp)> {
    let d = m.dimension();
    let n = d.get();
    let a = m.perm()[0];
    let candidate_b = if n == 1 {
        0
    } else {
        (m.phases()[1] - m.phases()[0]).exponent()
    };
    let reference = make_pauli(a, candidate_b, d).ok()?;
    m.proportional_to(&reference).map(|t| (a, candidate_b, t))
}

/// The exponent `t` in `M₁M₂ = ω^t M₂M₁` for the Paulis labelled `l1`, `l2`
/// on factors of common dimension `d`: `t = Σ_i (a₂ᵢ b₁ᵢ - a₁ᵢ b₂ᵢ) mod d`.
/// The pair commutes exactly when `t = 0`.
pub fn commutation_phase(l1: &PauliLabel, l2: &PauliLabel, d: Dimension) -> Result<PhaseExp> {
    if l1.num_factors() != l2.num_factors() {
        return Err(Error::DimensionMismatch(l1.num_factors(), l2.num_factors()));
    }
    let n = d.get() as i64;
    let mut t = 0i64;
    for (&(a1, b1), &(a2, b2)) in l1.factors().iter().zip(l2.factors()) {
        t += (a2 as i64 % n) * (b1 as i64 % n) - (a1 as i64 % n) * (b2 as i64 % n);
    }
    Ok(PhaseExp::new(t, d.get()))
}

// ---------------------------------------------------------------------------
// OperatorBasis
// ---------------------------------------------------------------------------

/// One labelled basis element, stored exactly.
#[derive(Clone, PartialEq, Debug)]
pub struct BasisElement {
    pub label: PauliLabel,
    pub op: MonomialOperator,
}

/// The full set of `D²` labelled measurement operators (identity included)
/// over `D = Π d_i`, sorted lexicographically by per-factor `(a, b)`.
#[derive(Clone, PartialEq, Debug)]
pub struct OperatorBasis {
    dims: Vec<Dimension>,
    elements: Vec<BasisElement>,
}

impl OperatorBasis {
    /// Single-qudit basis `{X^a Z^b}` for prime `d`.
    pub fn build(d: Dimension) -> Result<Self> {
        Self::build_tensor(&[d])
    }

    /// Tensor-product basis over prime factors.
    pub fn build_tensor(dims: &[Dimension]) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::DimensionTooSmall(0));
        }
        for &d in dims {
            if !d.is_prime() {
                return Err(Error::NonPrime(
                    d.get(),
                    "basis factors must be prime; use build_composite to factorize",
                ));
            }
        }
        let factor_labels: Vec<Vec<(usize, usize)>> = dims
            .iter()
            .map(|d| {
                let n = d.get();
                let mut labels = Vec::with_capacity(n * n);
                for a in 0..n {
                    for b in 0..n {
                        labels.push((a, b));
                    }
                }
                labels
            })
            .collect();

        let total: usize = factor_labels.iter().map(Vec::len).product();
        let mut elements = Vec::with_capacity(total);
        let mut indices = vec![0usize; dims.len()];
        loop {
            let factors: Vec<(usize, usize)> = indices
                .iter()
                .enumerate()
                .map(|(f, &i)| factor_labels[f][i])
                .collect();
            let mut op: Option<MonomialOperator> = None;
            for (f, &(a, b)) in factors.iter().enumerate() {
                let factor_op = make_pauli(a, b, dims[f])?;
                op = Some(match op {
                    None => factor_op,
                    Some(acc) => acc.tensor(&factor_op),
                });
            }
            elements.push(BasisElement {
                label: PauliLabel::tensor(factors),
                op: op.expect("at least one factor"),
            });
            // Odometer increment in lexicographic order.
            let mut pos = dims.len();
            loop {
                if pos == 0 {
                    return Ok(Self {
                        dims: dims.to_vec(),
                        elements,
                    });
                }
                pos -= 1;
                indices[pos] += 1;
                if indices[pos] < factor_labels[pos].len() {
                    break;
                }
                indices[pos] = 0;
            }
        }
    }

    /// Basis for an arbitrary total dimension, via its prime factorization
    /// (ascending, with multiplicity).
    pub fn build_composite(total: usize) -> Result<Self> {
        let total = Dimension::new(total)?;
        let dims: Vec<Dimension> = total
            .prime_factors()
            .into_iter()
            .map(|p| Dimension::new(p).expect("factors are at least 2"))
            .collect();
        Self::build_tensor(&dims)
    }

    pub fn dims(&self) -> &[Dimension] {
        &self.dims
    }

    pub fn total_dimension(&self) -> usize {
        self.dims.iter().map(|d| d.get()).product()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[BasisElement] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &BasisElement {
        &self.elements[i]
    }

    /// Index of the identity label (first in lexicographic order).
    pub fn identity_index(&self) -> usize {
        0
    }

    pub fn index_of(&self, label: &PauliLabel) -> Option<usize> {
        self.elements.iter().position(|e| &e.label == label)
    }

    /// Per-factor monomial operators of a label.
    pub fn factor_ops(&self, label: &PauliLabel) -> Result<Vec<MonomialOperator>> {
        if label.num_factors() != self.dims.len() {
            return Err(Error::DimensionMismatch(
                label.num_factors(),
                self.dims.len(),
            ));
        }
        label
            .factors()
            .iter()
            .zip(&self.dims)
            .map(|(&(a, b), &d)| make_pauli(a, b, d))
            .collect()
    }

    /// `(1/D) Tr[M_i† A]` for a dense matrix `A`, using the one-entry-per-row
    /// structure of `M_i` (O(D) per element).
    pub fn inner_with_dense(&self, i: usize, a: &CMatrix) -> C64 {
        let m = &self.elements[i].op;
        let dd = self.total_dimension();
        let mut acc = C64::new(0.0, 0.0);
        for col in 0..dd {
            acc += m.phases()[col].as_complex().conj() * a[[m.perm()[col], col]];
        }
        acc / dd as f64
    }

    /// Expansion coefficients `⟨M_i, A⟩` of a dense matrix against the basis.
    pub fn coefficients(&self, a: &CMatrix) -> Vec<C64> {
        (0..self.len())
            .map(|i| self.inner_with_dense(i, a))
            .collect()
    }

    /// `Σ_i c_i M_i` for given coefficients.
    pub fn reconstruct(&self, coeffs: &[C64]) -> CMatrix {
        let dd = self.total_dimension();
        let mut out = CMatrix::zeros((dd, dd));
        for (c, e) in coeffs.iter().zip(&self.elements) {
            let m = &e.op;
            for col in 0..dd {
                out[[m.perm()[col], col]] += c * m.phases()[col].as_complex();
            }
        }
        out
    }
}

impl Serialize for OperatorBasis {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct RawElement<'a> {
            label: &'a PauliLabel,
            perm: &'a [usize],
            phase: Vec<usize>,
        }
        #[derive(Serialize)]
        struct Raw<'a> {
            dims: &'a [Dimension],
            elements: Vec<RawElement<'a>>,
        }
        let elements = self
            .elements
            .iter()
            .map(|e| RawElement {
                label: &e.label,
                perm: e.op.perm(),
                phase: e.op.phase_exponents(),
            })
            .collect();
        Raw {
            dims: &self.dims,
            elements,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OperatorBasis {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct RawElement {
            label: PauliLabel,
            perm: Vec<usize>,
            phase: Vec<usize>,
        }
        #[derive(Deserialize)]
        struct Raw {
            dims: Vec<Dimension>,
            elements: Vec<RawElement>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let total: usize = raw.dims.iter().map(|d| d.get()).product();
        let total_dim = Dimension::new(total).map_err(D::Error::custom)?;
        let elements = raw
            .elements
            .into_iter()
            .map(|e| {
                let op =
                    MonomialOperator::new(total_dim, e.perm, e.phase).map_err(D::Error::custom)?;
                Ok(BasisElement { label: e.label, op })
            })
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        Ok(Self {
            dims: raw.dims,
            elements,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dim(d: usize) -> Dimension {
        Dimension::new(d).unwrap()
    }

    #[test]
    fn generator_matrices() {
        let x = make_x(dim(2)).to_dense();
        assert!((x.entries()[[0, 1]] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((x.entries()[[1, 0]] - C64::new(1.0, 0.0)).norm() < 1e-15);

        let z = make_z(dim(2)).to_dense();
        assert!((z.entries()[[0, 0]] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((z.entries()[[1, 1]] - C64::new(-1.0, 0.0)).norm() < 1e-15);

        let z3 = make_z(dim(3)).to_dense();
        for n in 0..3 {
            let expected = PhaseExp::new(n as i64, 3).as_complex();
            assert!((z3.entries()[[n, n]] - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn make_pauli_examples() {
        // (1,1) at d = 2 is [[0, -1], [1, 0]] in the stored phase convention.
        let xz = make_pauli(1, 1, dim(2)).unwrap().to_dense();
        assert!((xz.entries()[[0, 1]] - C64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((xz.entries()[[1, 0]] - C64::new(1.0, 0.0)).norm() < 1e-15);

        assert!(make_pauli(0, 0, dim(5)).unwrap().is_identity());

        let p = make_pauli(2, 1, dim(3)).unwrap();
        assert_eq!(p.perm(), &[2, 0, 1]);
        assert_eq!(p.phase_exponents(), vec![0, 1, 2]);

        assert!(make_pauli(3, 0, dim(3)).is_err());
    }

    #[test]
    fn commutation_phase_matches_direct_multiplication() {
        // Exact multiplication is the oracle for the sign convention.
        for d in [3usize, 5] {
            let dd = dim(d);
            for a1 in 0..d {
                for b1 in 0..d {
                    for a2 in 0..d {
                        for b2 in 0..d {
                            let l1 = PauliLabel::single(a1, b1);
                            let l2 = PauliLabel::single(a2, b2);
                            let t = commutation_phase(&l1, &l2, dd).unwrap();
                            let m1 = make_pauli(a1, b1, dd).unwrap();
                            let m2 = make_pauli(a2, b2, dd).unwrap();
                            let lhs = m1.multiply(&m2).unwrap();
                            let rhs = m2.multiply(&m1).unwrap();
                            let observed = lhs.proportional_to(&rhs).unwrap();
                            assert_eq!(t, observed, "({a1},{b1}) vs ({a2},{b2}) at d={d}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn commutation_phase_examples() {
        let d3 = dim(3);
        let t =
            commutation_phase(&PauliLabel::single(1, 0), &PauliLabel::single(0, 1), d3).unwrap();
        assert!(!t.is_zero());

        let t =
            commutation_phase(&PauliLabel::single(0, 1), &PauliLabel::single(0, 2), d3).unwrap();
        assert!(t.is_zero());

        let t =
            commutation_phase(&PauliLabel::single(1, 1), &PauliLabel::single(2, 2), d3).unwrap();
        assert!(t.is_zero());
    }

    #[test]
    fn qubit_basis_elements() {
        let basis = OperatorBasis::build(dim(2)).unwrap();
        assert_eq!(basis.len(), 4);
        let labels: Vec<&PauliLabel> = basis.elements().iter().map(|e| &e.label).collect();
        assert_eq!(
            labels,
            vec![
                &PauliLabel::single(0, 0),
                &PauliLabel::single(0, 1),
                &PauliLabel::single(1, 0),
                &PauliLabel::single(1, 1),
            ]
        );
        assert!(basis.element(0).op.is_identity());
    }

    #[test]
    fn prime_bases_are_exactly_orthonormal() {
        for d in [3usize, 5] {
            let basis = OperatorBasis::build(dim(d)).unwrap();
            assert_eq!(basis.len(), d * d);
            for i in 0..basis.len() {
                for j in 0..basis.len() {
                    let inner = basis.element(i).op.hs_inner(&basis.element(j).op).unwrap();
                    assert!(inner.is_delta(i == j), "({i},{j}) at d={d}");
                }
            }
        }
    }

    #[test]
    fn non_prime_single_dimension_rejected() {
        assert!(matches!(
            OperatorBasis::build(dim(4)),
            Err(Error::NonPrime(4, _))
        ));
    }

    #[test]
    fn tensor_basis_sizes() {
        assert_eq!(
            OperatorBasis::build_tensor(&[dim(2), dim(2)])
                .unwrap()
                .len(),
            16
        );
        let b = OperatorBasis::build_tensor(&[dim(2), dim(3)]).unwrap();
        assert_eq!(b.len(), 36);
        assert_eq!(b.total_dimension(), 6);
    }

    #[test]
    fn two_qutrit_random_pairs_exactly_orthonormal() {
        let basis = OperatorBasis::build_tensor(&[dim(3), dim(3)]).unwrap();
        assert_eq!(basis.len(), 81);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let indices: Vec<usize> = (0..basis.len()).collect();
        for _ in 0..50 {
            let pair: Vec<&usize> = indices.choose_multiple(&mut rng, 2).collect();
            let (i, j) = (*pair[0], *pair[1]);
            let inner = basis.element(i).op.hs_inner(&basis.element(j).op).unwrap();
            assert!(inner.is_delta(i == j));
        }
    }

    #[test]
    fn composite_dimension_routing() {
        let b6 = OperatorBasis::build_composite(6).unwrap();
        assert_eq!(
            b6.dims().iter().map(|d| d.get()).collect::<Vec<_>>(),
            vec![2, 3]
        );

        let b4 = OperatorBasis::build_composite(4).unwrap();
        assert_eq!(
            b4.dims().iter().map(|d| d.get()).collect::<Vec<_>>(),
            vec![2, 2]
        );

        let b5 = OperatorBasis::build_composite(5).unwrap();
        assert_eq!(b5, OperatorBasis::build(dim(5)).unwrap());
    }

    #[test]
    fn non_identity_elements_are_traceless_with_dnary_factors() {
        for dims in [vec![2usize], vec![3], vec![5], vec![2, 3]] {
            let dims: Vec<Dimension> = dims.into_iter().map(dim).collect();
            let basis = OperatorBasis::build_tensor(&dims).unwrap();
            for e in basis.elements() {
                if e.label.is_identity() {
                    continue;
                }
                assert!(e.op.trace_exact().is_zero(), "{}", e.label);
                for factor in basis.factor_ops(&e.label).unwrap() {
                    if !factor.is_identity() {
                        assert!(factor.spectrum().is_dnary_up_to_phase());
                    }
                }
            }
        }
    }

    #[test]
    fn pauli_label_round_trip() {
        let d5 = dim(5);
        for a in 0..5 {
            for b in 0..5 {
                let op = make_pauli(a, b, d5).unwrap();
                // Also dress with powers, which add a global phase.
                for power in 1..5 {
                    let powered = op.pow(power);
                    let (pa, pb, _) = pauli_label_of(&powered).unwrap();
                    assert_eq!((pa, pb), ((a * power) % 5, (b * power) % 5));
                }
            }
        }
    }

    #[test]
    fn group_closure_up_to_phase() {
        for d in [2usize, 3, 5] {
            let basis = OperatorBasis::build(dim(d)).unwrap();
            for e1 in basis.elements() {
                for e2 in basis.elements() {
                    let product = e1.op.multiply(&e2.op).unwrap();
                    let hits = basis
                        .elements()
                        .iter()
                        .filter(|e| product.proportional_to(&e.op).is_some())
                        .count();
                    assert_eq!(hits, 1, "{} · {} at d={d}", e1.label, e2.label);
                }
            }
        }
    }

    #[test]
    fn completeness_reconstruction() {
        let basis = OperatorBasis::build(dim(3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let a = dense::random_unitary(3, &mut rng) * C64::new(1.3, -0.4);
        let coeffs = basis.coefficients(&a);
        let back = basis.reconstruct(&coeffs);
        assert!(dense::max_abs_diff(&a, &back) < 1e-10);
    }

    #[test]
    fn basis_json_round_trip() {
        let basis = OperatorBasis::build_tensor(&[dim(2), dim(3)]).unwrap();
        let json = serde_json::to_string(&basis).unwrap();
        let back: OperatorBasis = serde_json::from_str(&json).unwrap();
        assert_eq!(basis, back);
        assert!(json.contains("\"dims\":[2,3]"));
    }
}
