//! Cross-module invariants: spectrum behaviour under dense conjugation,
//! completeness of tensor bases, and the knight-matrix theorems over the
//! full dimension range they hold for.

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qudit_mub::dense;
use qudit_mub::monomial::MonomialOperator;
use qudit_mub::mub::{knight_unitary, verify_diagonal_property, KnightResult, ViolationKind};
use qudit_mub::pauli::OperatorBasis;
use qudit_mub::zd::Dimension;

fn dim(d: usize) -> Dimension {
    Dimension::new(d).unwrap()
}

fn random_monomial(d: usize, rng: &mut ChaCha8Rng) -> MonomialOperator {
    use rand::seq::SliceRandom;
    use rand::Rng;
    let mut perm: Vec<usize> = (0..d).collect();
    perm.shuffle(rng);
    let phases: Vec<usize> = (0..d).map(|_| rng.gen_range(0..d)).collect();
    MonomialOperator::new(dim(d), perm, phases).unwrap()
}

/// Unitary conjugation leaves the eigenvalue multiset unchanged. The
/// multiset of a D×D matrix is pinned by its first D power traces, so we
/// compare `Tr[(V A V†)^j]` against `Σ_i λ_i^j` from the exact spectrum.
#[test]
fn spectrum_is_invariant_under_dense_conjugation() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for d in [2usize, 3, 4, 5, 6] {
        for _ in 0..4 {
            let a = random_monomial(d, &mut rng);
            let v = dense::random_unitary(d, &mut rng);
            let conjugated = v.dot(a.to_dense().entries()).dot(&dense::dagger(&v));
            let spectrum = a.spectrum();

            let mut power = dense::identity(d);
            for j in 1..=d {
                power = power.dot(&conjugated);
                let trace = dense::trace(&power);
                let expected: C64 = spectrum
                    .eigenvalues()
                    .iter()
                    .map(|r| r.as_complex().powu(j as u32))
                    .sum();
                assert!(
                    (trace - expected).norm() < 1e-9,
                    "d={d} power={j}: {trace} vs {expected}"
                );
            }
        }
    }
}

#[test]
fn tensor_basis_reconstructs_arbitrary_matrices() {
    let basis = OperatorBasis::build_tensor(&[dim(2), dim(3)]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let a = dense::random_unitary(6, &mut rng) * C64::new(0.7, 1.9);
    let coeffs = basis.coefficients(&a);
    assert_eq!(coeffs.len(), 36);
    let back = basis.reconstruct(&coeffs);
    assert!(dense::max_abs_diff(&a, &back) < 1e-10);
}

/// For every prime d ≤ 11 and every step width, the construction yields a
/// permutation matrix with exactly one entry per cyclic diagonal.
#[test]
fn knight_matrices_valid_for_all_primes_up_to_11() {
    for d in [2usize, 3, 5, 7, 11] {
        for b in 2..d {
            let result = knight_unitary(dim(d), b).unwrap();
            let matrix = result
                .matrix()
                .unwrap_or_else(|| panic!("violation at prime d={d}, b={b}"));
            assert_eq!(matrix.row_targets()[0], 0);
            let report = verify_diagonal_property(matrix);
            assert!(report.pass, "d={d} b={b}");
            assert!(report.vanishing);
            assert!(report.c.entries().iter().all(|&c| c == 1));
        }
    }
}

/// Every composite d ≤ 12 has at least one step width whose construction
/// collides on a column or diagonal.
#[test]
fn knight_construction_fails_for_composite_dimensions() {
    for d in [4usize, 6, 8, 9, 10, 12] {
        let mut violations = 0;
        for b in 2..d {
            if let KnightResult::Violation(v) = knight_unitary(dim(d), b).unwrap() {
                assert!(matches!(
                    v.kind,
                    ViolationKind::ColumnCollision | ViolationKind::DiagonalCollision
                ));
                assert!(v.rows.len() >= 2);
                violations += 1;
            }
        }
        assert!(violations > 0, "no violation found at composite d={d}");
    }
}
