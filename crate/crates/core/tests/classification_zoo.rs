//! Gate zoo: the characterizability verdict must coincide with preservation
//! of the mutually unbiased eigenbasis partition, and recorded conjugation
//! phases must be d-th roots of unity for every characterizable gate.

use qudit_mub::classify::{classify, cycle_degree_histogram, is_mub_preserving, UnitaryGate};
use qudit_mub::dense;
use qudit_mub::monomial::MonomialOperator;
use qudit_mub::mub::partition_basis;
use qudit_mub::pauli::{make_pauli, OperatorBasis};
use qudit_mub::zd::Dimension;

fn dim(d: usize) -> Dimension {
    Dimension::new(d).unwrap()
}

fn gate_zoo(d: usize) -> Vec<(String, UnitaryGate)> {
    let dd = dim(d);
    let dims = vec![dd];
    let mut zoo = Vec::new();
    for a in 0..d {
        for b in 0..d {
            let op = make_pauli(a, b, dd).unwrap();
            zoo.push((
                format!("pauli({a},{b})"),
                UnitaryGate::from_monomial(dims.clone(), &op).unwrap(),
            ));
        }
    }
    let fourier = UnitaryGate::fourier(dims.clone()).unwrap();
    zoo.push(("fourier".into(), fourier.clone()));

    let x = make_pauli(1, 0, dd).unwrap();
    let fx = fourier.matrix().dot(x.to_dense().entries());
    zoo.push((
        "fourier·x".into(),
        UnitaryGate::new(dims.clone(), fx).unwrap(),
    ));

    // A diagonal gate with an incommensurate phase is unitary but does not
    // respect the basis.
    let mut diag = dense::identity(d);
    diag[[d - 1, d - 1]] = num_complex::Complex64::from_polar(1.0, 0.31);
    zoo.push((
        "off-root diagonal".into(),
        UnitaryGate::new(dims.clone(), diag).unwrap(),
    ));

    for seed in 0..5u64 {
        zoo.push((
            format!("random({seed})"),
            UnitaryGate::random(dims.clone(), 1000 + seed).unwrap(),
        ));
    }
    zoo
}

#[test]
fn characterizable_iff_partition_preserving() {
    for d in [2usize, 3, 5] {
        let basis = OperatorBasis::build(dim(d)).unwrap();
        let collection = partition_basis(&basis).unwrap();
        for (name, gate) in gate_zoo(d) {
            let report = classify(&gate, &basis).unwrap();
            let preserving = is_mub_preserving(&gate, &collection).unwrap();
            assert_eq!(
                report.characterizable, preserving,
                "verdicts disagree for {name} at d={d}"
            );
            if report.characterizable {
                let cycles = report.cycles.as_ref().unwrap();
                assert_eq!(cycles.total_degree(), d * d - 1, "{name} at d={d}");
                for m in &report.matches {
                    assert!(
                        m.snapped.is_some(),
                        "{name} at d={d}: phase {:?} is not a d-th root",
                        m.phase
                    );
                }
            }
        }
    }
}

#[test]
fn entangling_monomial_gates_classify_on_tensor_bases() {
    // |c, t⟩ ↦ |c, t ⊕ c⟩ on two factors of equal dimension.
    for d in [2usize, 3] {
        let dims = vec![dim(d), dim(d)];
        let total = d * d;
        let perm: Vec<usize> = (0..total)
            .map(|idx| {
                let (c, t) = (idx / d, idx % d);
                c * d + (t + c) % d
            })
            .collect();
        let csum =
            MonomialOperator::new(Dimension::new(total).unwrap(), perm, vec![0; total]).unwrap();
        let gate = UnitaryGate::from_monomial(dims.clone(), &csum).unwrap();
        let basis = OperatorBasis::build_tensor(&dims).unwrap();
        let report = classify(&gate, &basis).unwrap();
        assert!(report.characterizable, "csum at d={d}");
        assert_eq!(
            report.cycles.as_ref().unwrap().total_degree(),
            total * total - 1
        );
        for m in &report.matches {
            assert!(m.snapped.is_some());
        }
    }
}

#[test]
fn two_qutrit_pauli_histogram_is_all_fixed_points() {
    let dims = vec![dim(3), dim(3)];
    let basis = OperatorBasis::build_tensor(&dims).unwrap();
    let op = make_pauli(2, 1, dim(3))
        .unwrap()
        .tensor(&make_pauli(1, 1, dim(3)).unwrap());
    let gate = UnitaryGate::from_monomial(dims, &op).unwrap();
    let report = classify(&gate, &basis).unwrap();
    assert!(report.characterizable);
    let hist = cycle_degree_histogram(&report).unwrap();
    assert_eq!(hist.get(&1), Some(&80));
}

/// Conjugation by Pauli gates fixes every label up to a phase; the dense
/// classification path must agree with the exact monomial conjugation.
#[test]
fn pauli_conjugation_agrees_with_exact_monomial_oracle() {
    for d in [2usize, 3, 5] {
        let dd = dim(d);
        let basis = OperatorBasis::build(dd).unwrap();
        for a in 0..d {
            for b in 0..d {
                let u = make_pauli(a, b, dd).unwrap();
                let gate = UnitaryGate::from_monomial(vec![dd], &u).unwrap();
                let report = classify(&gate, &basis).unwrap();
                assert!(report.characterizable);
                for m in &report.matches {
                    let exact = basis.element(m.source).op.conjugated_by(&u).unwrap();
                    let (target, phase) = basis
                        .elements()
                        .iter()
                        .enumerate()
                        .find_map(|(j, e)| exact.proportional_to(&e.op).map(|t| (j, t)))
                        .expect("conjugation stays in the group");
                    assert_eq!(m.target, Some(target));
                    assert_eq!(m.snapped, Some(phase));
                }
            }
        }
    }
}
