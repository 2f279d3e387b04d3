//! Estimator validation: agreement of the two exact-fidelity routes,
//! unbiasedness of the Monte Carlo mean over many seeds, and behaviour of
//! the general (non-minimal) sampling path.

use num_complex::Complex64 as C64;

use qudit_mub::classify::UnitaryGate;
use qudit_mub::dense;
use qudit_mub::fidelity::{
    exact_average_fidelity, mc_estimate, relevance_distribution, QuantumChannel,
};
use qudit_mub::pauli::{make_pauli, OperatorBasis};
use qudit_mub::zd::Dimension;

fn dim(d: usize) -> Dimension {
    Dimension::new(d).unwrap()
}

/// Independent oracle for the entanglement fidelity: the full contraction
/// `F_e = (1/D³) Σ_i Tr[(U M_i U†)† Λ(M_i)]` over the complete basis,
/// evaluated densely without the Kraus-trace shortcut.
fn process_contraction_favg(
    gate: &UnitaryGate,
    channel: &QuantumChannel,
    basis: &OperatorBasis,
) -> f64 {
    let d = basis.total_dimension();
    let u = gate.matrix();
    let u_dag = dense::dagger(u);
    let mut fe = C64::new(0.0, 0.0);
    for e in basis.elements() {
        let m = e.op.to_dense();
        let conjugated = u.dot(m.entries()).dot(&u_dag);
        let out = channel.apply(m.entries());
        fe += dense::trace(&dense::dagger(&conjugated).dot(&out));
    }
    let fe = fe.re / (d as f64).powi(3);
    (d as f64 * fe + 1.0) / (d as f64 + 1.0)
}

#[test]
fn kraus_trace_formula_matches_process_contraction() {
    let cases: Vec<(Vec<usize>, &str)> = vec![
        (vec![2], "depolarizing"),
        (vec![3], "dephasing"),
        (vec![2, 2], "local"),
        (vec![3, 3], "depolarizing"),
    ];
    for (raw_dims, noise) in cases {
        let dims: Vec<Dimension> = raw_dims.iter().map(|&d| dim(d)).collect();
        let basis = OperatorBasis::build_tensor(&dims).unwrap();
        let gate = UnitaryGate::fourier(dims.clone()).unwrap();
        let noise_channel = match noise {
            "depolarizing" => QuantumChannel::depolarizing(dims.clone(), 0.12).unwrap(),
            "dephasing" => QuantumChannel::dephasing(dims.clone(), 0.3).unwrap(),
            _ => QuantumChannel::local_depolarizing(dims.clone(), 0.08).unwrap(),
        };
        let channel = noise_channel.after_gate(&gate).unwrap();
        let fast = exact_average_fidelity(&gate, &channel).unwrap();
        let slow = process_contraction_favg(&gate, &channel, &basis);
        assert!(
            (fast - slow).abs() < 1e-10,
            "dims {raw_dims:?} noise {noise}: {fast} vs {slow}"
        );
    }
}

/// Grand mean over 50 seeds lands within three pooled standard errors of the
/// exact value, for characterizable gates at D ∈ {2, 3, 4, 9}.
#[test]
fn estimator_is_unbiased_across_seeds() {
    let configs: Vec<(Vec<usize>, &str)> = vec![
        (vec![2], "x"),
        (vec![3], "fourier"),
        (vec![2, 2], "cnot"),
        (vec![3, 3], "pauli-pair"),
    ];
    for (raw_dims, gate_kind) in configs {
        let dims: Vec<Dimension> = raw_dims.iter().map(|&d| dim(d)).collect();
        let basis = OperatorBasis::build_tensor(&dims).unwrap();
        let gate = match gate_kind {
            "x" => UnitaryGate::from_monomial(dims.clone(), &make_pauli(1, 0, dims[0]).unwrap())
                .unwrap(),
            "fourier" => UnitaryGate::fourier(dims.clone()).unwrap(),
            "cnot" => {
                let perm = vec![0usize, 1, 3, 2];
                let op = qudit_mub::monomial::MonomialOperator::new(
                    Dimension::new(4).unwrap(),
                    perm,
                    vec![0; 4],
                )
                .unwrap();
                UnitaryGate::from_monomial(dims.clone(), &op).unwrap()
            }
            _ => {
                let op = make_pauli(1, 2, dim(3))
                    .unwrap()
                    .tensor(&make_pauli(0, 1, dim(3)).unwrap());
                UnitaryGate::from_monomial(dims.clone(), &op).unwrap()
            }
        };
        let channel = QuantumChannel::local_depolarizing(dims.clone(), 0.1)
            .unwrap()
            .after_gate(&gate)
            .unwrap();
        let exact = exact_average_fidelity(&gate, &channel).unwrap();

        let mut means = Vec::new();
        let mut stderrs = Vec::new();
        for seed in 0..50u64 {
            let est = mc_estimate(&gate, &channel, &basis, 500, seed, None).unwrap();
            means.push(est.raw_mean);
            stderrs.push(est.stderr);
        }
        let grand = means.iter().sum::<f64>() / means.len() as f64;
        let pooled =
            stderrs.iter().sum::<f64>() / stderrs.len() as f64 / (means.len() as f64).sqrt();
        assert!(
            (grand - exact).abs() < 3.0 * pooled,
            "dims {raw_dims:?}: grand {grand} exact {exact} pooled {pooled}"
        );
    }
}

#[test]
fn two_qutrit_pauli_with_depolarizing_noise_matches_oracle() {
    let dims = vec![dim(3), dim(3)];
    let basis = OperatorBasis::build_tensor(&dims).unwrap();
    let op = make_pauli(1, 2, dim(3))
        .unwrap()
        .tensor(&make_pauli(2, 0, dim(3)).unwrap());
    let gate = UnitaryGate::from_monomial(dims.clone(), &op).unwrap();
    let channel = QuantumChannel::depolarizing(dims.clone(), 0.05)
        .unwrap()
        .after_gate(&gate)
        .unwrap();
    let est = mc_estimate(&gate, &channel, &basis, 2000, 5, None).unwrap();
    let exact = est.exact_reference.unwrap();
    assert!(
        (est.raw_mean - exact).abs() <= 3.0 * est.stderr,
        "mean {} exact {exact} stderr {}",
        est.raw_mean,
        est.stderr
    );
}

#[test]
fn general_path_estimates_non_characterizable_gates() {
    let dims = vec![dim(2)];
    let basis = OperatorBasis::build(dim(2)).unwrap();
    let gate = UnitaryGate::random(dims.clone(), 420).unwrap();
    let channel = QuantumChannel::depolarizing(dims.clone(), 0.05)
        .unwrap()
        .after_gate(&gate)
        .unwrap();

    let rel = relevance_distribution(&gate, &basis).unwrap();
    assert!(!rel.minimal());
    assert!(rel.support() > 4);

    let exact = exact_average_fidelity(&gate, &channel).unwrap();
    let mut means = Vec::new();
    let mut stderrs = Vec::new();
    for seed in 0..50u64 {
        let est = mc_estimate(&gate, &channel, &basis, 800, seed, None).unwrap();
        means.push(est.raw_mean);
        stderrs.push(est.stderr);
    }
    let grand = means.iter().sum::<f64>() / means.len() as f64;
    let pooled = stderrs.iter().sum::<f64>() / stderrs.len() as f64 / (means.len() as f64).sqrt();
    assert!(
        (grand - exact).abs() < 4.0 * pooled,
        "grand {grand} exact {exact} pooled {pooled}"
    );
}

#[test]
fn shot_mode_converges_to_the_exact_path() {
    let dims = vec![dim(3)];
    let basis = OperatorBasis::build(dim(3)).unwrap();
    let gate = UnitaryGate::fourier(dims.clone()).unwrap();
    let channel = QuantumChannel::depolarizing(dims.clone(), 0.1)
        .unwrap()
        .after_gate(&gate)
        .unwrap();
    let exact = exact_average_fidelity(&gate, &channel).unwrap();

    let mut means = Vec::new();
    for seed in 0..20u64 {
        let est = mc_estimate(&gate, &channel, &basis, 600, seed, Some(64)).unwrap();
        means.push(est.raw_mean);
    }
    let grand = means.iter().sum::<f64>() / means.len() as f64;
    assert!((grand - exact).abs() < 0.01, "grand {grand} exact {exact}");
}
