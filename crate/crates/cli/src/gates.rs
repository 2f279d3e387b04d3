//! Parsing of gate and channel specifications.
//!
//! Gates: `I`, `X`, `Z`, `F` (shift, clock, Fourier on the total dimension),
//! `pauli:a,b` (X^a Z^b on the total dimension), `csum` (|c,t⟩ ↦ |c,t⊕c⟩ on
//! two equal factors), `tensor:S1;S2;…` (one factor spec per subsystem),
//! `random:SEED`, or a path to a JSON file `{"dims": […], "matrix": rows of
//! [re, im] pairs}`.
//!
//! Channels: `none` (the gate applied perfectly), `depolarizing:p`,
//! `local-depolarizing:p`, `dephasing:g` — each named channel describes
//! noise composed after the gate — or a path to a JSON file
//! `{"dims": […], "kraus": [matrix…]}` holding the complete noisy
//! implementation, used as-is.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use qudit_mub::classify::UnitaryGate;
use qudit_mub::dense;
use qudit_mub::fidelity::QuantumChannel;
use qudit_mub::monomial::MonomialOperator;
use qudit_mub::pauli::{make_pauli, make_x, make_z};
use qudit_mub::zd::Dimension;

/// Factorize every entry into primes, so `6` becomes `2,3` and `4` becomes
/// `2,2`.
pub fn normalize_dims(raw: &[usize]) -> Result<Vec<Dimension>> {
    if raw.is_empty() {
        bail!("at least one dimension is required");
    }
    let mut dims = Vec::new();
    for &entry in raw {
        let d = Dimension::new(entry).map_err(|e| anyhow!("{e}"))?;
        for p in d.prime_factors() {
            dims.push(Dimension::new(p).expect("prime factors are at least 2"));
        }
    }
    Ok(dims)
}

fn total_dimension(dims: &[Dimension]) -> usize {
    dims.iter().map(|d| d.get()).product()
}

#[derive(Deserialize)]
struct GateFile {
    dims: Vec<usize>,
    matrix: Vec<Vec<[f64; 2]>>,
}

pub fn parse_gate(spec: &str, dims: &[Dimension], tol: f64) -> Result<UnitaryGate> {
    let total = Dimension::new(total_dimension(dims))?;
    let gate = match spec {
        "I" => UnitaryGate::new(dims.to_vec(), dense::identity(total.get()))?,
        "X" => UnitaryGate::from_monomial(dims.to_vec(), &make_x(total))?,
        "Z" => UnitaryGate::from_monomial(dims.to_vec(), &make_z(total))?,
        "F" => UnitaryGate::fourier(dims.to_vec())?,
        "csum" => csum_gate(dims)?,
        _ if spec.starts_with("pauli:") => {
            let (a, b) = parse_exponents(&spec["pauli:".len()..])?;
            UnitaryGate::from_monomial(dims.to_vec(), &make_pauli(a, b, total)?)?
        }
        _ if spec.starts_with("tensor:") => tensor_gate(&spec["tensor:".len()..], dims)?,
        _ if spec.starts_with("random:") => {
            let seed: u64 = spec["random:".len()..]
                .parse()
                .context("random gate seed must be an integer")?;
            UnitaryGate::random(dims.to_vec(), seed)?
        }
        path => gate_from_file(Path::new(path), dims, tol)?,
    };
    Ok(gate)
}

fn parse_exponents(text: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        bail!("expected pauli:a,b with two integer exponents, got {text:?}");
    }
    Ok((
        parts[0].parse().context("exponent a must be an integer")?,
        parts[1].parse().context("exponent b must be an integer")?,
    ))
}

fn csum_gate(dims: &[Dimension]) -> Result<UnitaryGate> {
    let [control, target] = dims else {
        bail!("csum needs exactly two subsystems, got {}", dims.len());
    };
    if control != target {
        bail!("csum needs two subsystems of equal dimension");
    }
    let d = control.get();
    let total = d * d;
    let perm: Vec<usize> = (0..total)
        .map(|idx| {
            let (c, t) = (idx / d, idx % d);
            c * d + (t + c) % d
        })
        .collect();
    let op = MonomialOperator::new(Dimension::new(total)?, perm, vec![0; total])?;
    Ok(UnitaryGate::from_monomial(dims.to_vec(), &op)?)
}

fn tensor_gate(body: &str, dims: &[Dimension]) -> Result<UnitaryGate> {
    let specs: Vec<&str> = body.split(';').collect();
    if specs.len() != dims.len() {
        bail!(
            "tensor gate has {} factor specs but there are {} subsystems",
            specs.len(),
            dims.len()
        );
    }
    let mut factors = Vec::new();
    for (spec, &d) in specs.iter().zip(dims) {
        let gate = match *spec {
            "I" => UnitaryGate::new(vec![d], dense::identity(d.get()))?,
            "X" => UnitaryGate::from_monomial(vec![d], &make_x(d))?,
            "Z" => UnitaryGate::from_monomial(vec![d], &make_z(d))?,
            "F" => UnitaryGate::fourier(vec![d])?,
            s if s.starts_with("pauli:") => {
                let (a, b) = parse_exponents(&s["pauli:".len()..])?;
                UnitaryGate::from_monomial(vec![d], &make_pauli(a, b, d)?)?
            }
            other => bail!("unknown tensor factor spec {other:?}"),
        };
        factors.push(gate);
    }
    Ok(UnitaryGate::tensor(&factors)?)
}

fn gate_from_file(path: &Path, dims: &[Dimension], tol: f64) -> Result<UnitaryGate> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("unknown gate spec or unreadable file {}", path.display()))?;
    let file: GateFile = serde_json::from_str(&text)
        .with_context(|| format!("malformed gate file {}", path.display()))?;
    let file_total: usize = file.dims.iter().product();
    if file_total != total_dimension(dims) {
        bail!(
            "gate file is {file_total}-dimensional but --dims gives {}",
            total_dimension(dims)
        );
    }
    let matrix = dense::from_re_im_rows(&file.matrix)
        .ok_or_else(|| anyhow!("ragged matrix in {}", path.display()))?;
    Ok(UnitaryGate::with_tolerance(dims.to_vec(), matrix, tol)?)
}

pub fn parse_channel(spec: &str, dims: &[Dimension], gate: &UnitaryGate) -> Result<QuantumChannel> {
    let channel = match spec {
        "none" => QuantumChannel::unitary_error(dims.to_vec(), gate.matrix().clone())?,
        _ if spec.starts_with("depolarizing:") => {
            let p: f64 = spec["depolarizing:".len()..]
                .parse()
                .context("depolarizing strength must be a number")?;
            QuantumChannel::depolarizing(dims.to_vec(), p)?.after_gate(gate)?
        }
        _ if spec.starts_with("local-depolarizing:") => {
            let p: f64 = spec["local-depolarizing:".len()..]
                .parse()
                .context("depolarizing strength must be a number")?;
            QuantumChannel::local_depolarizing(dims.to_vec(), p)?.after_gate(gate)?
        }
        _ if spec.starts_with("dephasing:") => {
            let g: f64 = spec["dephasing:".len()..]
                .parse()
                .context("dephasing strength must be a number")?;
            QuantumChannel::dephasing(dims.to_vec(), g)?.after_gate(gate)?
        }
        path => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("unknown channel spec or unreadable file {path}"))?;
            let channel: QuantumChannel = serde_json::from_str(&text)
                .with_context(|| format!("malformed channel file {path}"))?;
            if channel.total_dimension() != total_dimension(dims) {
                bail!(
                    "channel file is {}-dimensional but --dims gives {}",
                    channel.total_dimension(),
                    total_dimension(dims)
                );
            }
            channel
        }
    };
    Ok(channel)
}
