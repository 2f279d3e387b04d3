//! Kraus-operator channel simulation and Monte Carlo estimation of the
//! average gate fidelity, with exact reference values.
//!
//! The estimator samples basis-index pairs from the relevance distribution
//! induced by the ideal gate. For gates that conjugate the basis onto itself
//! the distribution is uniform over `D²` single indices and the per-sample
//! variance is bounded independently of `D`; for other gates the general
//! distribution over up to `D⁴` pairs is used and flagged as non-minimal.
//! Expectation values are evaluated by exact Kraus contraction; an optional
//! shot mode replaces them with multinomial outcome sampling on the
//! measurement eigenbasis.

use num_complex::Complex64 as C64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::classify::{classify, UnitaryGate};
use crate::dense::{self, CMatrix, CVector};
use crate::mub::AbelianFamily;
use crate::pauli::OperatorBasis;
use crate::zd::Dimension;
use crate::{Error, Result};

/// Trace-preservation tolerance on `Σ K† K = 1`.
pub const TP_TOL: f64 = 1e-9;
/// Pairs with squared coefficient magnitude below this are dropped from the
/// general relevance distribution (true zeros sit many orders lower).
const SUPPORT_CUTOFF: f64 = 1e-16;

// ---------------------------------------------------------------------------
// Channels
// ---------------------------------------------------------------------------

/// A completely positive trace-preserving map given by Kraus operators.
#[derive(Clone, Debug)]
pub struct QuantumChannel {
    dims: Vec<Dimension>,
    kraus: Vec<CMatrix>,
}

impl QuantumChannel {
    pub fn new(dims: Vec<Dimension>, kraus: Vec<CMatrix>) -> Result<Self> {
        let total: usize = dims.iter().map(|d| d.get()).product();
        if dims.is_empty() || kraus.is_empty() {
            return Err(Error::DimensionTooSmall(0));
        }
        for k in &kraus {
            if k.nrows() != total || k.ncols() != total {
                return Err(Error::DimensionMismatch(k.nrows(), total));
            }
        }
        let ch = Self { dims, kraus };
        let dev = ch.trace_preservation_deviation();
        if dev > TP_TOL {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(ch)
    }

    pub fn identity(dims: Vec<Dimension>) -> Self {
        let total: usize = dims.iter().map(|d| d.get()).product();
        Self {
            dims,
            kraus: vec![dense::identity(total)],
        }
    }

    /// The channel `ρ ↦ V ρ V†` for a unitary `V`.
    pub fn unitary_error(dims: Vec<Dimension>, v: CMatrix) -> Result<Self> {
        let dev = dense::unitarity_deviation(&v);
        if dev > TP_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Self::new(dims, vec![v])
    }

    /// Global depolarizing noise `ρ ↦ (1-p)ρ + p·Tr[ρ]·1/D`, realized by the
    /// identity plus all `D²` basis operators as weighted Kraus terms.
    pub fn depolarizing(dims: Vec<Dimension>, p: f64) -> Result<Self> {
        check_probability("p", p)?;
        if p == 0.0 {
            return Ok(Self::identity(dims));
        }
        let basis = OperatorBasis::build_tensor(&dims)?;
        let total = basis.total_dimension();
        let mut kraus = vec![dense::identity(total) * C64::new((1.0 - p).sqrt(), 0.0)];
        let w = C64::new((p / (total * total) as f64).sqrt(), 0.0);
        for e in basis.elements() {
            kraus.push(e.op.to_dense().entries() * w);
        }
        Self::new(dims, kraus)
    }

    /// Independent depolarizing noise of strength `p` on every tensor factor.
    pub fn local_depolarizing(dims: Vec<Dimension>, p: f64) -> Result<Self> {
        check_probability("p", p)?;
        let mut kraus: Vec<CMatrix> = vec![CMatrix::from_shape_fn((1, 1), |_| C64::new(1.0, 0.0))];
        for &d in &dims {
            let mut factor_kraus = vec![dense::identity(d.get()) * C64::new((1.0 - p).sqrt(), 0.0)];
            if p > 0.0 {
                let basis = OperatorBasis::build(d)?;
                let w = C64::new(p.sqrt() / d.get() as f64, 0.0);
                for e in basis.elements() {
                    factor_kraus.push(e.op.to_dense().entries() * w);
                }
            } else {
                factor_kraus = vec![dense::identity(d.get())];
            }
            kraus = kraus
                .iter()
                .flat_map(|acc| factor_kraus.iter().map(|f| dense::kron(acc, f)))
                .collect();
        }
        Self::new(dims, kraus)
    }

    /// Dephasing in the computational basis,
    /// `ρ ↦ (1-γ)ρ + γ·diag(ρ)`, via the clock powers `Z_D^k`.
    pub fn dephasing(dims: Vec<Dimension>, gamma: f64) -> Result<Self> {
        check_probability("gamma", gamma)?;
        let total: usize = dims.iter().map(|d| d.get()).product();
        if gamma == 0.0 {
            return Ok(Self::identity(dims));
        }
        let clock = crate::pauli::make_z(Dimension::new(total)?);
        let mut kraus = vec![dense::identity(total) * C64::new((1.0 - gamma).sqrt(), 0.0)];
        let w = C64::new((gamma / total as f64).sqrt(), 0.0);
        for k in 0..total {
            kraus.push(clock.pow(k).to_dense().entries() * w);
        }
        Self::new(dims, kraus)
    }

    /// The noisy implementation `ρ ↦ Λ(U ρ U†)` of a gate: every Kraus
    /// operator is right-multiplied by the gate matrix.
    pub fn after_gate(&self, gate: &UnitaryGate) -> Result<Self> {
        if gate.dims() != self.dims {
            return Err(Error::DimensionMismatch(
                gate.total_dimension(),
                self.total_dimension(),
            ));
        }
        let kraus = self.kraus.iter().map(|k| k.dot(gate.matrix())).collect();
        Self::new(self.dims.clone(), kraus)
    }

    pub fn dims(&self) -> &[Dimension] {
        &self.dims
    }

    pub fn total_dimension(&self) -> usize {
        self.dims.iter().map(|d| d.get()).product()
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// Apply the channel to an operator by Kraus contraction.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let n = self.total_dimension();
        let mut out = CMatrix::zeros((n, n));
        for k in &self.kraus {
            out = out + k.dot(rho).dot(&dense::dagger(k));
        }
        out
    }

    pub fn trace_preservation_deviation(&self) -> f64 {
        let n = self.total_dimension();
        let mut sum = CMatrix::zeros((n, n));
        for k in &self.kraus {
            sum = sum + dense::dagger(k).dot(k);
        }
        dense::max_abs_diff(&sum, &dense::identity(n))
    }
}

fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::ParameterRange {
            name,
            value,
            min: 0.0,
            max: 1.0,
        });
    }
    Ok(())
}

impl Serialize for QuantumChannel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Raw<'a> {
            dims: &'a [Dimension],
            kraus: Vec<Vec<Vec<[f64; 2]>>>,
        }
        Raw {
            dims: &self.dims,
            kraus: self.kraus.iter().map(dense::to_re_im_rows).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QuantumChannel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            dims: Vec<Dimension>,
            kraus: Vec<Vec<Vec<[f64; 2]>>>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let kraus = raw
            .kraus
            .iter()
            .map(|rows| {
                dense::from_re_im_rows(rows).ok_or_else(|| D::Error::custom("ragged matrix"))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        QuantumChannel::new(raw.dims, kraus).map_err(D::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Exact reference
// ---------------------------------------------------------------------------

/// Exact average gate fidelity of a channel against an ideal unitary, via the
/// entanglement fidelity `F_e = (1/D²) Σ_k |Tr[U† K_k]|²` and
/// `F_avg = (D·F_e + 1)/(D + 1)`.
pub fn exact_average_fidelity(gate: &UnitaryGate, channel: &QuantumChannel) -> Result<f64> {
    if gate.dims() != channel.dims() {
        return Err(Error::DimensionMismatch(
            gate.total_dimension(),
            channel.total_dimension(),
        ));
    }
    let d = gate.total_dimension() as f64;
    let u_dag = dense::dagger(gate.matrix());
    let mut fe = 0.0;
    for k in channel.kraus() {
        fe += dense::trace(&u_dag.dot(k)).norm_sqr();
    }
    fe /= d * d;
    Ok((d * fe + 1.0) / (d + 1.0))
}

pub(crate) fn avg_from_entanglement(fe: f64, d: f64) -> f64 {
    (d * fe + 1.0) / (d + 1.0)
}

// ---------------------------------------------------------------------------
// Relevance distribution
// ---------------------------------------------------------------------------

/// One sampled index pair `(i, j)` with its basis-expansion coefficient
/// `c_ij = ⟨M_j, U M_i U†⟩`.
#[derive(Clone, Debug)]
pub struct RelevancePair {
    pub source: usize,
    pub target: usize,
    pub coefficient: C64,
}

/// Sampling distribution over basis-index pairs with weights `|c_ij|² / D²`.
///
/// For characterizable gates the support collapses to `D²` pairs `(i, j(i))`
/// with exactly equal weights, stored without explicit float weights so each
/// weight is the exact rational `1/D²`.
#[derive(Clone, Debug)]
pub struct RelevanceDistribution {
    minimal: bool,
    pairs: Vec<RelevancePair>,
    weights: Option<Vec<f64>>,
}

impl RelevanceDistribution {
    /// Minimal support (`D²` equal-magnitude entries)?
    pub fn minimal(&self) -> bool {
        self.minimal
    }

    pub fn is_uniform(&self) -> bool {
        self.weights.is_none()
    }

    pub fn support(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[RelevancePair] {
        &self.pairs
    }

    /// Weight of the k-th pair; exactly `1/support` in the uniform case.
    pub fn weight(&self, k: usize) -> f64 {
        match &self.weights {
            None => 1.0 / self.pairs.len() as f64,
            Some(w) => {
                let total: f64 = w.iter().sum();
                w[k] / total
            }
        }
    }

    pub fn summary(&self) -> RelevanceSummary {
        RelevanceSummary {
            minimal: self.minimal,
            uniform: self.is_uniform(),
            support: self.support(),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RelevanceSummary {
    pub minimal: bool,
    pub uniform: bool,
    pub support: usize,
}

/// The sampling distribution induced by a gate: uniform over `D²` indices
/// when the gate conjugates the basis onto itself, otherwise the general
/// pair distribution with weights `|⟨M_j, U M_i U†⟩|²/D²`, flagged
/// non-minimal.
pub fn relevance_distribution(
    gate: &UnitaryGate,
    basis: &OperatorBasis,
) -> Result<RelevanceDistribution> {
    let report = classify(gate, basis)?;
    if report.characterizable {
        let pairs = report
            .matches
            .iter()
            .map(|m| RelevancePair {
                source: m.source,
                target: m.target.expect("characterizable"),
                coefficient: m.phase * m.fidelity,
            })
            .collect();
        return Ok(RelevanceDistribution {
            minimal: true,
            pairs,
            weights: None,
        });
    }

    let adjoint = dense::dagger(gate.matrix());
    let mut pairs = Vec::new();
    let mut weights = Vec::new();
    for i in 0..basis.len() {
        let m = basis.element(i).op.to_dense();
        let conjugated = gate.matrix().dot(m.entries()).dot(&adjoint);
        for (j, c) in basis.coefficients(&conjugated).into_iter().enumerate() {
            let w = c.norm_sqr();
            if w > SUPPORT_CUTOFF {
                pairs.push(RelevancePair {
                    source: i,
                    target: j,
                    coefficient: c,
                });
                weights.push(w);
            }
        }
    }
    Ok(RelevanceDistribution {
        minimal: false,
        pairs,
        weights: Some(weights),
    })
}

// ---------------------------------------------------------------------------
// Monte Carlo estimation
// ---------------------------------------------------------------------------

/// Monte Carlo estimate of the average gate fidelity.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FidelityEstimate {
    /// Estimated average fidelity, clamped to `[0, 1]`.
    pub mean: f64,
    /// The unclamped estimator mean.
    pub raw_mean: f64,
    /// Sample standard deviation of the per-draw values divided by `√n`,
    /// propagated to the average-fidelity scale.
    pub stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub exact_reference: Option<f64>,
}

/// Per-draw RNG: one independent ChaCha stream per sample index, so the
/// estimate is identical no matter how draws are scheduled across threads.
fn stream_rng(seed: u64, t: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(t);
    rng
}

/// Estimate the average fidelity of `channel` against `gate` by sampling
/// `n_samples` index pairs from the relevance distribution; deterministic
/// given `seed`. With `shots = Some(s)`, each draw additionally samples an
/// input eigenstate and `s` measurement outcomes instead of using the exact
/// expectation value.
pub fn mc_estimate(
    gate: &UnitaryGate,
    channel: &QuantumChannel,
    basis: &OperatorBasis,
    n_samples: usize,
    seed: u64,
    shots: Option<u32>,
) -> Result<FidelityEstimate> {
    if n_samples == 0 {
        return Err(Error::NoSamples);
    }
    if gate.dims() != basis.dims() || channel.dims() != basis.dims() {
        return Err(Error::DimensionMismatch(
            gate.total_dimension(),
            basis.total_dimension(),
        ));
    }
    let dev = channel.trace_preservation_deviation();
    if dev > TP_TOL {
        return Err(Error::NotTracePreserving(dev));
    }

    let relevance = relevance_distribution(gate, basis)?;
    let total_dim = basis.total_dimension();

    // Exact per-pair tables; sampling then only draws indices (and outcomes
    // in shot mode).
    let channel_outputs: Vec<Option<CMatrix>> = {
        let mut needed = vec![false; basis.len()];
        for p in relevance.pairs() {
            needed[p.source] = true;
        }
        needed
            .into_par_iter()
            .enumerate()
            .map(|(i, used)| used.then(|| channel.apply(basis.element(i).op.to_dense().entries())))
            .collect()
    };
    let pair_values: Vec<f64> = relevance
        .pairs()
        .par_iter()
        .map(|p| {
            let out = channel_outputs[p.source].as_ref().expect("precomputed");
            let y = basis.inner_with_dense(p.target, out);
            (y / p.coefficient).re
        })
        .collect();

    let shot_tables = match shots {
        None => None,
        Some(s) => {
            if s == 0 {
                return Err(Error::NoSamples);
            }
            Some(build_shot_tables(channel, basis, &relevance)?)
        }
    };

    let weighted = relevance
        .weights()
        .map(|w| WeightedIndex::new(w).expect("non-empty positive weights"));

    let xs: Vec<f64> = (0..n_samples as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, t);
            let pair_idx = match &weighted {
                None => rng.gen_range(0..relevance.support()),
                Some(w) => w.sample(&mut rng),
            };
            match (&shot_tables, shots) {
                (Some(tables), Some(s)) => tables[pair_idx].sample(&mut rng, s),
                _ => pair_values[pair_idx],
            }
        })
        .collect();

    let n = n_samples as f64;
    let mean_fe = xs.iter().sum::<f64>() / n;
    let var = if n_samples > 1 {
        xs.iter().map(|x| (x - mean_fe).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let stderr_fe = (var / n).sqrt();

    let d = total_dim as f64;
    let raw_mean = avg_from_entanglement(mean_fe, d);
    let stderr = stderr_fe * d / (d + 1.0);
    Ok(FidelityEstimate {
        mean: raw_mean.clamp(0.0, 1.0),
        raw_mean,
        stderr,
        n_samples,
        seed,
        exact_reference: Some(exact_average_fidelity(gate, channel)?),
    })
}

impl RelevanceDistribution {
    fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }
}

/// Shot-mode table for one pair: input eigenvalues, measurement eigenvalues,
/// and the exact outcome distribution for every input eigenstate.
struct ShotTable {
    inv_coefficient: C64,
    input_eigenvalues: Vec<C64>,
    output_eigenvalues: Vec<C64>,
    /// `probs[k][m]`: probability of outcome `m` when preparing input
    /// eigenstate `k`.
    probs: Vec<Vec<f64>>,
}

impl ShotTable {
    fn sample<R: Rng>(&self, rng: &mut R, shots: u32) -> f64 {
        let dim = self.input_eigenvalues.len();
        let k = rng.gen_range(0..dim);
        let probs = &self.probs[k];
        let mut acc = C64::new(0.0, 0.0);
        for _ in 0..shots {
            let mut u: f64 = rng.gen();
            let mut outcome = dim - 1;
            for (m, &p) in probs.iter().enumerate() {
                if u < p {
                    outcome = m;
                    break;
                }
                u -= p;
            }
            acc += self.output_eigenvalues[outcome].conj();
        }
        (self.input_eigenvalues[k] * acc * self.inv_coefficient).re / shots as f64
    }
}

fn build_shot_tables(
    channel: &QuantumChannel,
    basis: &OperatorBasis,
    relevance: &RelevanceDistribution,
) -> Result<Vec<ShotTable>> {
    let eigensystems: Vec<(Vec<C64>, CMatrix)> = (0..basis.len())
        .map(|i| element_eigensystem(basis, i))
        .collect::<Result<Vec<_>>>()?;
    relevance
        .pairs()
        .par_iter()
        .map(|p| {
            let (in_vals, in_vecs) = &eigensystems[p.source];
            let (out_vals, out_vecs) = &eigensystems[p.target];
            let dim = in_vals.len();
            let probs: Vec<Vec<f64>> = (0..dim)
                .map(|k| {
                    let v = in_vecs.column(k).to_owned();
                    let rho = channel.apply(&dense::outer(&v, &v));
                    let mut row: Vec<f64> = (0..dim)
                        .map(|m| {
                            let w = out_vecs.column(m).to_owned();
                            dense::inner(&w, &rho.dot(&w)).re.max(0.0)
                        })
                        .collect();
                    let total: f64 = row.iter().sum();
                    for p in row.iter_mut() {
                        *p /= total;
                    }
                    row
                })
                .collect();
            Ok(ShotTable {
                inv_coefficient: C64::new(1.0, 0.0) / p.coefficient,
                input_eigenvalues: in_vals.clone(),
                output_eigenvalues: out_vals.clone(),
                probs,
            })
        })
        .collect()
}

/// Eigen-decomposition of a basis element from its per-factor structure:
/// identity factors contribute the computational basis with unit
/// eigenvalues, every other factor its analytic ordered eigenbasis.
pub fn element_eigensystem(basis: &OperatorBasis, index: usize) -> Result<(Vec<C64>, CMatrix)> {
    let label = &basis.element(index).label;
    let factor_ops = basis.factor_ops(label)?;
    let mut values = vec![C64::new(1.0, 0.0)];
    let mut vectors: Option<CMatrix> = None;
    for op in &factor_ops {
        let d = op.dimension().get();
        let (factor_values, factor_vectors) = if op.is_identity() {
            (vec![C64::new(1.0, 0.0); d], dense::identity(d))
        } else {
            let eb = op.eigenbasis()?;
            let gauge = eb.gauge().as_complex();
            let vals = (0..d)
                .map(|k| gauge * crate::zd::PhaseExp::new(k as i64, d).as_complex())
                .collect();
            (vals, eb.columns().clone())
        };
        values = values
            .iter()
            .flat_map(|&v| factor_values.iter().map(move |&f| v * f))
            .collect();
        vectors = Some(match vectors {
            None => factor_vectors,
            Some(acc) => dense::kron(&acc, &factor_vectors),
        });
    }
    Ok((values, vectors.expect("at least one factor")))
}

// ---------------------------------------------------------------------------
// Input states
// ---------------------------------------------------------------------------

/// The `d` eigenstates of a family, used as preparation states.
pub fn eigenstate_inputs(family: &AbelianFamily) -> Vec<CVector> {
    family.eigenbasis().vectors()
}

/// Product preparation states of per-factor families, in mixed-radix order.
pub fn product_eigenstate_inputs(families: &[&AbelianFamily]) -> Vec<CVector> {
    let mut states: Vec<CVector> = vec![CVector::from_elem(1, C64::new(1.0, 0.0))];
    for family in families {
        let vectors = family.eigenbasis().vectors();
        states = states
            .iter()
            .flat_map(|s| vectors.iter().map(|v| dense::kron_vec(s, v)))
            .collect();
    }
    states
}
