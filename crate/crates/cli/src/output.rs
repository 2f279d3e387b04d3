//! Report types emitted by the subcommands, with JSON and text renderings.

use std::collections::BTreeMap;

use serde::Serialize;

use qudit_mub::classify::ClassificationReport;
use qudit_mub::fidelity::{FidelityEstimate, RelevanceSummary};
use qudit_mub::mub::{DiagonalReport, KnightCensus, KnightResult, MubReport};
use qudit_mub::pauli::OperatorBasis;

#[derive(Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub dims: Vec<usize>,
    pub total_dimension: usize,
    pub elements: usize,
    pub checks: Vec<Check>,
    pub pass: bool,
}

/// Audit a basis: element count, label uniqueness, exact unitarity, exact
/// pairwise orthonormality, exact tracelessness, and per-factor spectra.
pub fn verify_basis(basis: &OperatorBasis) -> VerifyReport {
    let total = basis.total_dimension();
    let mut checks = Vec::new();

    let expected = total * total;
    checks.push(Check {
        name: "element-count",
        pass: basis.len() == expected,
        detail: format!("{} elements, expected {expected}", basis.len()),
    });

    let mut labels: Vec<_> = basis.elements().iter().map(|e| &e.label).collect();
    labels.sort_by_key(|l| format!("{l}"));
    labels.dedup();
    let identity_present = basis
        .elements()
        .iter()
        .any(|e| e.label.is_identity() && e.op.is_identity());
    checks.push(Check {
        name: "labels",
        pass: labels.len() == basis.len() && identity_present,
        detail: format!(
            "{} distinct labels, identity present: {identity_present}",
            labels.len()
        ),
    });

    let non_unitary = basis
        .elements()
        .iter()
        .filter(|e| {
            !e.op
                .multiply(&e.op.adjoint())
                .map(|p| p.is_identity())
                .unwrap_or(false)
        })
        .count();
    checks.push(Check {
        name: "unitarity",
        pass: non_unitary == 0,
        detail: format!("{non_unitary} elements fail M·M† = 1"),
    });

    let mut ortho_failures = 0;
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            let ok = basis
                .element(i)
                .op
                .hs_inner(&basis.element(j).op)
                .map(|v| v.is_delta(i == j))
                .unwrap_or(false);
            if !ok {
                ortho_failures += 1;
            }
        }
    }
    checks.push(Check {
        name: "orthonormality",
        pass: ortho_failures == 0,
        detail: format!(
            "{ortho_failures} of {} pairs off the exact delta",
            basis.len() * basis.len()
        ),
    });

    let trace_failures = basis
        .elements()
        .iter()
        .filter(|e| !e.label.is_identity() && !e.op.trace_exact().is_zero())
        .count();
    checks.push(Check {
        name: "tracelessness",
        pass: trace_failures == 0,
        detail: format!("{trace_failures} non-identity elements with nonzero trace"),
    });

    let mut spectrum_failures = 0;
    for e in basis.elements() {
        if e.label.is_identity() {
            continue;
        }
        match basis.factor_ops(&e.label) {
            Ok(factors) => {
                for f in factors {
                    if !f.is_identity() && !f.spectrum().is_dnary_up_to_phase() {
                        spectrum_failures += 1;
                    }
                }
            }
            Err(_) => spectrum_failures += 1,
        }
    }
    checks.push(Check {
        name: "dnary-spectrum",
        pass: spectrum_failures == 0,
        detail: format!("{spectrum_failures} factors off the d-th roots of unity"),
    });

    let pass = checks.iter().all(|c| c.pass);
    VerifyReport {
        dims: basis.dims().iter().map(|d| d.get()).collect(),
        total_dimension: total,
        elements: basis.len(),
        checks,
        pass,
    }
}

impl VerifyReport {
    pub fn text(&self) -> String {
        let mut out = format!(
            "basis audit: dims {:?} (D = {}), {} elements\n",
            self.dims, self.total_dimension, self.elements
        );
        for c in &self.checks {
            out.push_str(&format!(
                "  [{}] {}: {}\n",
                if c.pass { "pass" } else { "FAIL" },
                c.name,
                c.detail
            ));
        }
        out.push_str(if self.pass { "PASS\n" } else { "FAIL\n" });
        out
    }
}

#[derive(Serialize)]
pub struct BasisReport {
    #[serde(flatten)]
    pub basis: OperatorBasis,
}

impl BasisReport {
    pub fn text(&self) -> String {
        let labels: Vec<String> = self
            .basis
            .elements()
            .iter()
            .map(|e| format!("{}", e.label))
            .collect();
        format!(
            "operator basis: dims {:?} (D = {}), {} elements\n{}\n",
            self.basis
                .dims()
                .iter()
                .map(|d| d.get())
                .collect::<Vec<_>>(),
            self.basis.total_dimension(),
            self.basis.len(),
            labels.join(" ")
        )
    }
}

#[derive(Serialize)]
pub struct PartitionReport {
    pub d: usize,
    pub families: serde_json::Value,
    pub verification: MubReport,
}

impl PartitionReport {
    pub fn text(&self) -> String {
        format!(
            "partition: d = {}, {} families\n  max cross-overlap deviation from 1/d: {:.3e}\n  max intra-family Gram deviation: {:.3e}\n{}\n",
            self.d,
            self.families["families"].as_array().map_or(0, |f| f.len()),
            self.verification.max_cross_dev,
            self.verification.max_gram_dev,
            if self.verification.pass { "PASS" } else { "FAIL" }
        )
    }
}

#[derive(Serialize)]
pub struct KnightEntry {
    pub b: usize,
    pub outcome: KnightResult,
    /// Diagonal occupancy report, present when the construction succeeded.
    pub diagonal: Option<DiagonalReport>,
    /// Permutation (row and column) validity of the outcome.
    pub unitary: bool,
}

#[derive(Serialize)]
pub struct KnightCommandReport {
    pub d: usize,
    pub prime: bool,
    pub results: Vec<KnightEntry>,
    /// Exhaustive census over all diagonal-complete permutation matrices,
    /// attached for prime d ≤ 7.
    pub census: Option<KnightCensus>,
}

impl KnightCommandReport {
    pub fn text(&self) -> String {
        let mut out = format!(
            "change-of-basis matrices: d = {} (prime: {})\n",
            self.d, self.prime
        );
        for e in &self.results {
            match &e.outcome {
                KnightResult::Matrix(m) => {
                    let diag = e.diagonal.as_ref().expect("matrix entries carry a report");
                    out.push_str(&format!(
                        "  b = {}: rows -> {:?}, diagonals {:?}, diagonal property {}\n",
                        e.b,
                        m.row_targets(),
                        diag.c.entries(),
                        if diag.pass { "pass" } else { "FAIL" }
                    ));
                }
                KnightResult::Violation(v) => {
                    out.push_str(&format!(
                        "  b = {}: violation — {:?} at index {} (rows {:?})\n",
                        e.b, v.kind, v.index, v.rows
                    ));
                }
            }
        }
        if let Some(census) = &self.census {
            out.push_str(&format!(
                "  census: {} diagonal-complete permutation matrices fixing (0,0); construction gives {}; sets match: {}\n",
                census.count,
                census.construction.len(),
                census.matches_construction
            ));
        }
        out
    }
}

#[derive(Serialize)]
pub struct ClassifyCommandReport {
    pub gate: String,
    pub dims: Vec<usize>,
    pub report: ClassificationReport,
    pub cycle_histogram: Option<BTreeMap<usize, usize>>,
}

impl ClassifyCommandReport {
    pub fn text(&self) -> String {
        let mut out = format!(
            "classification: gate {:?} on dims {:?}\n  characterizable: {}\n",
            self.gate, self.dims, self.report.characterizable
        );
        if let Some(hist) = &self.cycle_histogram {
            let parts: Vec<String> = hist.iter().map(|(d, c)| format!("{c}×deg{d}")).collect();
            out.push_str(&format!("  cycles: {}\n", parts.join(", ")));
        } else {
            let unmatched = self
                .report
                .matches
                .iter()
                .filter(|m| m.target.is_none())
                .count();
            out.push_str(&format!(
                "  unmatched elements: {unmatched} (best stray fidelity {:.4})\n",
                self.report
                    .matches
                    .iter()
                    .filter(|m| m.target.is_none())
                    .map(|m| m.fidelity)
                    .fold(0.0, f64::max)
            ));
        }
        if let Some(p) = self.report.mub_preserving {
            out.push_str(&format!("  partition preserving: {p}\n"));
        }
        out
    }
}

#[derive(Serialize)]
pub struct EstimateCommandReport {
    pub gate: String,
    pub channel: String,
    pub dims: Vec<usize>,
    pub shots: Option<u32>,
    pub relevance: RelevanceSummary,
    pub estimate: FidelityEstimate,
}

impl EstimateCommandReport {
    pub fn text(&self) -> String {
        let e = &self.estimate;
        format!(
            "fidelity estimate: gate {:?}, channel {:?}, dims {:?}\n  samples {} seed {}{}\n  relevance support {} ({})\n  mean {:.10} ± {:.3e} (stderr)\n  exact reference {:.10}\n",
            self.gate,
            self.channel,
            self.dims,
            e.n_samples,
            e.seed,
            self.shots.map_or(String::new(), |s| format!(" shots {s}")),
            self.relevance.support,
            if self.relevance.minimal { "minimal" } else { "non-minimal" },
            e.mean,
            e.stderr,
            e.exact_reference.unwrap_or(f64::NAN)
        )
    }
}
