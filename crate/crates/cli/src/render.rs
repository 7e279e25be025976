//! JSON and CSV rendering with fixed float formatting.

use magnon_core::coherence::{CoherenceReport, SingleModeAverages};
use magnon_core::thermo::ThermoCurve;
use magnon_core::verify::VerifyReport;
use magnon_core::{AmplitudeTable, BlockDensityMatrix, MagnonStateSpec, SiteList, SubsystemSpec};
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// 17 significant digits in scientific notation.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serializes through [`format_float`]; non-finite values become `null`.
#[derive(Debug, Clone, Copy)]
pub struct Float(pub f64);

impl Serialize for Float {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(format_float(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

#[derive(Serialize)]
pub struct SpecEcho {
    #[serde(rename = "N")]
    chain: usize,
    m: usize,
    k_indices: Vec<usize>,
    k: Vec<Float>,
    #[serde(rename = "J")]
    coupling: Float,
    dilute_energy: Float,
}

impl SpecEcho {
    pub fn new(spec: &MagnonStateSpec) -> Self {
        SpecEcho {
            chain: spec.chain(),
            m: spec.magnons(),
            k_indices: spec.momentum().indices().to_vec(),
            k: spec.momentum().values().into_iter().map(Float).collect(),
            coupling: Float(spec.coupling()),
            dilute_energy: Float(spec.dilute_energy()),
        }
    }
}

#[derive(Serialize)]
struct Amplitude {
    sites: Vec<usize>,
    re: Float,
    im: Float,
}

#[derive(Serialize)]
pub struct StateDocument {
    command: &'static str,
    spec: SpecEcho,
    normalization: Float,
    dimension: usize,
    norm: Float,
    amplitudes: Vec<Amplitude>,
}

impl StateDocument {
    pub fn new(spec: &MagnonStateSpec, state: &AmplitudeTable) -> Self {
        let amplitudes = state
            .basis()
            .iter()
            .zip(state.amplitudes())
            .map(|(l, a)| Amplitude {
                sites: l.sites().to_vec(),
                re: Float(a.re),
                im: Float(a.im),
            })
            .collect();
        StateDocument {
            command: "state",
            spec: SpecEcho::new(spec),
            normalization: Float(state.normalization()),
            dimension: state.len(),
            norm: Float(state.norm_sqr().sqrt()),
            amplitudes,
        }
    }
}

#[derive(Serialize)]
struct Block {
    q: usize,
    dimension: usize,
    weight: Float,
    /// Labels of rows and columns: the occupied subsystem sites, numbered
    /// in the parent chain.
    basis: Vec<Vec<usize>>,
    /// Rows of `[re, im]` pairs.
    matrix: Vec<Vec<[Float; 2]>>,
}

/// Block basis relabeled from local positions `1..=n` to parent sites.
fn parent_labels(local: &SiteList, sub: &SubsystemSpec) -> Vec<usize> {
    local.sites().iter().map(|&i| sub.sites().sites()[i - 1]).collect()
}

#[derive(Serialize)]
pub struct ReduceDocument {
    command: &'static str,
    spec: SpecEcho,
    subsystem: Vec<usize>,
    method: &'static str,
    trace: Float,
    purity: Float,
    blocks: Vec<Block>,
}

impl ReduceDocument {
    pub fn new(spec: &MagnonStateSpec, rho: &BlockDensityMatrix, method: &'static str) -> Self {
        let sub = rho.subsystem();
        let blocks = rho
            .blocks()
            .iter()
            .map(|b| {
                let m = b.matrix();
                Block {
                    q: b.q(),
                    dimension: b.dim(),
                    weight: Float(b.weight()),
                    basis: b.basis().iter().map(|l| parent_labels(l, sub)).collect(),
                    matrix: (0..b.dim())
                        .map(|i| {
                            (0..b.dim())
                                .map(|j| [Float(m[(i, j)].re), Float(m[(i, j)].im)])
                                .collect()
                        })
                        .collect(),
                }
            })
            .collect();
        ReduceDocument {
            command: "reduce",
            spec: SpecEcho::new(spec),
            subsystem: sub.sites().sites().to_vec(),
            method,
            trace: Float(rho.trace()),
            purity: Float(rho.purity()),
            blocks,
        }
    }
}

#[derive(Serialize)]
pub struct SingleModeSection {
    averaged_c_l1: Float,
    averaged_c_r: Float,
    gap_c_l1: Float,
    gap_c_r: Float,
    /// `sum_q p(q) ln C(n, q)`, the block average of C_ln.
    averaged_c_ln: Float,
    /// `ln(1 + C_l1)` of the mixed state minus the block average.
    c_ln_jensen_gap: Float,
}

impl SingleModeSection {
    pub fn new(report: &CoherenceReport, averages: &SingleModeAverages) -> Self {
        SingleModeSection {
            averaged_c_l1: Float(averages.c_l1),
            averaged_c_r: Float(averages.c_r),
            gap_c_l1: Float((report.c_l1 - averages.c_l1).abs()),
            gap_c_r: Float((report.c_r - averages.c_r).abs()),
            averaged_c_ln: Float(averages.c_ln_averaged),
            c_ln_jensen_gap: Float(report.c_ln - averages.c_ln_averaged),
        }
    }
}

#[derive(Serialize)]
pub struct CoherenceDocument {
    command: &'static str,
    spec: SpecEcho,
    subsystem: Vec<usize>,
    method: &'static str,
    c_l1: Float,
    c_r: Float,
    c_ln: Float,
    effective_dimension: Float,
    basis_dimension: usize,
    single_mode: Option<SingleModeSection>,
}

impl CoherenceDocument {
    pub fn new(
        spec: &MagnonStateSpec,
        sub: &SubsystemSpec,
        method: &'static str,
        report: &CoherenceReport,
        single_mode: Option<SingleModeSection>,
    ) -> Self {
        CoherenceDocument {
            command: "coherence",
            spec: SpecEcho::new(spec),
            subsystem: sub.sites().sites().to_vec(),
            method,
            c_l1: Float(report.c_l1),
            c_r: Float(report.c_r),
            c_ln: Float(report.c_ln),
            effective_dimension: Float(report.effective_dimension),
            basis_dimension: report.basis_dimension,
            single_mode,
        }
    }
}

pub const THERMO_HEADER: [&str; 4] = ["beta_c", "u", "heat_capacity", "epsilon0"];

pub fn thermo_csv(curve: &ThermoCurve) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(THERMO_HEADER)?;
    for p in &curve.points {
        w.write_record([p.beta_c, p.u, p.heat_capacity, p.epsilon0].map(format_float))?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

#[derive(Serialize)]
struct FamilyLine {
    module: &'static str,
    family: &'static str,
    passed: bool,
    checks: usize,
    max_residual: Float,
    tolerance: Float,
    note: Option<String>,
}

#[derive(Serialize)]
pub struct VerifyDocument {
    command: &'static str,
    #[serde(rename = "N")]
    chain: usize,
    m: usize,
    seed: u64,
    trials: usize,
    passed: bool,
    families: Vec<FamilyLine>,
}

impl VerifyDocument {
    pub fn new(report: &VerifyReport) -> Self {
        VerifyDocument {
            command: "verify",
            chain: report.config.chain,
            m: report.config.magnons,
            seed: report.config.seed,
            trials: report.config.trials,
            passed: report.passed(),
            families: report
                .families
                .iter()
                .map(|f| FamilyLine {
                    module: f.module,
                    family: f.family,
                    passed: f.passed,
                    checks: f.checks,
                    max_residual: Float(f.max_residual),
                    tolerance: Float(f.tolerance),
                    note: f.note.clone(),
                })
                .collect(),
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("documents serialize")
}
