//! Run reports: a machine-readable JSON document (one per run, on stdout)
//! or a human-readable text rendering.
//!
//! Machine output is byte-deterministic for identical command line, input
//! file, and seed. Every floating value is printed with 17 significant
//! digits, which round-trips f64 losslessly.

use cohassist::coherence::CoherenceReport;
use cohassist::protocol::{Mode, ProtocolTranscript, SampleStats};
use cohassist::saturation::{SaturationCertificate, Verdict};
use cohassist::states::PureEnsemble;
use serde::Serialize;

#[derive(Serialize)]
pub struct RunReport {
    pub tool: ToolInfo,
    /// Command echo: the argv of this invocation.
    pub command: Vec<String>,
    pub input: InputInfo,
    pub params: Params,
    pub results: Results,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Serialize)]
pub struct InputInfo {
    pub path: String,
    pub sha256: String,
    pub dim: usize,
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
}

#[derive(Serialize)]
pub struct Params {
    pub tol: f64,
    pub log_base: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Results {
    Validate {
        valid: bool,
        dim: usize,
        trace: f64,
        eigenvalues: Vec<f64>,
    },
    Measures {
        c_r: f64,
        c_l1: f64,
        c_a_infinity: f64,
    },
    Assist {
        lower_bound: f64,
        c_a_infinity: f64,
        gap: f64,
        witness: EnsembleOut,
    },
    Saturate {
        verdict: String,
        method: String,
        residual_mix: f64,
        residual_diag: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        optimizer_lower_bound: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        witness: Option<EnsembleOut>,
    },
    Protocol {
        strategy: String,
        mode: String,
        ceiling: f64,
        average_coherence: f64,
        used_fallback: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        saturation_method: Option<String>,
        outcomes: Vec<OutcomeOut>,
        #[serde(skip_serializing_if = "Option::is_none")]
        sample_stats: Option<SampleStatsOut>,
    },
}

#[derive(Serialize)]
pub struct EnsembleOut {
    pub members: Vec<MemberOut>,
}

#[derive(Serialize)]
pub struct MemberOut {
    pub weight: f64,
    pub amplitudes: Vec<[f64; 2]>,
}

#[derive(Serialize)]
pub struct OutcomeOut {
    pub probability: f64,
    pub coherence: f64,
    pub amplitudes: Vec<[f64; 2]>,
}

#[derive(Serialize)]
pub struct SampleStatsOut {
    pub shots: u64,
    pub counts: Vec<u64>,
    pub empirical_average: f64,
    pub std_error: f64,
}

impl EnsembleOut {
    pub fn from_ensemble(ens: &PureEnsemble) -> Self {
        Self {
            members: ens
                .members()
                .iter()
                .map(|(w, s)| MemberOut {
                    weight: *w,
                    amplitudes: s.amps().iter().map(|z| [z.re, z.im]).collect(),
                })
                .collect(),
        }
    }
}

impl Results {
    pub fn from_measures(report: &CoherenceReport) -> Self {
        Results::Measures {
            c_r: report.c_r,
            c_l1: report.c_l1,
            c_a_infinity: report.c_a_infinity,
        }
    }

    pub fn from_certificate(cert: &SaturationCertificate) -> Self {
        Results::Saturate {
            verdict: verdict_name(cert.verdict).to_string(),
            method: cert.method.to_string(),
            residual_mix: cert.residual_mix,
            residual_diag: cert.residual_diag,
            optimizer_lower_bound: cert.optimizer_lower_bound,
            witness: cert.witness.as_ref().map(EnsembleOut::from_ensemble),
        }
    }

    pub fn from_transcript(transcript: &ProtocolTranscript, strategy: &str) -> Self {
        Results::Protocol {
            strategy: strategy.to_string(),
            mode: match transcript.mode {
                Mode::Enumerate => "enumerate".to_string(),
                Mode::Sample { .. } => "sample".to_string(),
            },
            ceiling: transcript.ceiling,
            average_coherence: transcript.average_coherence,
            used_fallback: transcript.used_fallback,
            saturation_method: transcript.saturation_method.map(|m| m.to_string()),
            outcomes: transcript
                .outcomes
                .iter()
                .map(|o| OutcomeOut {
                    probability: o.probability,
                    coherence: o.coherence,
                    amplitudes: o.state.amps().iter().map(|z| [z.re, z.im]).collect(),
                })
                .collect(),
            sample_stats: transcript.sample_stats.as_ref().map(SampleStatsOut::from),
        }
    }
}

impl From<&SampleStats> for SampleStatsOut {
    fn from(s: &SampleStats) -> Self {
        Self {
            shots: s.shots,
            counts: s.counts.clone(),
            empirical_average: s.empirical_average,
            std_error: s.std_error,
        }
    }
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Saturated => "saturated",
        Verdict::NotFound => "not-found",
        Verdict::Infeasible => "infeasible",
    }
}

/// JSON with every f64 printed as `{:.16e}` (17 significant digits).
pub fn to_machine_json(report: &RunReport) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits17);
    report.serialize(&mut ser).expect("report serialization");
    String::from_utf8(buf).expect("json is utf-8")
}

struct SigDigits17;

impl serde_json::ser::Formatter for SigDigits17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.7e}")
    }
}

/// Plain-text rendering of the same report.
pub fn to_human_text(report: &RunReport) -> String {
    let mut out = String::new();
    let push = |out: &mut String, line: String| {
        out.push_str(&line);
        out.push('\n');
    };
    push(
        &mut out,
        format!("{} {}", report.tool.name, report.tool.version),
    );
    push(
        &mut out,
        format!(
            "input: {} (dim {}, sha256 {})",
            report.input.path,
            report.input.dim,
            &report.input.sha256[..16]
        ),
    );
    if let Some(label) = &report.input.label {
        push(&mut out, format!("label: {label}"));
    }
    let seed = report
        .params
        .seed
        .map_or(String::from("-"), |s| s.to_string());
    push(
        &mut out,
        format!(
            "tol: {:e}  log base: {}  seed: {}",
            report.params.tol, report.params.log_base, seed
        ),
    );
    match &report.results {
        Results::Validate {
            valid,
            dim,
            trace,
            eigenvalues,
        } => {
            push(&mut out, format!("valid: {valid} (dim {dim}, trace {trace:.12})"));
            let evs: Vec<String> = eigenvalues.iter().map(|l| format!("{l:.12}")).collect();
            push(&mut out, format!("eigenvalues: [{}]", evs.join(", ")));
        }
        Results::Measures { c_r, c_l1, c_a_infinity } => {
            push(&mut out, format!("relative entropy coherence C_r   : {c_r:.12}"));
            push(&mut out, format!("l1 coherence                     : {c_l1:.12}"));
            push(&mut out, format!("regularized assistance S(Delta)  : {c_a_infinity:.12}"));
        }
        Results::Assist {
            lower_bound,
            c_a_infinity,
            gap,
            witness,
        } => {
            push(&mut out, format!("assistance lower bound : {lower_bound:.12}"));
            push(&mut out, format!("ceiling S(Delta(rho))  : {c_a_infinity:.12}"));
            push(&mut out, format!("gap to ceiling         : {gap:.3e}"));
            push(&mut out, format!("witness members        : {}", witness.members.len()));
            for (i, m) in witness.members.iter().enumerate() {
                push(&mut out, format!("  member {i}: weight {:.12}", m.weight));
            }
        }
        Results::Saturate {
            verdict,
            method,
            residual_mix,
            residual_diag,
            optimizer_lower_bound,
            witness,
        } => {
            push(&mut out, format!("verdict : {verdict} (method {method})"));
            push(
                &mut out,
                format!("residuals: mix {residual_mix:.3e}, diagonal {residual_diag:.3e}"),
            );
            if let Some(bound) = optimizer_lower_bound {
                push(&mut out, format!("optimizer lower bound: {bound:.12}"));
            }
            if let Some(w) = witness {
                push(&mut out, format!("witness members: {}", w.members.len()));
                for (i, m) in w.members.iter().enumerate() {
                    let amps: Vec<String> = m
                        .amplitudes
                        .iter()
                        .map(|[re, im]| format!("{re:+.6}{im:+.6}i"))
                        .collect();
                    push(
                        &mut out,
                        format!("  member {i}: weight {:.12}  [{}]", m.weight, amps.join(", ")),
                    );
                }
            }
        }
        Results::Protocol {
            strategy,
            mode,
            ceiling,
            average_coherence,
            used_fallback,
            saturation_method,
            outcomes,
            sample_stats,
        } => {
            push(&mut out, format!("strategy: {strategy}  mode: {mode}"));
            if let Some(m) = saturation_method {
                push(&mut out, format!("decomposition method: {m}"));
            }
            if *used_fallback {
                push(&mut out, "note: optimizer fallback decomposition".to_string());
            }
            push(&mut out, format!("ceiling S(Delta(rho_B)) : {ceiling:.12}"));
            push(&mut out, format!("average coherence       : {average_coherence:.12}"));
            for (i, o) in outcomes.iter().enumerate() {
                push(
                    &mut out,
                    format!(
                        "  outcome {i}: p = {:.12}, coherence = {:.12}",
                        o.probability, o.coherence
                    ),
                );
            }
            if let Some(s) = sample_stats {
                push(&mut out, format!("sampled shots           : {}", s.shots));
                push(&mut out, format!("empirical average       : {:.12}", s.empirical_average));
                push(&mut out, format!("standard error          : {:.3e}", s.std_error));
                let counts: Vec<String> = s.counts.iter().map(|c| c.to_string()).collect();
                push(&mut out, format!("counts: [{}]", counts.join(", ")));
            }
        }
    }
    for w in &report.warnings {
        push(&mut out, format!("warning: {w}"));
    }
    out
}
