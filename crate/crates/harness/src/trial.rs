use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rigalign::alignment::{count_swap_events, feature_error};
use rigalign::graph::degree_stats;
use rigalign::graphgen::duplicate_rows;
use rigalign::model::expected_degree;
use rigalign::{
    align_features, align_linear, denoise, sample_correlated_pair, Error, ModelParams, NoiseParams,
    PermMode, Result,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Gnn,
    Linear,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Gnn => "gnn",
            Method::Linear => "linear",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "gnn" => Ok(Method::Gnn),
            "linear" => Ok(Method::Linear),
            other => Err(Error::Format(format!("unknown method `{other}`"))),
        }
    }
}

/// Parses a comma-separated method list such as `gnn,linear`.
pub fn parse_methods(s: &str) -> Result<Vec<Method>> {
    let mut out: Vec<Method> = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let m: Method = part.parse()?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(Error::Format("method list is empty".into()));
    }
    Ok(out)
}

/// Whether and how to count swap events per trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SwapCounting {
    #[default]
    Off,
    Exhaustive,
    Sampled(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialSpec {
    pub params: ModelParams,
    pub noise: NoiseParams,
    pub methods: Vec<Method>,
    pub seed: u64,
    pub perm_mode: PermMode,
    /// Sparsity handed to the denoiser instead of the true `s`.
    pub misspecified_s: Option<f64>,
    pub swaps: SwapCounting,
}

impl TrialSpec {
    pub fn new(params: ModelParams, noise: NoiseParams, methods: Vec<Method>, seed: u64) -> Result<Self> {
        if methods.is_empty() {
            return Err(Error::Format("at least one method is required".into()));
        }
        Ok(TrialSpec {
            params,
            noise,
            methods,
            seed,
            perm_mode: PermMode::Uniform,
            misspecified_s: None,
            swaps: SwapCounting::Off,
        })
    }

    pub fn with_seed(&self, seed: u64) -> TrialSpec {
        TrialSpec { seed, ..self.clone() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodOutcome {
    pub method: Method,
    pub align_error: f64,
    pub objective: f64,
    pub perfect: bool,
    /// Denoised `Z` of the first copy against `X` (gnn only).
    pub feat_rel_dist: Option<f64>,
    pub feat_exact: Option<bool>,
    pub swap_events: Option<u64>,
    /// Wall time of cost construction plus assignment solve.
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub seed: u64,
    pub n: usize,
    pub d: usize,
    pub s: f64,
    pub m: f64,
    pub t: u32,
    pub sigma: f64,
    pub q: f64,
    /// Mean degree of the first observed graph.
    pub mean_degree: f64,
    /// Rows of `X` that equal another row; tied rows inflate strict error.
    pub duplicate_rows: usize,
    /// `|mean_degree - expected| <= 5 * degree std dev`. Warn-only.
    pub degree_sane: bool,
    pub outcomes: Vec<MethodOutcome>,
}

impl TrialRecord {
    pub fn outcome(&self, method: Method) -> Option<&MethodOutcome> {
        self.outcomes.iter().find(|o| o.method == method)
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

pub fn run_trial(spec: &TrialSpec) -> Result<TrialRecord> {
    if spec.methods.is_empty() {
        return Err(Error::Format("at least one method is required".into()));
    }
    let params = &spec.params;
    let inst = sample_correlated_pair(params, spec.noise, spec.seed, spec.perm_mode);
    let truth = &inst.hidden_perm;

    let stats = degree_stats(inst.g.graph());
    let expected = expected_degree(params, spec.noise.q());
    let degree_sane = (stats.mean - expected).abs() <= 5.0 * stats.std_dev.max(1.0);

    let mut outcomes = Vec::with_capacity(spec.methods.len());
    for &method in &spec.methods {
        let outcome = match method {
            Method::Gnn => {
                let s = spec.misspecified_s.unwrap_or(params.s());
                let z = denoise(&inst.g, s, params.t())?;
                let z_prime = denoise(&inst.g_prime, s, params.t())?;
                let start = Instant::now();
                let mut res = align_features(&z, &z_prime)?;
                let runtime_ms = elapsed_ms(start);
                let align_error = res.score(truth)?;
                let fe = feature_error(&z, &inst.truth)?;
                let swap_events = match spec.swaps {
                    SwapCounting::Off => None,
                    mode => {
                        let aligned = z_prime.bits().gather_rows(truth.as_slice());
                        Some(count_swaps(z.bits(), &aligned, mode, spec.seed)?)
                    }
                };
                MethodOutcome {
                    method,
                    align_error,
                    objective: res.objective,
                    perfect: res.is_perfect().unwrap_or(false),
                    feat_rel_dist: Some(fe.relative_distance),
                    feat_exact: Some(fe.exact),
                    swap_events,
                    runtime_ms,
                }
            }
            Method::Linear => {
                let (y, y_prime) = (inst.g.features(), inst.g_prime.features());
                let start = Instant::now();
                let mut res = align_linear(y, y_prime)?;
                let runtime_ms = elapsed_ms(start);
                let align_error = res.score(truth)?;
                let swap_events = match spec.swaps {
                    SwapCounting::Off => None,
                    mode => {
                        let aligned = y_prime.gather_rows(truth.as_slice());
                        Some(count_swaps(y, &aligned, mode, spec.seed)?)
                    }
                };
                MethodOutcome {
                    method,
                    align_error,
                    objective: res.objective,
                    perfect: res.is_perfect().unwrap_or(false),
                    feat_rel_dist: None,
                    feat_exact: None,
                    swap_events,
                    runtime_ms,
                }
            }
        };
        outcomes.push(outcome);
    }

    Ok(TrialRecord {
        seed: spec.seed,
        n: params.n(),
        d: params.d(),
        s: params.s(),
        m: params.m(),
        t: params.t(),
        sigma: spec.noise.sigma(),
        q: spec.noise.q(),
        mean_degree: stats.mean,
        duplicate_rows: duplicate_rows(&inst.truth),
        degree_sane,
        outcomes,
    })
}

fn count_swaps<M: rigalign::alignment::RowInner>(a: &M, b: &M, mode: SwapCounting, seed: u64) -> Result<u64> {
    let budget = match mode {
        SwapCounting::Sampled(k) => Some(k),
        _ => None,
    };
    Ok(count_swap_events(a, b, budget, seed)?.count)
}
