use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use rigalign::rng::derive_indexed;
use rigalign::theory::recovery_condition;
use rigalign::{Error, ModelParams, NoiseParams, Result};

use crate::trial::{run_trial, Method, TrialRecord, TrialSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Sigma,
    Q,
    M,
    D,
}

impl Axis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Axis::Sigma => "sigma",
            Axis::Q => "q",
            Axis::M => "m",
            Axis::D => "d",
        }
    }

    /// The swept quantity as echoed in a record.
    pub fn value_of(&self, rec: &TrialRecord) -> f64 {
        match self {
            Axis::Sigma => rec.sigma,
            Axis::Q => rec.q,
            Axis::M => rec.m,
            Axis::D => rec.d as f64,
        }
    }

    /// `base` with this axis set to `value`. Moving `d` keeps `m` fixed and
    /// recomputes `s`; moving `m` recomputes `s` at fixed `d`.
    pub fn apply(&self, base: &TrialSpec, value: f64) -> Result<TrialSpec> {
        let mut spec = base.clone();
        let p = &base.params;
        match self {
            Axis::Sigma => spec.noise = NoiseParams::new(value, base.noise.q())?,
            Axis::Q => spec.noise = NoiseParams::new(base.noise.sigma(), value)?,
            Axis::M => spec.params = ModelParams::from_density(p.n(), p.d(), value, p.t())?,
            Axis::D => {
                if !(value.is_finite() && value >= 1.0) {
                    return Err(Error::Format(format!("d must be >= 1, got {value}")));
                }
                spec.params = ModelParams::from_density(p.n(), value.round() as usize, p.m(), p.t())?;
            }
        }
        Ok(spec)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigma" => Ok(Axis::Sigma),
            "q" => Ok(Axis::Q),
            "m" => Ok(Axis::M),
            "d" => Ok(Axis::D),
            other => Err(Error::Format(format!("unknown axis `{other}`"))),
        }
    }
}

/// Parses `a:b:step` into `a, a + step, ...` up to `b` inclusive. Values are
/// rounded to 12 decimals so `0.1:1:0.1` gives exactly `0.1, 0.2, ...`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Format(format!("grid must be `start:stop:step`, got `{s}`"));
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let [a, b, step] = parts[..] else {
        return Err(bad());
    };
    if !(a.is_finite() && b.is_finite() && step.is_finite() && step > 0.0) {
        return Err(bad());
    }
    if b < a {
        return Err(bad());
    }
    let count = ((b - a) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|k| ((a + k as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: TrialSpec,
    pub axis: Axis,
    pub grid: Vec<f64>,
    pub replicates: usize,
}

impl SweepSpec {
    /// Every trial of the sweep in output order: grid point major, replicate
    /// minor. Fails on the first grid value that does not validate.
    pub fn trials(&self) -> Result<Vec<TrialSpec>> {
        let mut out = Vec::with_capacity(self.grid.len() * self.replicates);
        for (k, &v) in self.grid.iter().enumerate() {
            let point = self.axis.apply(&self.base, v)?;
            for r in 0..self.replicates {
                out.push(point.with_seed(derive_indexed(self.base.seed, &[k as u64, r as u64])));
            }
        }
        Ok(out)
    }
}

/// Runs all trials on the current rayon pool. Records come back in
/// [`SweepSpec::trials`] order regardless of scheduling.
pub fn run_sweep(sweep: &SweepSpec) -> Result<Vec<TrialRecord>> {
    run_trials(&sweep.trials()?)
}

pub fn run_trials(specs: &[TrialSpec]) -> Result<Vec<TrialRecord>> {
    specs.par_iter().map(run_trial).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseCell {
    pub alpha: f64,
    pub beta: f64,
    pub m: f64,
    pub d: usize,
    pub s: f64,
    /// Set when the cell's parameters do not validate; no trials are run.
    pub skipped: Option<String>,
    /// Fraction of replicates with perfect recovery, per method.
    pub recovery_rate: Vec<(Method, f64)>,
    /// `min_term / (ln n + ln d)` of the recovery condition.
    pub margin_ratio: f64,
    pub condition_satisfied: bool,
}

/// Empirical perfect-recovery rates over `m = n^alpha`, `d = round(n^beta)`.
pub fn phase_diagram(
    alpha_grid: &[f64],
    beta_grid: &[f64],
    base: &TrialSpec,
    replicates: usize,
    margin_factor: f64,
) -> Vec<PhaseCell> {
    let n = base.params.n();
    let t = base.params.t();
    let nf = n as f64;
    let mut cells = Vec::new();
    for (ai, &alpha) in alpha_grid.iter().enumerate() {
        for (bi, &beta) in beta_grid.iter().enumerate() {
            let m = nf.powf(alpha);
            let d = (nf.powf(beta).round() as usize).max(1);
            let params = ModelParams::from_density(n, d, m, t);
            let mut cell = PhaseCell {
                alpha,
                beta,
                m,
                d,
                s: f64::NAN,
                skipped: None,
                recovery_rate: Vec::new(),
                margin_ratio: f64::NAN,
                condition_satisfied: false,
            };
            let params = match params {
                Ok(p) => p,
                Err(e) => {
                    cell.skipped = Some(e.to_string());
                    cells.push(cell);
                    continue;
                }
            };
            cell.s = params.s();
            let report = recovery_condition(&params, &base.noise, margin_factor);
            cell.margin_ratio = report.margin_ratio();
            cell.condition_satisfied = report.verdict == rigalign::theory::Verdict::Satisfied;
            let specs: Vec<TrialSpec> = (0..replicates)
                .map(|r| TrialSpec {
                    params,
                    seed: derive_indexed(base.seed, &[ai as u64, bi as u64, r as u64]),
                    ..base.clone()
                })
                .collect();
            match run_trials(&specs) {
                Ok(records) => {
                    cell.recovery_rate = base
                        .methods
                        .iter()
                        .map(|&meth| {
                            let hits = records
                                .iter()
                                .filter(|r| r.outcome(meth).is_some_and(|o| o.perfect))
                                .count();
                            (meth, hits as f64 / replicates.max(1) as f64)
                        })
                        .collect();
                }
                Err(e) => cell.skipped = Some(e.to_string()),
            }
            cells.push(cell);
        }
    }
    cells
}
