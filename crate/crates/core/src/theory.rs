//! Finite-n recovery bounds and Monte Carlo checks of the tail inequalities
//! behind them.
//!
//! Evaluators are pure functions of the parameters. Empirical validators
//! draw per-trial seeds from the caller's seed, aggregate by trial index, and
//! only declare a pass or fail with a three-standard-error buffer.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::graphgen::{duplicate_rows, intersection_graph, sample_features, subsample_edges};
use crate::model::{ModelParams, NoiseParams};
use crate::rng::{derive_indexed, label, stream};

/// Width of the Monte Carlo tolerance, in standard errors.
pub const SE_BUFFER: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Satisfied,
    Violated,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Satisfied => "satisfied",
            Verdict::Violated => "violated",
        }
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Satisfied
        } else {
            Verdict::Violated
        }
    }
}

/// One line of a report in CSV form: `name,value,components,verdict`, with
/// components written as `label=value` pairs joined by `;`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub name: String,
    pub value: f64,
    pub components: Vec<(String, f64)>,
    pub verdict: String,
}

pub const REPORT_CSV_HEADER: &str = "name,value,components,verdict";

impl ReportRow {
    pub fn csv_line(&self) -> String {
        let comps: Vec<String> = self
            .components
            .iter()
            .map(|(k, v)| format!("{k}={v:e}"))
            .collect();
        format!("{},{:e},{},{}", self.name, self.value, comps.join(";"), self.verdict)
    }
}

/// Signal terms of the perfect-recovery condition
/// `min{s, qm/s, qm/(sigma^2 s^2)} >= margin * (ln n + ln d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryReport {
    /// `[s, qm/s, qm/(sigma^2 s^2)]`; the last is `+inf` when `sigma = 0`.
    pub terms: [f64; 3],
    /// `ln n + ln d`.
    pub threshold: f64,
    pub margin_factor: f64,
    pub verdict: Verdict,
}

impl RecoveryReport {
    pub fn min_term(&self) -> f64 {
        self.terms.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn margin_ratio(&self) -> f64 {
        self.min_term() / self.threshold
    }

    pub fn row(&self) -> ReportRow {
        ReportRow {
            name: "recovery_condition".into(),
            value: self.margin_ratio(),
            components: vec![
                ("s".into(), self.terms[0]),
                ("qm_over_s".into(), self.terms[1]),
                ("qm_over_sigma2_s2".into(), self.terms[2]),
                ("log_n_plus_log_d".into(), self.threshold),
                ("margin_factor".into(), self.margin_factor),
            ],
            verdict: self.verdict.as_str().into(),
        }
    }
}

pub fn recovery_condition(params: &ModelParams, noise: &NoiseParams, margin_factor: f64) -> RecoveryReport {
    let s = params.s();
    let qm = noise.q() * params.m();
    let sigma2 = noise.sigma() * noise.sigma();
    let noise_term = if sigma2 == 0.0 {
        f64::INFINITY
    } else {
        qm / (sigma2 * s * s)
    };
    let threshold = (params.n() as f64).ln() + (params.d() as f64).ln();
    let terms = [s, qm / s, noise_term];
    let min = terms.iter().copied().fold(f64::INFINITY, f64::min);
    RecoveryReport {
        terms,
        threshold,
        margin_factor,
        verdict: Verdict::from_bool(min >= margin_factor * threshold),
    }
}

/// A probability bound broken into labeled addends. Values above one are
/// kept as is and flagged as vacuous.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub name: &'static str,
    pub components: Vec<(&'static str, f64)>,
    /// Whether `n >= (12t)^t m`, the regime the bound is proved for.
    pub precondition_met: bool,
}

impl BoundReport {
    pub fn value(&self) -> f64 {
        self.components.iter().map(|(_, v)| v).sum()
    }

    pub fn is_vacuous(&self) -> bool {
        self.value() > 1.0
    }

    pub fn component(&self, name: &str) -> Option<f64> {
        self.components.iter().find(|(k, _)| *k == name).map(|(_, v)| *v)
    }

    pub fn row(&self) -> ReportRow {
        let mut components: Vec<(String, f64)> =
            self.components.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        components.push(("precondition_met".into(), self.precondition_met as u8 as f64));
        ReportRow {
            name: self.name.into(),
            value: self.value(),
            components,
            verdict: if self.is_vacuous() { "vacuous" } else { "informative" }.into(),
        }
    }
}

/// Bound on `P(exists i: z_i != x_i)`:
/// `nd (3 e^{-mq/(5 2^{t+7} s)} + 3 e^{-s/175} + e^{-mq/(2^{t+7} s^2 sigma^2)})`.
pub fn feat_failure_bound(params: &ModelParams, noise: &NoiseParams) -> BoundReport {
    let n = params.n() as f64;
    let d = params.d() as f64;
    let s = params.s();
    let mq = params.m() * noise.q();
    let scale = 2f64.powi(params.t() as i32 + 7);
    let sigma2 = noise.sigma() * noise.sigma();
    let nd = n * d;
    let graph_term = nd * 3.0 * (-mq / (5.0 * scale * s)).exp();
    let support_term = nd * 3.0 * (-s / 175.0).exp();
    let noise_term = if sigma2 == 0.0 {
        0.0
    } else {
        nd * (-mq / (scale * s * s * sigma2)).exp()
    };
    BoundReport {
        name: "feat_failure_bound",
        components: vec![
            ("graph", graph_term),
            ("support", support_term),
            ("noise", noise_term),
        ],
        precondition_met: params.in_bound_regime(),
    }
}

/// Bound on `P(pi_hat != pi*)`: `n^2 e^{-2s} + 2 * feat_failure_bound`.
pub fn match_failure_bound(params: &ModelParams, noise: &NoiseParams) -> BoundReport {
    let n = params.n() as f64;
    let feat = feat_failure_bound(params, noise);
    BoundReport {
        name: "match_failure_bound",
        components: vec![
            ("collision", n * n * (-2.0 * params.s()).exp()),
            ("twice_feat", 2.0 * feat.value()),
        ],
        precondition_met: feat.precondition_met,
    }
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let k = xs.len();
    if k == 0 {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / k as f64;
    if k < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
    (mean, (var / k as f64).sqrt())
}

/// Degree concentration: fraction of vertices with `|N_i|` outside
/// `[mq / 2^{t+2}, 2^{t+2} e^t mq]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeEventReport {
    pub interval: (f64, f64),
    pub trials: usize,
    /// Mean over trials of the per-trial violating fraction.
    pub violation_fraction: f64,
    /// Standard error of that mean across trials.
    pub standard_error: f64,
    /// `2 e^{-s/8} + 2 e^{-mq/2^{t+6}}`.
    pub bound: f64,
    pub bound_components: [f64; 2],
    pub verdict: Verdict,
}

impl DegreeEventReport {
    pub fn row(&self) -> ReportRow {
        ReportRow {
            name: "degree_event_check".into(),
            value: self.violation_fraction,
            components: vec![
                ("interval_lo".into(), self.interval.0),
                ("interval_hi".into(), self.interval.1),
                ("standard_error".into(), self.standard_error),
                ("bound".into(), self.bound),
                ("trials".into(), self.trials as f64),
            ],
            verdict: self.verdict.as_str().into(),
        }
    }
}

/// `(2 e^{-s/8}, 2 e^{-mq/2^{t+6}})`.
pub fn degree_bound_components(params: &ModelParams, noise: &NoiseParams) -> [f64; 2] {
    let mq = params.m() * noise.q();
    [
        2.0 * (-params.s() / 8.0).exp(),
        2.0 * (-mq / 2f64.powi(params.t() as i32 + 6)).exp(),
    ]
}

/// `[mq / 2^{t+2}, 2^{t+2} e^t mq]`.
pub fn degree_interval(params: &ModelParams, noise: &NoiseParams) -> (f64, f64) {
    let mq = params.m() * noise.q();
    let t = params.t() as i32;
    let scale = 2f64.powi(t + 2);
    (mq / scale, scale * (t as f64).exp() * mq)
}

/// Fraction of vertices of `g` whose degree lies outside `[lo, hi]`.
pub fn interval_violation_fraction(g: &Graph, (lo, hi): (f64, f64)) -> f64 {
    if g.n() == 0 {
        return 0.0;
    }
    let outside = (0..g.n())
        .filter(|&i| {
            let deg = g.degree(i) as f64;
            deg < lo || deg > hi
        })
        .count();
    outside as f64 / g.n() as f64
}

pub fn degree_event_check(
    params: &ModelParams,
    noise: &NoiseParams,
    trials: usize,
    seed: u64,
) -> Result<DegreeEventReport> {
    if !params.in_bound_regime() {
        return Err(Error::Precondition(format!(
            "degree check needs n >= (12t)^t m (n = {}, t = {}, m = {})",
            params.n(),
            params.t(),
            params.m()
        )));
    }
    if trials == 0 {
        return Err(Error::Precondition("at least one trial is required".into()));
    }
    let (lo, hi) = degree_interval(params, noise);
    let fractions: Vec<f64> = (0..trials)
        .map(|k| {
            let trial_seed = derive_indexed(seed, &[label::VALIDATE, k as u64]);
            let x = sample_features(params, trial_seed);
            let e0 = intersection_graph(&x, params.t());
            let e = subsample_edges(&e0, noise.q(), trial_seed);
            interval_violation_fraction(&e, (lo, hi))
        })
        .collect();
    let (mean, se) = mean_and_se(&fractions);
    let comps = degree_bound_components(params, noise);
    let bound = comps[0] + comps[1];
    Ok(DegreeEventReport {
        interval: (lo, hi),
        trials,
        violation_fraction: mean,
        standard_error: se,
        bound,
        bound_components: comps,
        verdict: Verdict::from_bool(mean <= bound + SE_BUFFER * se),
    })
}

/// Exact probability that two independent rows coincide:
/// `(1 - 2p + 2p^2)^d` with `p = s/d`.
pub fn pair_collision_probability(d: usize, s: f64) -> f64 {
    let p = s / d as f64;
    (1.0 - 2.0 * p + 2.0 * p * p).powi(d as i32)
}

/// `e^{-2(s - ln n)}`, the bound on the probability that any two rows of `X`
/// coincide.
pub fn duplicate_bound(params: &ModelParams) -> f64 {
    (-2.0 * (params.s() - (params.n() as f64).ln())).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessReport {
    pub trials: usize,
    pub trials_with_duplicates: usize,
    pub frequency: f64,
    pub standard_error: f64,
    pub bound: f64,
    pub vacuous: bool,
    pub verdict: Verdict,
}

impl UniquenessReport {
    pub fn row(&self) -> ReportRow {
        ReportRow {
            name: "uniqueness_check".into(),
            value: self.frequency,
            components: vec![
                ("standard_error".into(), self.standard_error),
                ("bound".into(), self.bound),
                ("trials".into(), self.trials as f64),
                ("vacuous".into(), self.vacuous as u8 as f64),
            ],
            verdict: self.verdict.as_str().into(),
        }
    }
}

/// Frequency of feature matrices with a repeated row, against
/// [`duplicate_bound`].
pub fn uniqueness_check(params: &ModelParams, trials: usize, seed: u64) -> Result<UniquenessReport> {
    if trials == 0 {
        return Err(Error::Precondition("at least one trial is required".into()));
    }
    let hits: usize = (0..trials)
        .into_par_iter()
        .map(|k| {
            let x = sample_features(params, derive_indexed(seed, &[label::VALIDATE, k as u64]));
            (duplicate_rows(&x) > 0) as usize
        })
        .sum();
    let freq = hits as f64 / trials as f64;
    let se = (freq * (1.0 - freq) / trials as f64).sqrt();
    let bound = duplicate_bound(params);
    Ok(UniquenessReport {
        trials,
        trials_with_duplicates: hits,
        frequency: freq,
        standard_error: se,
        bound,
        vacuous: bound > 1.0,
        verdict: Verdict::from_bool(freq <= bound + SE_BUFFER * se),
    })
}

/// `(1 - e^{-4u^2})^2 e^{-22u^2}`, a lower bound on
/// `P(<x, y> >= u sqrt(d))` for independent standard Gaussian `x, y` in
/// dimension `d`, valid for `u <= sqrt(d)/16`.
pub fn gaussian_inner_lower_bound(u: f64) -> f64 {
    let u2 = u * u;
    (1.0 - (-4.0 * u2).exp()).powi(2) * (-22.0 * u2).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianTailReport {
    pub d: usize,
    pub u: f64,
    pub trials: usize,
    pub hits: usize,
    pub empirical: f64,
    pub standard_error: f64,
    pub bound: f64,
    /// `empirical / bound`; large values mean the bound is loose.
    pub looseness: f64,
    pub verdict: Verdict,
}

impl GaussianTailReport {
    pub fn is_loose(&self) -> bool {
        self.looseness > 100.0
    }

    pub fn row(&self) -> ReportRow {
        ReportRow {
            name: "gaussian_inner_tail_check".into(),
            value: self.empirical,
            components: vec![
                ("d".into(), self.d as f64),
                ("u".into(), self.u),
                ("standard_error".into(), self.standard_error),
                ("bound".into(), self.bound),
                ("looseness".into(), self.looseness),
            ],
            verdict: self.verdict.as_str().into(),
        }
    }
}

const CHUNK: usize = 1024;

pub fn gaussian_inner_tail_check(d: usize, u: f64, trials: usize, seed: u64) -> Result<GaussianTailReport> {
    if d == 0 || !u.is_finite() || u > (d as f64).sqrt() / 16.0 {
        return Err(Error::Precondition(format!(
            "need u <= sqrt(d)/16 (d = {d}, u = {u})"
        )));
    }
    if trials < 10_000 {
        return Err(Error::Precondition(format!("need at least 10^4 trials, got {trials}")));
    }
    let level = u * (d as f64).sqrt();
    let chunks = trials.div_ceil(CHUNK);
    let hits: usize = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream(seed, label::VALIDATE, c as u64);
            let count = CHUNK.min(trials - c * CHUNK);
            (0..count)
                .filter(|_| {
                    let mut acc = 0.0;
                    for _ in 0..d {
                        let a: f64 = rng.sample(StandardNormal);
                        let b: f64 = rng.sample(StandardNormal);
                        acc += a * b;
                    }
                    acc >= level
                })
                .count()
        })
        .sum();
    let empirical = hits as f64 / trials as f64;
    let se = (empirical * (1.0 - empirical) / trials as f64).sqrt();
    let bound = gaussian_inner_lower_bound(u);
    Ok(GaussianTailReport {
        d,
        u,
        trials,
        hits,
        empirical,
        standard_error: se,
        bound,
        looseness: if bound > 0.0 { empirical / bound } else { f64::INFINITY },
        verdict: Verdict::from_bool(empirical - SE_BUFFER * se >= bound),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailPoint {
    pub u: f64,
    pub hits: usize,
    pub tail: f64,
    pub standard_error: f64,
}

/// Empirical tail of a lazy random walk and a least-squares fit of
/// `ln P(S_n >= u) = ln c - C u^2 / (pn)`. No pass/fail: the constants in
/// the corresponding lower bound are not specified.
#[derive(Debug, Clone, PartialEq)]
pub struct LazyWalkReport {
    pub n_steps: usize,
    pub p: f64,
    pub trials: usize,
    pub points: Vec<TailPoint>,
    /// Fitted `(c, C)`, when at least two grid points have a positive tail.
    pub fit: Option<(f64, f64)>,
}

impl LazyWalkReport {
    pub fn rows(&self) -> Vec<ReportRow> {
        let mut rows: Vec<ReportRow> = self
            .points
            .iter()
            .map(|pt| ReportRow {
                name: "lazy_walk_tail".into(),
                value: pt.tail,
                components: vec![
                    ("u".into(), pt.u),
                    ("standard_error".into(), pt.standard_error),
                    ("n_steps".into(), self.n_steps as f64),
                    ("p".into(), self.p),
                ],
                verdict: "reported".into(),
            })
            .collect();
        if let Some((c, big_c)) = self.fit {
            rows.push(ReportRow {
                name: "lazy_walk_fit".into(),
                value: big_c,
                components: vec![("c".into(), c), ("C".into(), big_c)],
                verdict: "reported".into(),
            });
        }
        rows
    }
}

pub fn lazy_walk_tail_check(
    n_steps: usize,
    p: f64,
    u_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<LazyWalkReport> {
    if !(p > 0.0 && 2.0 * p <= 1.0) {
        return Err(Error::Precondition(format!("need 0 < p <= 1/2, got {p}")));
    }
    if p * (n_steps as f64) < 1.0 {
        return Err(Error::Precondition(format!(
            "need p * n >= 1 (p = {p}, n = {n_steps})"
        )));
    }
    if trials == 0 {
        return Err(Error::Precondition("at least one trial is required".into()));
    }
    let chunks = trials.div_ceil(CHUNK);
    let per_chunk: Vec<Vec<usize>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream(seed, label::VALIDATE, c as u64);
            let count = CHUNK.min(trials - c * CHUNK);
            let mut hits = vec![0usize; u_grid.len()];
            for _ in 0..count {
                let mut sum = 0i64;
                for _ in 0..n_steps {
                    let r: f64 = rng.gen();
                    if r < p {
                        sum += 1;
                    } else if r < 2.0 * p {
                        sum -= 1;
                    }
                }
                for (h, &u) in hits.iter_mut().zip(u_grid) {
                    if sum as f64 >= u {
                        *h += 1;
                    }
                }
            }
            hits
        })
        .collect();
    let points: Vec<TailPoint> = u_grid
        .iter()
        .enumerate()
        .map(|(k, &u)| {
            let hits: usize = per_chunk.iter().map(|h| h[k]).sum();
            let tail = hits as f64 / trials as f64;
            TailPoint {
                u,
                hits,
                tail,
                standard_error: (tail * (1.0 - tail) / trials as f64).sqrt(),
            }
        })
        .collect();

    let pn = p * n_steps as f64;
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|pt| pt.tail > 0.0)
        .map(|pt| (pt.u * pt.u / pn, pt.tail.ln()))
        .collect();
    let fit = least_squares(&usable).map(|(intercept, slope)| (intercept.exp(), -slope));
    Ok(LazyWalkReport {
        n_steps,
        p,
        trials,
        points,
        fit,
    })
}

/// Ordinary least squares `y = a + b x`; `None` without two distinct `x`.
fn least_squares(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    let k = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let b = sxy / sxx;
    Some((my - b * mx, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn experiment_params() -> ModelParams {
        ModelParams::from_sparsity(4000, 200, 10.0, 3).unwrap()
    }

    #[test]
    fn recovery_terms_by_hand() {
        let noise = NoiseParams::new(0.4, 0.8).unwrap();
        let r = recovery_condition(&experiment_params(), &noise, 1.0);
        let m = 4000.0 / 216.0;
        assert_relative_eq!(r.terms[0], 10.0, max_relative = 1e-15);
        assert_relative_eq!(r.terms[1], 0.8 * m / 10.0, max_relative = 1e-12);
        assert_relative_eq!(r.terms[2], 0.8 * m / (0.16 * 100.0), max_relative = 1e-12);
        assert_relative_eq!(r.threshold, 4000f64.ln() + 200f64.ln(), max_relative = 1e-15);
        assert_eq!(r.min_term(), r.terms[2]);
        assert_eq!(r.verdict, Verdict::Violated);
    }

    #[test]
    fn noiseless_third_term_is_unbounded() {
        let r = recovery_condition(&experiment_params(), &NoiseParams::exact(), 1.0);
        assert!(r.terms[2].is_infinite());
        assert_eq!(r.min_term(), r.terms[0].min(r.terms[1]));
    }

    #[test]
    fn doubling_q_doubles_graph_terms() {
        let params = experiment_params();
        let a = recovery_condition(&params, &NoiseParams::new(0.5, 0.3).unwrap(), 1.0);
        let b = recovery_condition(&params, &NoiseParams::new(0.5, 0.6).unwrap(), 1.0);
        assert_eq!(a.terms[0], b.terms[0]);
        assert_relative_eq!(b.terms[1], 2.0 * a.terms[1], max_relative = 1e-15);
        assert_relative_eq!(b.terms[2], 2.0 * a.terms[2], max_relative = 1e-15);
    }

    #[test]
    fn feat_bound_noiseless_limit() {
        let params = ModelParams::from_density(1_000_000, 1000, 100_000.0, 1).unwrap();
        let b = feat_failure_bound(&params, &NoiseParams::exact());
        assert_eq!(b.component("noise"), Some(0.0));
        let nd = 1e9;
        let s = params.s();
        let expect = nd * (3.0 * (-1e5 / (5.0 * 256.0 * s)).exp() + 3.0 * (-s / 175.0).exp());
        assert_relative_eq!(b.value(), expect, max_relative = 1e-13);
    }

    #[test]
    fn match_bound_decomposes() {
        let params = experiment_params();
        let noise = NoiseParams::new(0.4, 0.8).unwrap();
        let feat = feat_failure_bound(&params, &noise);
        let m = match_failure_bound(&params, &noise);
        assert_eq!(m.component("collision"), Some(4000.0f64 * 4000.0 * (-20.0f64).exp()));
        assert_eq!(m.component("twice_feat"), Some(2.0 * feat.value()));
        assert!(m.is_vacuous());
        assert!(!m.precondition_met);
    }

    #[test]
    fn collision_term_is_one_at_log_n() {
        let n = 1000usize;
        let params = ModelParams::from_sparsity(n, 100, (n as f64).ln(), 1).unwrap();
        let m = match_failure_bound(&params, &NoiseParams::exact());
        assert_relative_eq!(m.component("collision").unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn degree_bound_at_large_s() {
        let s = 8.0 * 1e6f64.ln();
        assert_relative_eq!(2.0 * (-s / 8.0).exp(), 2e-6, max_relative = 1e-12);
    }

    #[test]
    fn degree_check_counts_outside_interval() {
        let params = ModelParams::from_density(600, 100, 50.0, 1).unwrap();
        let noise = NoiseParams::new(0.0, 0.5).unwrap();
        assert!(params.in_bound_regime());
        let r = degree_event_check(&params, &noise, 3, 17).unwrap();
        let (lo, hi) = r.interval;
        assert_relative_eq!(lo, 25.0 / 8.0, max_relative = 1e-12);
        assert_relative_eq!(hi, 8.0 * 1f64.exp() * 25.0, max_relative = 1e-12);

        let mut total = 0.0;
        for k in 0..3u64 {
            let seed = derive_indexed(17, &[label::VALIDATE, k]);
            let x = sample_features(&params, seed);
            let e = subsample_edges(&intersection_graph(&x, 1), 0.5, seed);
            let out = (0..600).filter(|&i| (e.degree(i) as f64) < lo || (e.degree(i) as f64) > hi);
            total += out.count() as f64 / 600.0;
        }
        assert_relative_eq!(r.violation_fraction, total / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn complete_graph_interval_is_direct() {
        // s = d: every degree is n - 1 = 19, m = n = 20.
        let params = ModelParams::from_sparsity(20, 1, 1.0, 1).unwrap();
        let interval = degree_interval(&params, &NoiseParams::exact());
        assert_eq!(interval, (2.5, 8.0 * 1f64.exp() * 20.0));
        assert_eq!(interval_violation_fraction(&Graph::complete(20), interval), 0.0);
        assert_eq!(interval_violation_fraction(&Graph::complete(20), (19.5, 100.0)), 1.0);
        assert_eq!(interval_violation_fraction(&Graph::empty(4), (1.0, 2.0)), 1.0);
    }

    #[test]
    fn degree_check_precondition() {
        let params = ModelParams::from_density(100, 2000, 50.0, 1).unwrap();
        assert!(matches!(
            degree_event_check(&params, &NoiseParams::exact(), 2, 0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn uniqueness_full_support_is_vacuous() {
        let params = ModelParams::from_sparsity(100, 3, 3.0, 1).unwrap();
        let r = uniqueness_check(&params, 5, 0).unwrap();
        assert_eq!(r.trials_with_duplicates, 5);
        assert!(r.vacuous);
        assert_eq!(r.verdict, Verdict::Satisfied);
    }

    #[test]
    fn gaussian_bound_values() {
        assert_eq!(gaussian_inner_lower_bound(0.0), 0.0);
        let b = gaussian_inner_lower_bound(0.5);
        let expect = (1.0 - (-1.0f64).exp()).powi(2) * (-5.5f64).exp();
        assert_relative_eq!(b, expect, max_relative = 1e-15);
        assert!((b - 1.63e-3).abs() < 1e-5);
        let b = gaussian_inner_lower_bound(1.0);
        assert!((b - 2.7e-10).abs() < 0.05e-10, "{b}");
    }

    #[test]
    fn gaussian_preconditions() {
        assert!(gaussian_inner_tail_check(256, 1.01, 10_000, 0).is_err());
        assert!(gaussian_inner_tail_check(256, 0.5, 9_999, 0).is_err());
    }

    #[test]
    fn gaussian_zero_level_is_half() {
        let r = gaussian_inner_tail_check(16, 0.0, 20_000, 3).unwrap();
        assert!((r.empirical - 0.5).abs() < 4.0 * r.standard_error.max(1e-3));
        assert_eq!(r.verdict, Verdict::Satisfied);
    }

    #[test]
    fn lazy_walk_preconditions() {
        assert!(lazy_walk_tail_check(10, 0.6, &[0.0], 10, 0).is_err());
        assert!(lazy_walk_tail_check(10, 0.05, &[0.0], 10, 0).is_err());
        assert!(lazy_walk_tail_check(10, 0.2, &[0.0], 0, 0).is_err());
    }

    #[test]
    fn lazy_walk_symmetry_and_monotone_tail() {
        let grid = [0.0, 1.0, 2.0, 3.0, 4.0, 6.0];
        let r = lazy_walk_tail_check(40, 0.25, &grid, 20_000, 9).unwrap();
        assert!(r.points[0].tail >= 0.5);
        for w in r.points.windows(2) {
            assert!(w[1].tail <= w[0].tail);
        }
        let (c, big_c) = r.fit.unwrap();
        assert!(c > 0.0 && big_c > 0.0);
    }

    #[test]
    fn least_squares_exact_line() {
        let (a, b) = least_squares(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]).unwrap();
        assert_relative_eq!(a, 1.0, epsilon = 1e-14);
        assert_relative_eq!(b, 2.0, epsilon = 1e-14);
        assert!(least_squares(&[(1.0, 1.0), (1.0, 2.0)]).is_none());
    }

    #[test]
    fn report_rows_render() {
        let r = recovery_condition(&experiment_params(), &NoiseParams::exact(), 1.0);
        let line = r.row().csv_line();
        assert!(line.starts_with("recovery_condition,"));
        assert!(line.ends_with(",violated"));
        assert_eq!(line.split(',').count(), 4);
    }
}
