//! Model parameters and the analytic edge-probability oracles.
//!
//! The truth graph has `n` vertices with binary features in `{0,1}^d`, each
//! entry an independent Bernoulli(`s/d`). Two vertices are adjacent when their
//! features share at least `t` ones. The density parameter `m` is tied to the
//! sparsity by `s = sqrt(t * d * (m / n)^(1/t))`, and is roughly the order of
//! the mean degree when `t` is small.

use crate::error::{Error, Result};

/// Structural parameters of a random intersection graph.
///
/// `s` and `m` are always set together; whichever one the caller supplies,
/// the other is derived from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    n: usize,
    d: usize,
    s: f64,
    m: f64,
    t: u32,
}

impl ModelParams {
    /// Builds parameters from the sparsity `s`. The derived `m` is not range
    /// checked here; see [`density_from_sparsity`] for the checked conversion.
    pub fn from_sparsity(n: usize, d: usize, s: f64, t: u32) -> Result<Self> {
        check_shape(n, d, t)?;
        check_sparsity(d, s)?;
        let m = density_raw(n, d, s, t);
        Ok(ModelParams { n, d, s, m, t })
    }

    /// Builds parameters from the density `m`, which must lie in `[1, n]`.
    pub fn from_density(n: usize, d: usize, m: f64, t: u32) -> Result<Self> {
        check_shape(n, d, t)?;
        let s = sparsity_from_density(n, d, m, t)?;
        Ok(ModelParams { n, d, s, m, t })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    /// Per-entry Bernoulli probability `s/d`.
    pub fn entry_probability(&self) -> f64 {
        self.s / self.d as f64
    }

    /// Whether `n >= (12t)^t m`, the regime in which the degree and
    /// feature-recovery bounds are stated.
    pub fn in_bound_regime(&self) -> bool {
        let t = self.t as f64;
        (12.0 * t).powf(t) * self.m <= self.n as f64
    }

    /// Same parameters with a different vertex count, keeping `s` fixed.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::from_sparsity(n, self.d, self.s, self.t)
    }
}

/// Observation noise: Gaussian feature noise and independent edge retention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    sigma: f64,
    q: f64,
}

impl NoiseParams {
    pub fn new(sigma: f64, q: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::invalid("sigma", sigma, "must be finite and >= 0"));
        }
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::invalid("q", q, "must lie in (0, 1]"));
        }
        Ok(NoiseParams { sigma, q })
    }

    /// No feature noise and every edge retained.
    pub fn exact() -> Self {
        NoiseParams { sigma: 0.0, q: 1.0 }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

fn check_shape(n: usize, d: usize, t: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("n", 0.0, "must be positive"));
    }
    if d == 0 {
        return Err(Error::invalid("d", 0.0, "must be positive"));
    }
    if t == 0 {
        return Err(Error::invalid("t", 0.0, "must be >= 1"));
    }
    Ok(())
}

fn check_sparsity(d: usize, s: f64) -> Result<()> {
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::invalid("s", s, "must be finite and > 0"));
    }
    if s > d as f64 {
        return Err(Error::invalid("s", s, "s/d must not exceed 1"));
    }
    Ok(())
}

fn density_raw(n: usize, d: usize, s: f64, t: u32) -> f64 {
    let ratio = s * s / (t as f64 * d as f64);
    n as f64 * ratio.powi(t as i32)
}

/// `s = sqrt(t * d * (m/n)^(1/t))`.
pub fn sparsity_from_density(n: usize, d: usize, m: f64, t: u32) -> Result<f64> {
    check_shape(n, d, t)?;
    if !(m >= 1.0 && m <= n as f64) {
        return Err(Error::invalid("m", m, "must lie in [1, n]"));
    }
    let s = (t as f64 * d as f64 * (m / n as f64).powf(1.0 / t as f64)).sqrt();
    if s > d as f64 {
        return Err(Error::invalid("s", s, "derived s exceeds d"));
    }
    Ok(s)
}

/// `m = n * (s^2 / (t d))^t`, the inverse of [`sparsity_from_density`].
///
/// Returns [`Error::DensityBelowOne`] carrying the computed value when
/// `m < 1`; the value is not clamped.
pub fn density_from_sparsity(n: usize, d: usize, s: f64, t: u32) -> Result<f64> {
    check_shape(n, d, t)?;
    check_sparsity(d, s)?;
    let m = density_raw(n, d, s, t);
    if m < 1.0 {
        return Err(Error::DensityBelowOne { m });
    }
    Ok(m)
}

/// `P(Binomial(trials, p) >= k)` by exact summation of log-space terms.
pub fn binomial_upper_tail(trials: u64, p: f64, k: u64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > trials || p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }

    let ln_p = p.ln();
    let ln_q = (-p).ln_1p();
    let ln_odds = ln_p - ln_q;

    // ln C(trials, k), accumulated as a sum of ln((trials - k + i) / i).
    let mut ln_choose = 0.0;
    for i in 1..=k {
        ln_choose += ((trials - k + i) as f64).ln() - (i as f64).ln();
    }
    let first = ln_choose + k as f64 * ln_p + (trials - k) as f64 * ln_q;

    let mode = ((trials + 1) as f64 * p).floor() as u64;
    let mut logs = Vec::new();
    let mut current = first;
    let mut peak = first;
    let mut j = k;
    loop {
        logs.push(current);
        peak = peak.max(current);
        if j == trials {
            break;
        }
        // Past the mode terms only shrink; stop once they are negligible.
        if j > mode && current < peak - 45.0 {
            break;
        }
        current += ((trials - j) as f64).ln() - ((j + 1) as f64).ln() + ln_odds;
        j += 1;
    }

    // Neumaier-compensated sum of exp(log - peak).
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &l in &logs {
        let x = (l - peak).exp();
        let tmp = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - tmp) + x;
        } else {
            comp += (x - tmp) + sum;
        }
        sum = tmp;
    }
    ((sum + comp).ln() + peak).exp().min(1.0)
}

/// Probability that a given pair is an observed edge.
///
/// Without `given_support` this is the unconditional probability
/// `q * P(Binomial(d, (s/d)^2) >= t)`. With `given_support = |S_i|` it is the
/// conditional probability `q * P(Binomial(|S_i|, s/d) >= t)` that a fixed
/// vertex with that support size is joined to a fresh vertex.
pub fn edge_probability(
    d: usize,
    s: f64,
    t: u32,
    given_support: Option<usize>,
    q: f64,
) -> Result<f64> {
    check_shape(1, d, t)?;
    check_sparsity(d, s)?;
    if !(q >= 0.0 && q <= 1.0) {
        return Err(Error::invalid("q", q, "must lie in [0, 1]"));
    }
    let p = s / d as f64;
    let tail = match given_support {
        None => binomial_upper_tail(d as u64, p * p, t as u64),
        Some(support) => {
            if support > d {
                return Err(Error::invalid(
                    "given_support",
                    support as f64,
                    "cannot exceed d",
                ));
            }
            binomial_upper_tail(support as u64, p, t as u64)
        }
    };
    Ok(q * tail)
}

/// `(n - 1) * edge_probability(d, s, t, q)`.
pub fn expected_degree(params: &ModelParams, q: f64) -> f64 {
    let p = params.entry_probability();
    let tail = binomial_upper_tail(params.d as u64, p * p, params.t as u64);
    (params.n as f64 - 1.0) * q * tail
}
