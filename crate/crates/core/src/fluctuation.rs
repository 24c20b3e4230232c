//! Monte Carlo fluctuations of linear eigenvalue statistics.
//!
//! Trials are independent: trial `t` samples its matrix from
//! `trial_seed(master_seed, t)`, so results do not depend on scheduling.
//! Per-trial values are collected in trial order before any reduction.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use statrs::function::erf::erfc;

use crate::centro::{sample_centro, weaver_blocks, CentroMatrix, EntryDist};
use crate::eig::{self, Spectrum};
use crate::matrix::Matrix;
use crate::poly::Polynomial;
use crate::seed::trial_seed;
use crate::sum::NeumaierSum;
use crate::variance::closed_form_variance;
use crate::{Error, Result};

/// KS threshold used as the normality gate for 750-trial runs.
pub const KS_GATE: f64 = 0.08;

/// `L_n(f) = sum_k a_k Tr M^k + a_0 n`, with traces taken over the two
/// half-size blocks of the orthogonal block-diagonalisation.
pub fn les_polynomial(m: &CentroMatrix, f: &Polynomial) -> Complex64 {
    let traces = weaver_blocks(m).trace_powers(f.degree());
    combine_traces(m.order(), &traces, f)
}

/// Same statistic from the full matrix, no block split.
pub fn les_polynomial_dense(m: &Matrix, f: &Polynomial) -> Complex64 {
    let traces = eig::trace_powers(m, f.degree());
    combine_traces(m.order(), &traces, f)
}

fn combine_traces(n: usize, traces: &[f64], f: &Polynomial) -> Complex64 {
    let a = f.coeffs();
    let mut acc = a[0] * n as f64;
    for (k, t) in traces.iter().enumerate() {
        acc += a[k + 1] * *t;
    }
    acc
}

/// `sum_i f(lambda_i)` over a converged spectrum.
pub fn les_analytic(spec: &Spectrum, f: impl Fn(Complex64) -> Complex64) -> Result<Complex64> {
    if !spec.converged {
        return Err(Error::Diagnostic("spectrum did not converge; LES would be meaningless".into()));
    }
    Ok(spec.values.iter().map(|&z| f(z)).sum())
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn mean_and_unbiased_variance(xs: &[f64]) -> (f64, f64) {
    let t = xs.len() as f64;
    let mean = xs.iter().copied().sum::<NeumaierSum>().value() / t;
    let ss = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<NeumaierSum>().value();
    (mean, if xs.len() > 1 { ss / (t - 1.0) } else { 0.0 })
}

/// Kolmogorov–Smirnov distance between the empirical CDF of the standardised
/// samples and the standard normal CDF.
pub fn ks_statistic(samples: &[f64]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::Diagnostic("KS statistic needs at least two samples".into()));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::Diagnostic("KS statistic needs finite samples".into()));
    }
    let (mean, var) = mean_and_unbiased_variance(samples);
    let sd = var.sqrt();
    if sd == 0.0 || !sd.is_finite() {
        return Err(Error::Diagnostic("samples have zero variance".into()));
    }
    let mut z: Vec<f64> = samples.iter().map(|x| (x - mean) / sd).collect();
    z.sort_by(f64::total_cmp);
    let t = z.len() as f64;
    let d = z.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let cdf = normal_cdf(x);
        let above = (i + 1) as f64 / t - cdf;
        let below = cdf - i as f64 / t;
        d.max(above).max(below)
    });
    Ok(d)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HistogramBin {
    pub left: f64,
    pub right: f64,
    pub count: usize,
}

/// Histogram with the Freedman–Diaconis bin width `2 IQR / T^{1/3}`. Falls
/// back to the square-root rule when the interquartile range vanishes.
pub fn freedman_diaconis_histogram(samples: &[f64]) -> Vec<HistogramBin> {
    if samples.is_empty() {
        return Vec::new();
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let t = xs.len();
    let (lo, hi) = (xs[0], xs[t - 1]);
    if lo == hi {
        return vec![HistogramBin {
            left: lo,
            right: hi,
            count: t,
        }];
    }
    let q = |p: f64| {
        let pos = p * (t - 1) as f64;
        let i = pos.floor() as usize;
        let frac = pos - i as f64;
        if i + 1 < t {
            xs[i] + frac * (xs[i + 1] - xs[i])
        } else {
            xs[i]
        }
    };
    let iqr = q(0.75) - q(0.25);
    let bins = if iqr > 0.0 {
        let width = 2.0 * iqr / (t as f64).cbrt();
        ((hi - lo) / width).ceil().max(1.0) as usize
    } else {
        (t as f64).sqrt().ceil() as usize
    };
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in &xs {
        let b = (((x - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(b, count)| HistogramBin {
            left: lo + b as f64 * width,
            right: if b + 1 == bins { hi } else { lo + (b + 1) as f64 * width },
            count,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CltConfig {
    pub n: usize,
    pub trials: usize,
    pub f: Polynomial,
    pub dist: EntryDist,
    pub master_seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CltReport {
    pub n: usize,
    pub trials: usize,
    pub f: Polynomial,
    pub dist: EntryDist,
    pub seed: u64,
    /// Centred values `L_n(f) - mean_t L_n(f)`, in trial order.
    pub samples: Vec<Complex64>,
    /// Across-trial mean used for centring.
    pub raw_mean: Complex64,
    /// Unbiased `Var(Re) + Var(Im)`.
    pub empirical_variance: f64,
    pub variance_re: f64,
    pub variance_im: f64,
    /// `mean |L_n°(f)|^2`.
    pub second_moment_abs: f64,
    pub theoretical_variance: f64,
    /// KS distance of the standardised real parts.
    pub ks_statistic: f64,
    pub runtime_seconds: f64,
}

impl CltReport {
    pub fn real_samples(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.re).collect()
    }
}

pub fn run_clt(cfg: &CltConfig) -> Result<CltReport> {
    if cfg.trials < 2 {
        return Err(Error::Config(format!("CLT run needs at least 2 trials, got {}", cfg.trials)));
    }
    if cfg.n == 0 {
        return Err(Error::Config("matrix order must be positive".into()));
    }
    let start = Instant::now();
    let raw: Vec<Complex64> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| {
            let m = sample_centro(cfg.n, cfg.dist, trial_seed(cfg.master_seed, t))?;
            Ok(les_polynomial(&m, &cfg.f))
        })
        .collect::<Result<_>>()?;

    let t = cfg.trials as f64;
    let re: Vec<f64> = raw.iter().map(|z| z.re).collect();
    let im: Vec<f64> = raw.iter().map(|z| z.im).collect();
    let (mean_re, var_re) = mean_and_unbiased_variance(&re);
    let (mean_im, var_im) = mean_and_unbiased_variance(&im);
    let raw_mean = Complex64::new(mean_re, mean_im);
    let samples: Vec<Complex64> = raw.iter().map(|z| z - raw_mean).collect();
    let second_moment_abs = samples.iter().map(|z| z.norm_sqr()).sum::<NeumaierSum>().value() / t;
    let ks = ks_statistic(&re)?;

    Ok(CltReport {
        n: cfg.n,
        trials: cfg.trials,
        f: cfg.f.clone(),
        dist: cfg.dist,
        seed: cfg.master_seed,
        samples,
        raw_mean,
        empirical_variance: var_re + var_im,
        variance_re: var_re,
        variance_im: var_im,
        second_moment_abs,
        theoretical_variance: closed_form_variance(&cfg.f),
        ks_statistic: ks,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Which expectation a [`MomentRow`] estimates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MomentKind {
    /// `E[Tr M^k]`.
    Single { k: usize },
    /// `E[Tr M^k Tr M^l]`, `k <= l`.
    Joint { k: usize, l: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentRow {
    pub kind: MomentKind,
    pub estimate: f64,
    pub std_error: f64,
    /// Large-`n` limit of the expectation.
    pub target: f64,
    pub z_score: f64,
}

impl MomentRow {
    pub fn passes(&self, max_abs_z: f64) -> bool {
        self.z_score.abs() <= max_abs_z
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentReport {
    pub n: usize,
    pub trials: usize,
    pub dist: EntryDist,
    pub seed: u64,
    pub k_max: usize,
    pub rows: Vec<MomentRow>,
}

impl MomentReport {
    pub fn single(&self, k: usize) -> Option<&MomentRow> {
        self.rows.iter().find(|r| r.kind == MomentKind::Single { k })
    }

    /// Joint row for `(k, l)` in either order.
    pub fn joint(&self, k: usize, l: usize) -> Option<&MomentRow> {
        let (k, l) = (k.min(l), k.max(l));
        self.rows.iter().find(|r| r.kind == MomentKind::Joint { k, l })
    }
}

/// Limit of `E[Tr M^k]`: 2 for even `k`, 0 for odd `k`.
pub fn single_target(k: usize) -> f64 {
    if k % 2 == 0 {
        2.0
    } else {
        0.0
    }
}

/// Limit of `E[Tr M^k Tr M^l]`: `2k + 4` or `2k` on the diagonal for even or
/// odd `k`, 4 for distinct even powers and 0 otherwise.
pub fn joint_target(k: usize, l: usize) -> f64 {
    match (k == l, k % 2 == 0, l % 2 == 0) {
        (true, true, _) => 2.0 * k as f64 + 4.0,
        (true, false, _) => 2.0 * k as f64,
        (false, true, true) => 4.0,
        _ => 0.0,
    }
}

/// Per-trial `[Tr M, ..., Tr M^k_max]` in trial order.
pub fn sample_trace_powers(n: usize, trials: usize, k_max: usize, dist: EntryDist, master_seed: u64) -> Result<Vec<Vec<f64>>> {
    (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let m = sample_centro(n, dist, trial_seed(master_seed, t))?;
            Ok(weaver_blocks(&m).trace_powers(k_max))
        })
        .collect()
}

fn estimate(values: &[f64], target: f64, kind: MomentKind) -> MomentRow {
    let (mean, var) = mean_and_unbiased_variance(values);
    let se = (var / values.len() as f64).sqrt();
    let z_score = if se > 0.0 {
        (mean - target) / se
    } else if mean == target {
        0.0
    } else {
        f64::INFINITY.copysign(mean - target)
    };
    MomentRow {
        kind,
        estimate: mean,
        std_error: se,
        target,
        z_score,
    }
}

pub fn moment_suite(n: usize, trials: usize, k_max: usize, dist: EntryDist, master_seed: u64) -> Result<MomentReport> {
    if k_max < 2 {
        return Err(Error::Config(format!("moment suite needs k_max >= 2, got {k_max}")));
    }
    if trials < 2 {
        return Err(Error::Config("moment suite needs at least 2 trials".into()));
    }
    if n == 0 {
        return Err(Error::Config("matrix order must be positive".into()));
    }
    let traces = sample_trace_powers(n, trials, k_max, dist, master_seed)?;
    let column = |k: usize| traces.iter().map(|t| t[k - 1]).collect::<Vec<f64>>();

    let mut rows = Vec::new();
    for k in 1..=k_max {
        rows.push(estimate(&column(k), single_target(k), MomentKind::Single { k }));
    }
    for k in 1..=k_max {
        for l in k..=k_max {
            let products: Vec<f64> = traces.iter().map(|t| t[k - 1] * t[l - 1]).collect();
            rows.push(estimate(&products, joint_target(k, l), MomentKind::Joint { k, l }));
        }
    }
    Ok(MomentReport {
        n,
        trials,
        dist,
        seed: master_seed,
        k_max,
        rows,
    })
}
