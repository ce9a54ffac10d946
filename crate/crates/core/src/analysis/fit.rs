//! Damped-cosine least squares for `W_a(t)`:
//!
//! ```text
//! W_a(t) = b + A e^{-Γt} cos(2πt/T_u + φ)
//! ```
//!
//! Initial guesses: `b` from the mean, `T_u` from the dominant peak of the
//! detrended spectrum, `Γ` from the log-envelope of half-period extrema,
//! and `(A, φ)` from a linear solve at those values. Levenberg–Marquardt
//! then refines the free parameters.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::dynamics::wrap_angle;
use crate::error::{Error, Result};

const B: usize = 0;
const AMP: usize = 1;
const GAMMA: usize = 2;
const PERIOD: usize = 3;
const PHI: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Tunneling period `T_u` in map iterations.
    #[serde(rename = "T_u")]
    pub period: f64,
    /// Decay rate per iteration.
    pub gamma: f64,
    pub amplitude: f64,
    pub phase: f64,
    pub baseline: f64,
    pub rms_residual: f64,
}

impl FitResult {
    pub fn eval(&self, t: f64) -> f64 {
        model(&[self.baseline, self.amplitude, self.gamma, self.period, self.phase], t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Hold `T_u` at this value.
    pub fixed_period: Option<f64>,
    /// Hold `Γ` at this value.
    pub fixed_gamma: Option<f64>,
    /// Hold `b` at this value.
    pub fixed_baseline: Option<f64>,
    /// Hold `φ` at this value.
    pub fixed_phase: Option<f64>,
    /// Start from this period instead of the spectral estimate.
    pub period_guess: Option<f64>,
    pub max_iterations: usize,
    /// Refit with samples down-weighted where the envelope has fallen below
    /// twice the residual floor.
    pub downweight_tail: bool,
    /// Spectral peak must exceed this multiple of the median magnitude.
    pub peak_ratio: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            fixed_period: None,
            fixed_gamma: None,
            fixed_baseline: None,
            fixed_phase: None,
            period_guess: None,
            max_iterations: 2000,
            downweight_tail: true,
            peak_ratio: 5.0,
        }
    }
}

impl FitOptions {
    pub fn with_fixed_period(mut self, period: f64) -> Self {
        self.fixed_period = Some(period);
        self
    }

    pub fn with_fixed_gamma(mut self, gamma: f64) -> Self {
        self.fixed_gamma = Some(gamma);
        self
    }

    pub fn with_fixed_baseline(mut self, baseline: f64) -> Self {
        self.fixed_baseline = Some(baseline);
        self
    }

    pub fn with_fixed_phase(mut self, phase: f64) -> Self {
        self.fixed_phase = Some(phase);
        self
    }

    pub fn with_period_guess(mut self, period: f64) -> Self {
        self.period_guess = Some(period);
        self
    }
}

const TAIL_WEIGHT: f64 = 0.1;

fn model(p: &[f64; 5], t: f64) -> f64 {
    p[B] + p[AMP] * (-p[GAMMA] * t).exp() * (TAU * t / p[PERIOD] + p[PHI]).cos()
}

fn gradient(p: &[f64; 5], t: f64) -> [f64; 5] {
    let env = (-p[GAMMA] * t).exp();
    let theta = TAU * t / p[PERIOD] + p[PHI];
    let (s, c) = theta.sin_cos();
    let a = p[AMP];
    [1.0, env * c, -t * a * env * c, a * env * s * TAU * t / (p[PERIOD] * p[PERIOD]), -a * env * s]
}

/// Dominant period of the detrended series from a zero-padded spectrum,
/// refined by parabolic interpolation.
pub fn spectral_period(values: &[f64], dt: f64, peak_ratio: f64) -> Result<f64> {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let padded = (4 * n).next_power_of_two();
    let mut buf: Vec<Complex64> = values.iter().map(|v| Complex64::new(v - mean, 0.0)).collect();
    buf.resize(padded, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(padded).process(&mut buf);
    let mags: Vec<f64> = buf[..padded / 2].iter().map(|c| c.norm()).collect();
    let (peak, &peak_mag) = mags
        .iter()
        .enumerate()
        .skip(1)
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::InvalidSeries("series too short for a spectrum".into()))?;
    let mut sorted = mags[1..].to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let threshold = peak_ratio * median;
    if !(peak_mag > threshold) {
        return Err(Error::NoOscillation { peak: peak_mag, threshold });
    }
    let mut bin = peak as f64;
    if peak + 1 < mags.len() {
        let (l, c, r) = (mags[peak - 1].max(1e-300).ln(), peak_mag.ln(), mags[peak + 1].max(1e-300).ln());
        let denom = l - 2.0 * c + r;
        if denom < 0.0 {
            bin += (0.5 * (l - r) / denom).clamp(-0.5, 0.5);
        }
    }
    Ok(padded as f64 * dt / bin)
}

/// Decay rate from the log of the largest deviation in each half period.
fn envelope_decay(times: &[f64], values: &[f64], baseline: f64, period: f64) -> f64 {
    let half = 0.5 * period;
    let t0 = times[0];
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for (&t, &v) in times.iter().zip(values) {
        let block = ((t - t0) / half) as usize;
        let dev = (v - baseline).abs();
        match pts.get_mut(block) {
            Some(p) if dev > p.1 => *p = (t, dev),
            Some(_) => {}
            None => {
                pts.resize(block, (f64::NAN, 0.0));
                pts.push((t, dev));
            }
        }
    }
    let pts: Vec<(f64, f64)> = pts.into_iter().filter(|p| p.0.is_finite() && p.1 > 0.0).collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ml = pts.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1.ln() - ml)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    if sxx > 0.0 {
        (-sxy / sxx).max(0.0)
    } else {
        0.0
    }
}

/// Least squares for `(b, A, φ)` at fixed `(Γ, T)`; the model is linear in
/// `(b, A cos φ, A sin φ)`.
fn linear_start(times: &[f64], values: &[f64], gamma: f64, period: f64) -> Option<[f64; 5]> {
    let n = times.len();
    let x = DMatrix::from_fn(n, 3, |i, j| {
        let t = times[i];
        let env = (-gamma * t).exp();
        let theta = TAU * t / period;
        match j {
            0 => 1.0,
            1 => env * theta.cos(),
            _ => -env * theta.sin(),
        }
    });
    let y = DVector::from_column_slice(values);
    let sol = x.clone().svd(true, true).solve(&y, 1e-14).ok()?;
    let (c, s) = (sol[1], sol[2]);
    Some([sol[0], c.hypot(s), gamma, period, s.atan2(c)])
}

struct Problem<'a> {
    times: &'a [f64],
    values: &'a [f64],
    weights: Vec<f64>,
    free: Vec<usize>,
}

impl Problem<'_> {
    fn cost(&self, p: &[f64; 5]) -> f64 {
        self.times
            .iter()
            .zip(self.values)
            .zip(&self.weights)
            .map(|((&t, &y), &w)| w * (y - model(p, t)).powi(2))
            .sum()
    }

    /// Levenberg–Marquardt with Marquardt diagonal scaling. Returns the
    /// parameters and whether the stopping test was met.
    fn solve(&self, start: [f64; 5], max_iterations: usize) -> ([f64; 5], bool) {
        let k = self.free.len();
        let mut p = start;
        let mut cost = self.cost(&p);
        let mut lambda = 1e-3;
        for _ in 0..max_iterations {
            let mut jtj = DMatrix::<f64>::zeros(k, k);
            let mut jtr = DVector::<f64>::zeros(k);
            for ((&t, &y), &w) in self.times.iter().zip(self.values).zip(&self.weights) {
                let g = gradient(&p, t);
                let r = y - model(&p, t);
                for (a, &ia) in self.free.iter().enumerate() {
                    jtr[a] += w * g[ia] * r;
                    for (b, &ib) in self.free.iter().enumerate().take(a + 1) {
                        jtj[(a, b)] += w * g[ia] * g[ib];
                    }
                }
            }
            for a in 0..k {
                for b in 0..a {
                    jtj[(b, a)] = jtj[(a, b)];
                }
            }
            if jtr.amax() == 0.0 {
                return (p, true);
            }
            loop {
                let mut m = jtj.clone();
                for a in 0..k {
                    m[(a, a)] += lambda * jtj[(a, a)].max(1e-300);
                }
                let Some(step) = m.cholesky().map(|c| c.solve(&jtr)) else {
                    lambda *= 10.0;
                    if lambda > 1e30 {
                        return (p, false);
                    }
                    continue;
                };
                let mut trial = p;
                for (a, &ia) in self.free.iter().enumerate() {
                    trial[ia] += step[a];
                }
                trial[GAMMA] = trial[GAMMA].max(0.0);
                if trial[PERIOD] <= 0.0 {
                    trial[PERIOD] = 0.5 * p[PERIOD];
                }
                let trial_cost = self.cost(&trial);
                if trial_cost.is_finite() && trial_cost <= cost {
                    let rel_step = self
                        .free
                        .iter()
                        .map(|&i| (trial[i] - p[i]).abs() / (p[i].abs() + 1e-12))
                        .fold(0.0, f64::max);
                    let rel_cost = (cost - trial_cost) / cost.max(1e-300);
                    p = trial;
                    cost = trial_cost;
                    lambda = (lambda * 0.1).max(1e-15);
                    if rel_step < 1e-12 || rel_cost < 1e-15 || cost == 0.0 {
                        return (p, true);
                    }
                    break;
                }
                lambda *= 10.0;
                if lambda > 1e30 {
                    // no downhill step left: a minimum up to round-off
                    return (p, true);
                }
            }
        }
        (p, false)
    }
}

fn check_series(times: &[f64], values: &[f64]) -> Result<f64> {
    if times.len() != values.len() {
        return Err(Error::InvalidSeries(format!("{} times vs {} values", times.len(), values.len())));
    }
    if times.len() < 8 {
        return Err(Error::InvalidSeries(format!("need at least 8 samples, got {}", times.len())));
    }
    if values.iter().chain(times).any(|v| !v.is_finite()) {
        return Err(Error::InvalidSeries("non-finite sample".into()));
    }
    let dt = times[1] - times[0];
    if !(dt > 0.0) || times.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(1.0)) {
        return Err(Error::InvalidSeries("samples must be uniformly spaced in increasing time".into()));
    }
    Ok(dt)
}

/// Fit `b + A e^{-Γt} cos(2πt/T_u + φ)` to a uniformly sampled series.
pub fn fit_damped_cosine(times: &[f64], values: &[f64], opts: &FitOptions) -> Result<FitResult> {
    let dt = check_series(times, values)?;
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let period0 = match (opts.fixed_period, opts.period_guess) {
        (Some(t), _) | (None, Some(t)) => t,
        (None, None) => spectral_period(values, dt, opts.peak_ratio)?,
    };
    let gamma0 = opts.fixed_gamma.unwrap_or_else(|| envelope_decay(times, values, mean, period0));

    let mut free = vec![AMP];
    if opts.fixed_baseline.is_none() {
        free.push(B);
    }
    if opts.fixed_phase.is_none() {
        free.push(PHI);
    }
    if opts.fixed_gamma.is_none() {
        free.push(GAMMA);
    }
    if opts.fixed_period.is_none() {
        free.push(PERIOD);
    }
    free.sort_unstable();
    let mut problem = Problem { times, values, weights: vec![1.0; times.len()], free };

    let mut start = linear_start(times, values, gamma0, period0)
        .ok_or_else(|| Error::InvalidSeries("degenerate design matrix".into()))?;
    if opts.fixed_baseline.is_some() || opts.fixed_phase.is_some() {
        start[B] = opts.fixed_baseline.unwrap_or(start[B]);
        start[PHI] = opts.fixed_phase.unwrap_or(start[PHI]);
        start[AMP] = 1.0;
        let (mut gy, mut gg) = (0.0, 0.0);
        for (&t, &y) in times.iter().zip(values) {
            let g = model(&start, t) - start[B];
            gy += g * (y - start[B]);
            gg += g * g;
        }
        start[AMP] = if gg > 0.0 { gy / gg } else { 0.0 };
    }
    let (mut p, mut converged) = problem.solve(start, opts.max_iterations);

    if opts.downweight_tail {
        let rms = rms(times, values, &p);
        let floor = 2.0 * rms;
        let weights: Vec<f64> = times
            .iter()
            .map(|&t| if p[AMP].abs() * (-p[GAMMA] * t).exp() < floor { TAIL_WEIGHT } else { 1.0 })
            .collect();
        if weights.iter().any(|&w| w != 1.0) {
            problem.weights = weights;
            (p, converged) = problem.solve(p, opts.max_iterations);
        }
    }
    if !converged || p.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonConvergence(opts.max_iterations));
    }
    if p[AMP] < 0.0 && opts.fixed_phase.is_none() {
        p[AMP] = -p[AMP];
        p[PHI] += PI;
    }
    p[PHI] = wrap_angle(p[PHI]);
    Ok(FitResult {
        period: p[PERIOD],
        gamma: p[GAMMA],
        amplitude: p[AMP],
        phase: p[PHI],
        baseline: p[B],
        rms_residual: rms(times, values, &p),
    })
}

fn rms(times: &[f64], values: &[f64], p: &[f64; 5]) -> f64 {
    let ss: f64 = times.iter().zip(values).map(|(&t, &y)| (y - model(p, t)).powi(2)).sum();
    (ss / times.len() as f64).sqrt()
}

/// Convenience wrapper for integer sample times.
pub fn fit_series(times: &[usize], values: &[f64], opts: &FitOptions) -> Result<FitResult> {
    let t: Vec<f64> = times.iter().map(|&t| t as f64).collect();
    fit_damped_cosine(&t, values, opts)
}

/// Leave-one-out jackknife of `Γ` over per-realization series sampled on
/// the same schedule. Returns `(Γ of the full average, standard error)`.
pub fn jackknife_gamma(times: &[f64], runs: &[Vec<f64>], opts: &FitOptions) -> Result<(f64, f64)> {
    let n = runs.len();
    if n < 2 {
        return Err(Error::InvalidSeries("jackknife needs at least two realizations".into()));
    }
    let len = runs[0].len();
    let mut total = vec![0.0; len];
    for r in runs {
        total.iter_mut().zip(r).for_each(|(a, b)| *a += b);
    }
    let full: Vec<f64> = total.iter().map(|v| v / n as f64).collect();
    let estimate = fit_damped_cosine(times, &full, opts)?.gamma;
    let mut loo = Vec::with_capacity(n);
    for r in runs {
        let series: Vec<f64> = total.iter().zip(r).map(|(s, v)| (s - v) / (n - 1) as f64).collect();
        loo.push(fit_damped_cosine(times, &series, opts)?.gamma);
    }
    let mean = loo.iter().sum::<f64>() / n as f64;
    let var = loo.iter().map(|g| (g - mean).powi(2)).sum::<f64>() * (n - 1) as f64 / n as f64;
    Ok((estimate, var.sqrt()))
}
