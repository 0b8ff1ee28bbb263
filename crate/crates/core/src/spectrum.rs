//! Multifractal spectrum of the equiprobable measure on an Omega approximation.
//!
//! `tau(q)` solves `sum_i p_i^q l_i^-tau = 1`; `alpha(q)` is its derivative, obtained by
//! implicit differentiation as a weighted mean; `f = q alpha - tau`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::omega::OmegaApprox;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectrumPoint {
    pub q: f64,
    pub tau: f64,
    pub alpha: f64,
    pub f: f64,
}

/// `-ln l_i` for every interval, checked to be positive.
fn neg_log_lengths(approx: &OmegaApprox) -> Result<Vec<f64>> {
    approx
        .intervals
        .iter()
        .map(|iv| {
            if iv.length > 0.0 && iv.length < 1.0 {
                Ok(-iv.length.ln())
            } else {
                Err(Error::InvalidArgument(format!(
                    "spectrum needs lengths in (0, 1); {} has {}",
                    iv.label, iv.length
                )))
            }
        })
        .collect()
}

/// `ln sum_i exp(q ln p + tau L_i)` with `L_i = -ln l_i`, and its normalized weights.
fn log_partition(ln_p: f64, neg_ln_l: &[f64], q: f64, tau: f64) -> (f64, Vec<f64>) {
    let base = q * ln_p;
    let terms: Vec<f64> = neg_ln_l.iter().map(|&l| base + tau * l).collect();
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = terms.iter().map(|&t| (t - m).exp()).collect();
    let s: f64 = w.iter().sum();
    (m + s.ln(), w.into_iter().map(|x| x / s).collect())
}

fn solve_tau(ln_p: f64, neg_ln_l: &[f64], q: f64) -> f64 {
    // The log-partition sum is increasing in tau with slope in [min L, max L].
    let g = |tau: f64| log_partition(ln_p, neg_ln_l, q, tau).0;
    let (mut lo, mut hi) = (-1.0, 1.0);
    while g(lo) > 0.0 {
        lo *= 2.0;
    }
    while g(hi) < 0.0 {
        hi *= 2.0;
    }
    let mut tau = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (val, w) = log_partition(ln_p, neg_ln_l, q, tau);
        if val == 0.0 {
            break;
        }
        if val < 0.0 {
            lo = tau;
        } else {
            hi = tau;
        }
        let slope: f64 = w.iter().zip(neg_ln_l).map(|(w, l)| w * l).sum();
        let newton = tau - val / slope;
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - tau).abs() <= 1e-16 * tau.abs().max(1.0)
            || hi - lo <= f64::EPSILON * hi.abs().max(1.0)
        {
            tau = next;
            break;
        }
        tau = next;
    }
    tau
}

/// The unique `tau` with `sum_i 2^(-k q) l_i^-tau = 1`.
pub fn tau_of_q(approx: &OmegaApprox, q: f64) -> Result<f64> {
    let l = neg_log_lengths(approx)?;
    Ok(solve_tau(approx.log_measure(), &l, q))
}

fn point_at(ln_p: f64, neg_ln_l: &[f64], q: f64) -> SpectrumPoint {
    let tau = solve_tau(ln_p, neg_ln_l, q);
    let (_, w) = log_partition(ln_p, neg_ln_l, q, tau);
    // alpha = sum w ln p / sum w ln l, with sum w = 1.
    let mean_l: f64 = w.iter().zip(neg_ln_l).map(|(w, l)| w * l).sum();
    let alpha = -ln_p / mean_l;
    SpectrumPoint {
        q,
        tau,
        alpha,
        f: q * alpha - tau,
    }
}

/// `(q, tau, alpha, f)` for every `q` in the grid.
pub fn spectrum(
    approx: &OmegaApprox,
    q_grid: &[f64],
    exec: Executor,
) -> Result<Vec<SpectrumPoint>> {
    if q_grid.iter().any(|q| !q.is_finite()) {
        return Err(Error::InvalidArgument("q grid must be finite".into()));
    }
    let l = neg_log_lengths(approx)?;
    let ln_p = approx.log_measure();
    Ok(exec.map(q_grid, |&q| point_at(ln_p, &l, q)))
}

/// `-tau(0)`: the `D` with `sum_i l_i^D = 1`.
pub fn dimension_estimate(approx: &OmegaApprox) -> Result<f64> {
    Ok(-tau_of_q(approx, 0.0)?)
}

/// `alpha(q)` as a central difference of `tau`.
pub fn alpha_finite_difference(approx: &OmegaApprox, q: f64, h: f64) -> Result<f64> {
    Ok((tau_of_q(approx, q + h)? - tau_of_q(approx, q - h)?) / (2.0 * h))
}

/// 81 points on `[-20, 20]`, `q = 20 sinh(3 s) / sinh(3)` for `s` evenly spaced in `[-1, 1]`.
pub fn default_q_grid() -> Vec<f64> {
    (0..81)
        .map(|i| {
            let s = (i as f64 - 40.0) / 40.0;
            if i == 40 {
                0.0
            } else {
                20.0 * (3.0 * s).sinh() / 3f64.sinh()
            }
        })
        .collect()
}

/// Finite-depth summary of a spectrum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumSummary {
    pub depth: usize,
    /// `alpha` at the largest `q`.
    pub alpha_min: f64,
    /// `alpha` at the smallest `q`.
    pub alpha_max: f64,
    /// `f` at the largest `q`.
    pub f_left: f64,
    /// `f` at the smallest `q`.
    pub f_right: f64,
    /// `alpha` where `f` peaks.
    pub alpha_at_f_max: f64,
    pub f_max: f64,
    /// Share of `[alpha_min, alpha_max]` over which `f` increases with `alpha`.
    pub increasing_share: f64,
    /// `(alpha_max - alpha_at_f_max) / (alpha_max - alpha_min)`.
    pub argmax_gap: f64,
}

pub fn summarize(depth: usize, points: &[SpectrumPoint]) -> Result<SpectrumSummary> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument(
            "summary needs at least two points".into(),
        ));
    }
    let mut by_alpha: Vec<&SpectrumPoint> = points.iter().collect();
    by_alpha.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    let hi_q = points
        .iter()
        .max_by(|a, b| a.q.total_cmp(&b.q))
        .expect("non-empty");
    let lo_q = points
        .iter()
        .min_by(|a, b| a.q.total_cmp(&b.q))
        .expect("non-empty");
    let peak = points
        .iter()
        .max_by(|a, b| a.f.total_cmp(&b.f))
        .expect("non-empty");
    let range = lo_q.alpha - hi_q.alpha;
    let rising: f64 = by_alpha
        .windows(2)
        .filter(|w| w[1].f > w[0].f)
        .map(|w| w[1].alpha - w[0].alpha)
        .sum();
    let (increasing_share, argmax_gap) = if range > 0.0 {
        (rising / range, (lo_q.alpha - peak.alpha) / range)
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(SpectrumSummary {
        depth,
        alpha_min: hi_q.alpha,
        alpha_max: lo_q.alpha,
        f_left: hi_q.f,
        f_right: lo_q.f,
        alpha_at_f_max: peak.alpha,
        f_max: peak.f,
        increasing_share,
        argmax_gap,
    })
}
