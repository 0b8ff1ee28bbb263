//! The critical sine circle map `F(x) = x + w + sin(2 pi x) / (2 pi)` and its locking intervals.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::farey::Fraction;

const TWO_PI: f64 = 2.0 * PI;
const INV_TWO_PI: f64 = 1.0 / TWO_PI;
/// Golden-section shrink factor.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// One step of the lift.
#[inline]
pub fn circle_map_step(phase: f64, omega: f64) -> f64 {
    phase + omega + (TWO_PI * phase).sin() * INV_TWO_PI
}

/// Mean rotation `(x_{t+n} - x_t) / n` of the orbit of `0` after `transient` steps.
pub fn winding_number(omega: f64, n_iter: usize, transient: usize) -> f64 {
    let mut x = 0.0;
    for _ in 0..transient {
        x = circle_map_step(x, omega);
    }
    // Keep the phase small; only the integer shifts are accumulated separately.
    let start = x;
    let mut shift = 0.0;
    for _ in 0..n_iter {
        x = circle_map_step(x, omega);
        let k = x.floor();
        x -= k;
        shift += k;
    }
    (x + shift - start) / n_iter as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleSolverConfig {
    pub omega_tol: f64,
    pub phase_grid: usize,
    pub refine_iters: usize,
    pub max_period: u64,
}

impl Default for CircleSolverConfig {
    fn default() -> Self {
        CircleSolverConfig {
            omega_tol: 1e-10,
            phase_grid: 256,
            refine_iters: 60,
            max_period: 256,
        }
    }
}

impl CircleSolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega_tol > 0.0 && self.omega_tol.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "omega_tol {}",
                self.omega_tol
            )));
        }
        if self.phase_grid < 64 {
            return Err(Error::InvalidArgument(format!(
                "phase_grid must be >= 64, got {}",
                self.phase_grid
            )));
        }
        if self.max_period == 0 {
            return Err(Error::InvalidArgument("max_period must be >= 1".into()));
        }
        Ok(())
    }
}

/// A mode-locking interval `[omega_minus, omega_plus]` of the height `Q/P`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LockingInterval {
    pub height: Fraction,
    pub omega_minus: f64,
    pub omega_plus: f64,
    pub width: f64,
    pub converged: bool,
    /// Largest `|margin|` at the reported edges.
    pub residual: f64,
}

/// `h(x) = F^P(x) - x - Q` at fixed `omega`.
struct Displacement {
    omega: f64,
    p: u64,
    q: f64,
}

impl Displacement {
    #[inline]
    fn eval(&self, x0: f64) -> f64 {
        let mut x = x0;
        for _ in 0..self.p {
            x = circle_map_step(x, self.omega);
        }
        x - x0 - self.q
    }
}

fn period_of(f: &Fraction, cfg: &CircleSolverConfig) -> Result<(u64, u64)> {
    let (q, p) = f.to_u64_pair().ok_or(Error::PeriodTooLarge {
        period: u64::MAX,
        max: cfg.max_period,
    })?;
    if p > cfg.max_period {
        return Err(Error::PeriodTooLarge {
            period: p,
            max: cfg.max_period,
        });
    }
    Ok((q, p))
}

fn grid_size(p: u64, cfg: &CircleSolverConfig) -> usize {
    cfg.phase_grid.max(32 * p as usize)
}

/// Maximum of `sign * h` over one period of the phase.
fn extremum(h: &Displacement, sign: f64, grid: usize, refine_iters: usize) -> f64 {
    let step = 1.0 / grid as f64;
    let vals: Vec<f64> = (0..grid).map(|i| sign * h.eval(i as f64 * step)).collect();
    let mut best = f64::NEG_INFINITY;
    let mut peaks: Vec<(f64, usize)> = (0..grid)
        .filter(|&i| {
            let prev = vals[(i + grid - 1) % grid];
            let next = vals[(i + 1) % grid];
            vals[i] >= prev && vals[i] >= next
        })
        .map(|i| (vals[i], i))
        .collect();
    peaks.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(v, i) in peaks.iter().take(3) {
        best = best.max(v);
        let centre = i as f64 * step;
        let (mut lo, mut hi) = (centre - step, centre + step);
        let mut x1 = hi - INV_PHI * (hi - lo);
        let mut x2 = lo + INV_PHI * (hi - lo);
        let (mut f1, mut f2) = (sign * h.eval(x1), sign * h.eval(x2));
        for _ in 0..refine_iters {
            if f1 >= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - INV_PHI * (hi - lo);
                f1 = sign * h.eval(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + INV_PHI * (hi - lo);
                f2 = sign * h.eval(x2);
            }
        }
        best = best.max(f1).max(f2);
    }
    if peaks.is_empty() {
        best = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    }
    best
}

fn max_h(omega: f64, q: u64, p: u64, cfg: &CircleSolverConfig) -> f64 {
    let h = Displacement {
        omega,
        p,
        q: q as f64,
    };
    extremum(&h, 1.0, grid_size(p, cfg), cfg.refine_iters)
}

fn min_h(omega: f64, q: u64, p: u64, cfg: &CircleSolverConfig) -> f64 {
    let h = Displacement {
        omega,
        p,
        q: q as f64,
    };
    -extremum(&h, -1.0, grid_size(p, cfg), cfg.refine_iters)
}

/// Signed locking margin `min(max h, -min h)`: non-negative iff a `P`-periodic orbit of
/// rotation `Q/P` exists at `omega`.
pub fn locking_test(omega: f64, f: &Fraction, cfg: &CircleSolverConfig) -> Result<f64> {
    let (q, p) = period_of(f, cfg)?;
    Ok(max_h(omega, q, p, cfg).min(-min_h(omega, q, p, cfg)))
}

/// Bisection for the sign change of `g` (increasing) on `[lo, hi]`.
fn bisect<G: Fn(f64) -> f64>(g: G, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    if !(g(lo) < 0.0 && g(hi) >= 0.0) {
        return None;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// The superstable parameter, where the critical point `1/2` is periodic with rotation `Q/P`.
fn superstable_omega(q: u64, p: u64, tol: f64) -> Option<f64> {
    let centre = q as f64 / p as f64;
    let h = Displacement {
        omega: 0.0,
        p,
        q: q as f64,
    };
    let g = |w: f64| Displacement { omega: w, ..h }.eval(0.5);
    // `g` is increasing in omega; the tongue lies within 1/(2 pi) of Q/P.
    bisect(
        g,
        centre - INV_TWO_PI - 1e-3,
        centre + INV_TWO_PI + 1e-3,
        tol.min(1e-13),
    )
}

/// Locates both edges of the `Q/P` tongue by bisection on the locking margin.
pub fn locking_interval(f: &Fraction, cfg: &CircleSolverConfig) -> Result<LockingInterval> {
    cfg.validate()?;
    let (q, p) = period_of(f, cfg)?;
    let fallback = |residual: f64| LockingInterval {
        height: f.clone(),
        omega_minus: f64::NAN,
        omega_plus: f64::NAN,
        width: 0.0,
        converged: false,
        residual,
    };
    let Some(centre) = superstable_omega(q, p, cfg.omega_tol) else {
        return Ok(fallback(f64::INFINITY));
    };
    let reach = INV_TWO_PI + 0.01;
    let qp = q as f64 / p as f64;
    let left = bisect(|w| max_h(w, q, p, cfg), qp - reach, centre, cfg.omega_tol);
    // Mirrored so that the bracketed function increases: u = -omega.
    let right = bisect(
        |u| -min_h(-u, q, p, cfg),
        -(qp + reach),
        -centre,
        cfg.omega_tol,
    )
    .map(|u| -u);
    let (Some(omega_minus), Some(omega_plus)) = (left, right) else {
        return Ok(fallback(f64::INFINITY));
    };
    let residual = max_h(omega_minus, q, p, cfg)
        .abs()
        .max(min_h(omega_plus, q, p, cfg).abs());
    let width = omega_plus - omega_minus;
    Ok(LockingInterval {
        height: f.clone(),
        omega_minus,
        omega_plus,
        width,
        converged: width > 0.0 && omega_minus <= centre && centre <= omega_plus,
        residual,
    })
}
