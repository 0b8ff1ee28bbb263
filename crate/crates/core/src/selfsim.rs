//! Regressions behind the self-similarity experiments.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::farey::{fractions_up_to, Fraction};
use crate::omega::omega_approx;
use crate::staircase::StaircaseModel;

/// Ordinary least squares with intercept.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub n_points: usize,
    pub residual_max: f64,
}

pub fn ols(x: &[f64], y: &[f64]) -> Result<FitResult> {
    let n = x.len();
    if n != y.len() || n < 2 {
        return Err(Error::InvalidArgument(format!(
            "least squares needs two or more paired points (got {} and {})",
            x.len(),
            y.len()
        )));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("all x values coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(a, b)| b - (intercept + slope * a))
        .collect();
    let sse: f64 = residuals.iter().map(|r| r * r).sum();
    let r2 = if syy == 0.0 {
        1.0
    } else {
        (1.0 - sse / syy).clamp(0.0, 1.0)
    };
    Ok(FitResult {
        slope,
        intercept,
        r2,
        n_points: n,
        residual_max: residuals.iter().fold(0.0, |m, r| m.max(r.abs())),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Fig1Row {
    pub p: u64,
    pub mean_width: f64,
    pub log_p: f64,
    pub log_mean_width: f64,
}

/// Regression of `log10` mean step width against `log10 P` for `P = 1..=p_max`. The
/// denominator-1 mean is taken over the `0/1` and `1/1` steps.
pub fn fig1_regression(
    model: &dyn StaircaseModel,
    p_max: u64,
    exec: Executor,
) -> Result<(FitResult, Vec<Fig1Row>)> {
    if p_max < 2 {
        return Err(Error::InvalidArgument("fig1 needs p_max >= 2".into()));
    }
    let fractions = fractions_up_to(p_max);
    match model.prepare(&fractions, exec) {
        Ok(()) => {}
        Err(Error::NotConverged(list)) => return Err(Error::MissingWidths(list)),
        Err(Error::PeriodTooLarge { .. }) => {
            let missing = fractions.iter().filter(|f| model.step_width(f).is_err());
            return Err(Error::MissingWidths(
                missing.map(|f| f.to_string()).collect(),
            ));
        }
        Err(e) => return Err(e),
    }
    let widths: Vec<(u64, std::result::Result<f64, String>)> = fractions
        .iter()
        .map(|f| {
            let (_, p) = f.to_u64_pair().expect("small denominators");
            (p, model.step_width(f).map_err(|_| f.to_string()))
        })
        .collect();
    let missing: Vec<String> = widths.iter().filter_map(|(_, w)| w.clone().err()).collect();
    if !missing.is_empty() {
        return Err(Error::MissingWidths(missing));
    }
    let mut rows = Vec::with_capacity(p_max as usize);
    for p in 1..=p_max {
        let ws: Vec<f64> = widths
            .iter()
            .filter(|(d, _)| *d == p)
            .map(|(_, w)| *w.as_ref().expect("checked"))
            .collect();
        let mean_width = ws.iter().sum::<f64>() / ws.len() as f64;
        rows.push(Fig1Row {
            p,
            mean_width,
            log_p: (p as f64).log10(),
            log_mean_width: mean_width.log10(),
        });
    }
    let x: Vec<f64> = rows.iter().map(|r| r.log_p).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.log_mean_width).collect();
    Ok((ols(&x, &y)?, rows))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SizePoint {
    /// Left end of the Farey-Brocot label.
    pub left: Fraction,
    pub right: Fraction,
    pub omega_len: f64,
    pub fb_len: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SizesFit {
    pub k: usize,
    pub fit: FitResult,
    pub points: Vec<SizePoint>,
}

/// Euclidean length of each depth-`k` label against the length of its Omega interval.
pub fn sizes_regression(model: &dyn StaircaseModel, k: usize, exec: Executor) -> Result<SizesFit> {
    let approx = omega_approx(model, k, exec)?;
    let points: Vec<SizePoint> = approx
        .intervals
        .iter()
        .map(|iv| SizePoint {
            left: iv.label.left.clone(),
            right: iv.label.right.clone(),
            omega_len: iv.length,
            fb_len: iv.label.euclidean_length_f64(),
        })
        .collect();
    let x: Vec<f64> = points.iter().map(|p| p.omega_len).collect();
    let y: Vec<f64> = points.iter().map(|p| p.fb_len).collect();
    Ok(SizesFit {
        k,
        fit: ols(&x, &y)?,
        points,
    })
}

/// Inner fits below this `r2` are flagged.
pub const PROPORTIONALITY_R2: f64 = 0.9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlopeLaw {
    /// `(k, m_k)`.
    pub entries: Vec<(usize, f64)>,
    pub fits: Vec<SizesFit>,
    pub linear_fit: FitResult,
    /// Depths whose inner fit has `r2 < 0.9`.
    pub flagged: Vec<usize>,
}

pub fn slope_law(
    model: &dyn StaircaseModel,
    k_range: std::ops::RangeInclusive<usize>,
    exec: Executor,
) -> Result<SlopeLaw> {
    if k_range.is_empty() || *k_range.start() < 2 || k_range.end() - k_range.start() < 1 {
        return Err(Error::InvalidArgument(format!(
            "slope law needs at least two depths starting at 2 or above (got {k_range:?})"
        )));
    }
    let fits: Vec<SizesFit> = k_range
        .map(|k| sizes_regression(model, k, exec))
        .collect::<Result<_>>()?;
    let entries: Vec<(usize, f64)> = fits.iter().map(|f| (f.k, f.fit.slope)).collect();
    let flagged = fits
        .iter()
        .filter(|f| f.fit.r2 < PROPORTIONALITY_R2)
        .map(|f| f.k)
        .collect();
    let x: Vec<f64> = entries.iter().map(|e| e.0 as f64).collect();
    let y: Vec<f64> = entries.iter().map(|e| e.1).collect();
    Ok(SlopeLaw {
        linear_fit: ols(&x, &y)?,
        entries,
        fits,
        flagged,
    })
}
