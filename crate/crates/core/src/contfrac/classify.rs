//! Growth-type estimates from the denominators `P_n`.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{ln_big, rule_digit, DigitRule, PartialQuotients};
use crate::error::{Error, Result};

/// Tail ratios `ln P_{n+1} / ln P_n` above this value count as divergent.
pub const G_INF_RATIO: f64 = 10.0;

/// Smallest per-step increase of the tail ratios that also counts as divergent growth.
pub const G_INF_MIN_INCREMENT: f64 = 0.5;

/// Exact continuants are dropped in favour of logarithms beyond this many bits.
const EXACT_BITS: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum TypeLabel {
    /// Finite type with the estimated exponent.
    Finite(f64),
    Infinite,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypeEstimate {
    pub beta_hat: f64,
    /// `(n, ln P_{n+1} / ln P_n)` for `n < N` with `P_n > 1`.
    pub ratio_series: Vec<(usize, f64)>,
    /// `(n, ln P_n / ln(P_n P_{n+1}))`, i.e. `ln(1/P_n) / ln(eps_n)`.
    pub exponent_series: Vec<(usize, f64)>,
    /// `(n, kappa_n)` with `1/P_n = kappa_n eps_n^(1/beta_hat)`.
    pub kappa_series: Vec<(usize, f64)>,
    pub label: TypeLabel,
    pub window: usize,
}

/// `ln P_1, ..., ln P_n`.
///
/// Exact while the continuants stay below 65536 bits; afterwards the recurrence is carried in
/// log space, where rule digits are replaced by their logarithms.
pub fn log_denominators(pq: &PartialQuotients, n: usize) -> Result<Vec<f64>> {
    if let Some(avail) = pq.available() {
        if n > avail {
            return Err(Error::NotEnoughDigits {
                needed: n,
                available: avail,
            });
        }
    }
    let prefix = pq.prefix();
    let mut out = Vec::with_capacity(n);
    let (mut p_prev, mut p_cur) = (BigUint::zero(), BigUint::one());
    let mut idx = 1;
    while idx <= n {
        let a = if idx <= prefix.len() {
            prefix[idx - 1].clone()
        } else {
            rule_digit(pq.rule().expect("checked"), idx, idx - prefix.len(), &p_cur)
        };
        let p_next = &a * &p_cur + &p_prev;
        p_prev = std::mem::replace(&mut p_cur, p_next);
        out.push(ln_big(&p_cur));
        idx += 1;
        if p_cur.bits() > EXACT_BITS {
            break;
        }
    }
    if idx > n {
        return Ok(out);
    }

    let (mut l_prev, mut l_cur) = (ln_big(&p_prev), ln_big(&p_cur));
    while idx <= n {
        let ln_a = if idx <= prefix.len() {
            ln_big(&prefix[idx - 1])
        } else {
            let local = idx - prefix.len();
            match pq.rule().expect("checked") {
                DigitRule::Calibrated { excess } => (excess * l_cur).max(0.0),
                DigitRule::Liouville { a1 } if local == 1 => (*a1 as f64).ln(),
                DigitRule::Liouville { .. } => (idx - 1) as f64 * l_cur,
                rule => ln_big(&rule_digit(rule, idx, local, &BigUint::one())),
            }
        };
        let l_next = log_add_exp(ln_a + l_cur, l_prev);
        l_prev = std::mem::replace(&mut l_cur, l_next);
        out.push(l_cur);
        idx += 1;
    }
    Ok(out)
}

fn log_add_exp(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    hi + (lo - hi).exp().ln_1p()
}

/// Estimates the growth exponent from `P_1..P_N`. `window` defaults to `N / 2`.
pub fn beta_estimate(
    pq: &PartialQuotients,
    n: usize,
    window: Option<usize>,
) -> Result<TypeEstimate> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("N must be >= 2, got {n}")));
    }
    let window = window.unwrap_or(n / 2).max(2);
    if window > n {
        return Err(Error::InvalidArgument(format!(
            "window {window} exceeds N = {n}"
        )));
    }
    let logs = log_denominators(pq, n)?;
    // logs[k - 1] = ln P_k.
    let ratio_series: Vec<(usize, f64)> = (1..n)
        .filter(|&k| logs[k - 1] > 0.0)
        .map(|k| (k, logs[k] / logs[k - 1]))
        .collect();
    let exponent_series: Vec<(usize, f64)> = (1..n)
        .filter(|&k| logs[k - 1] > 0.0)
        .map(|k| (k, logs[k - 1] / (logs[k - 1] + logs[k])))
        .collect();

    let first_in_window = n - window;
    let tail: Vec<f64> = ratio_series
        .iter()
        .filter(|(k, _)| *k >= first_in_window)
        .map(|&(_, r)| r)
        .collect();
    if tail.len() < 2 {
        return Ok(TypeEstimate {
            beta_hat: f64::NAN,
            ratio_series,
            exponent_series,
            kappa_series: Vec::new(),
            label: TypeLabel::Inconclusive,
            window,
        });
    }
    let max_ratio = tail.iter().cloned().fold(f64::MIN, f64::max);
    let beta_hat = (1.0 + max_ratio).max(2.0);
    let increasing = tail.windows(2).all(|w| w[1] > w[0]);
    let steady_growth = tail.windows(2).all(|w| w[1] - w[0] >= G_INF_MIN_INCREMENT);
    let last = *tail.last().expect("non-empty");
    let label = if increasing && (last > G_INF_RATIO || steady_growth) {
        TypeLabel::Infinite
    } else {
        TypeLabel::Finite(beta_hat)
    };
    let kappa_series = (1..n)
        .map(|k| (k, (-logs[k - 1] + (logs[k - 1] + logs[k]) / beta_hat).exp()))
        .collect();
    Ok(TypeEstimate {
        beta_hat,
        ratio_series,
        exponent_series,
        kappa_series,
        label,
        window,
    })
}
