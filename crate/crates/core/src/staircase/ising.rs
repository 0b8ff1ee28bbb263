//! Ising staircase with step widths `(gamma P)^-(a+1)`.
//!
//! For `a > 1` the steps tile a finite domain up to a null set. Positions are sums of widths
//! of all heights to the left, evaluated over denominators `P <= p_max` by Moebius inversion
//! of the coprimality condition, plus an explicit tail estimate and bound.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::farey::Fraction;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsingParams {
    pub a: f64,
    pub gamma: f64,
}

impl IsingParams {
    pub fn new(a: f64, gamma: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite() && gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "ising parameters need a > 0 and gamma > 0 (got a = {a}, gamma = {gamma})"
            )));
        }
        Ok(IsingParams { a, gamma })
    }

    pub fn is_summable(&self) -> bool {
        self.a > 1.0
    }

    /// Width of a step with denominator `p`.
    pub fn width_of_den(&self, p: u64) -> f64 {
        (self.gamma * p as f64).powf(-(self.a + 1.0))
    }
}

pub fn ising_step_width(p: &IsingParams, f: &Fraction) -> f64 {
    let den = f.to_u64_pair().map_or(f64::INFINITY, |(_, d)| d as f64);
    (p.gamma * den).powf(-(p.a + 1.0))
}

/// Moebius function up to `n`, with the widths of every denominator.
#[derive(Debug)]
pub struct DenominatorTable {
    params: IsingParams,
    p_max: u64,
    mobius: Vec<i8>,
    widths: Vec<f64>,
}

impl DenominatorTable {
    pub fn new(params: IsingParams, p_max: u64) -> Self {
        let n = p_max as usize;
        let mut mobius = vec![1i8; n + 1];
        let mut composite = vec![false; n + 1];
        let mut primes = Vec::new();
        mobius[0] = 0;
        for i in 2..=n {
            if !composite[i] {
                primes.push(i);
                mobius[i] = -1;
            }
            for &pr in &primes {
                let j = i * pr;
                if j > n {
                    break;
                }
                composite[j] = true;
                if i % pr == 0 {
                    mobius[j] = 0;
                    break;
                }
                mobius[j] = -mobius[i];
            }
        }
        let widths = (0..=n as u64)
            .map(|d| if d == 0 { 0.0 } else { params.width_of_den(d) })
            .collect();
        DenominatorTable {
            params,
            p_max,
            mobius,
            widths,
        }
    }

    pub fn p_max(&self) -> u64 {
        self.p_max
    }

    pub fn params(&self) -> &IsingParams {
        &self.params
    }

    /// `sum of width(j/P)` over reduced `j/P` strictly between `lo` and `hi`, `P <= p_max`.
    pub fn partial_sum(&self, lo: &Fraction, hi: &Fraction) -> f64 {
        let (lq, lp) = lo.to_u64_pair().expect("fraction fits in u64");
        let (hq, hp) = hi.to_u64_pair().expect("fraction fits in u64");
        let n = self.p_max as usize;
        // between[e] = #{m : lo*e < m < hi*e}.
        let between: Vec<i64> = (0..=n as u128)
            .map(|e| {
                if e == 0 {
                    return 0;
                }
                let floor_lo = (lq as u128 * e) / lp as u128;
                let ceil_hi = (hq as u128 * e).div_ceil(hp as u128);
                (ceil_hi as i64 - floor_lo as i64 - 1).max(0)
            })
            .collect();
        let mut total = 0.0;
        for d in 1..=n {
            let mu = self.mobius[d];
            if mu == 0 {
                continue;
            }
            let mut acc = 0.0;
            for e in 1..=n / d {
                let c = between[e];
                if c != 0 {
                    acc += c as f64 * self.widths[d * e];
                }
            }
            total += mu as f64 * acc;
        }
        total
    }

    /// Bound on the widths of heights in `(lo, hi)` with denominators above `p_max`.
    pub fn tail_bound(&self, length: f64) -> f64 {
        let a = self.params.a;
        let pm = self.p_max as f64;
        self.params.gamma.powf(-(a + 1.0))
            * (length * pm.powf(1.0 - a) / (a - 1.0) + pm.powf(-a) / a)
    }

    /// Expected tail from the asymptotic density `6/pi^2` of reduced fractions; lies within
    /// `[0, tail_bound]`.
    pub fn tail_estimate(&self, length: f64) -> f64 {
        let a = self.params.a;
        let density = 6.0 / (std::f64::consts::PI * std::f64::consts::PI);
        density * length * self.params.gamma.powf(-(a + 1.0)) * (self.p_max as f64).powf(1.0 - a)
            / (a - 1.0)
    }

    /// `(value, bound)`: total width of heights in `(lo, hi)`, tail included.
    pub fn gap_sum(&self, lo: &Fraction, hi: &Fraction) -> (f64, f64) {
        let length = hi.to_f64() - lo.to_f64();
        let partial = self.partial_sum(lo, hi);
        if !self.params.is_summable() {
            return (partial, f64::INFINITY);
        }
        (
            partial + self.tail_estimate(length),
            self.tail_bound(length),
        )
    }
}

/// `(x_left, x_right, tail_bound)` of the step `f` on the complete staircase, measured from
/// the right edge of the `0/1` step.
pub fn ising_domain_position(p: &IsingParams, f: &Fraction, p_max: u64) -> Result<(f64, f64, f64)> {
    if !p.is_summable() {
        return Err(Error::Divergent(p.a));
    }
    let (x_left, x_right) = ising_partial_position(p, f, p_max)?;
    let table = DenominatorTable::new(*p, p_max);
    let bound = table.tail_bound(f.to_f64());
    Ok((x_left, x_right, bound))
}

/// Truncated sums only: `x_left` counts heights in `(0, f)` with denominator at most `p_max`.
/// Defined for every `a > 0`.
pub fn ising_partial_position(p: &IsingParams, f: &Fraction, p_max: u64) -> Result<(f64, f64)> {
    let (_, den) = f
        .to_u64_pair()
        .ok_or_else(|| Error::OutOfRange(f.to_string()))?;
    if *f <= Fraction::zero() || *f >= Fraction::one() {
        return Err(Error::OutOfRange(f.to_string()));
    }
    if p_max < den {
        return Err(Error::InvalidArgument(format!(
            "p_max = {p_max} is below P = {den}"
        )));
    }
    let table = DenominatorTable::new(*p, p_max);
    let x_left = table.partial_sum(&Fraction::zero(), f);
    Ok((x_left, x_left + ising_step_width(p, f)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fr(q: u64, p: u64) -> Fraction {
        Fraction::from_u64(q, p)
    }

    #[test]
    fn width_examples() {
        let p = IsingParams::new(1.0, 1.0).unwrap();
        assert_eq!(ising_step_width(&p, &fr(1, 2)), 0.25);
        assert_eq!(
            ising_step_width(&p, &fr(1, 3)),
            ising_step_width(&p, &fr(2, 3))
        );
        assert!((ising_step_width(&p, &fr(1, 3)) - 1.0 / 9.0).abs() < 1e-16);
        let q = IsingParams::new(2.0, 2.0).unwrap();
        assert_eq!(ising_step_width(&q, &fr(0, 1)), 0.125);
    }

    #[test]
    fn partial_position_example() {
        let p = IsingParams::new(1.0, 1.0).unwrap();
        let (x_left, x_right) = ising_partial_position(&p, &fr(1, 2), 3).unwrap();
        assert!((x_left - 1.0 / 9.0).abs() < 1e-15);
        assert!((x_right - (1.0 / 9.0 + 0.25)).abs() < 1e-15);
        assert!(matches!(
            ising_domain_position(&p, &fr(1, 2), 3),
            Err(Error::Divergent(_))
        ));
    }

    #[test]
    fn mobius_counts_match_brute_force() {
        let p = IsingParams::new(2.0, 1.0).unwrap();
        let table = DenominatorTable::new(p, 60);
        let (lo, hi) = (fr(2, 7), fr(3, 5));
        let mut brute = 0.0;
        for den in 1..=60u64 {
            for num in 1..den {
                let f = fr(num, den);
                if f.den() == &num_bigint::BigUint::from(den) && f > lo && f < hi {
                    brute += p.width_of_den(den);
                }
            }
        }
        assert!((table.partial_sum(&lo, &hi) - brute).abs() < 1e-14);
    }

    #[test]
    fn mirror_positions() {
        let p = IsingParams::new(2.0, 1.0).unwrap();
        let table = DenominatorTable::new(p, 2000);
        let total = table.partial_sum(&Fraction::zero(), &Fraction::one());
        let f = fr(2, 7);
        let (l, r, b) = ising_domain_position(&p, &f, 2000).unwrap();
        let (l2, r2, _) = ising_domain_position(&p, &fr(5, 7), 2000).unwrap();
        assert!((l - (total - r2)).abs() < 1e-12 + b);
        assert!((r - (total - l2)).abs() < 1e-12 + b);
    }
}
