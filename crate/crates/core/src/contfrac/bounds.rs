//! Exact checks of the classical approximation bounds and the Jarnik-class claims.
//!
//! Irrationals are never evaluated in floating point: an irrational given by digits is the
//! open interval between `[a_1..a_M]` and `[a_1..a_M + 1]`, and real exponents are replaced by
//! small-denominator rationals so that `x < s^(-e/d)` becomes `x^d s^e < 1` over integers.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use super::{convergents_of, irrational_bracket, PartialQuotients};
use crate::error::{Error, Result};
use crate::farey::Fraction;

/// A positive rational exponent `num / den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RationalExponent {
    pub num: u64,
    pub den: u64,
}

impl RationalExponent {
    /// Best approximation with denominator at most 1000; rejects values that are not within
    /// `1e-12` of such a rational.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !(x.is_finite() && x > 0.0) {
            return Err(Error::InvalidArgument(format!("exponent {x}")));
        }
        let (num, den) = best_rational(x, 1000);
        if ((num as f64 / den as f64) - x).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "exponent {x} has no rational form with denominator <= 1000"
            )));
        }
        Ok(RationalExponent { num, den })
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// Closest `p/q` to `x > 0` with `q <= max_den`, by walking the convergents and the last
/// admissible semiconvergent.
fn best_rational(x: f64, max_den: u64) -> (u64, u64) {
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut v = x;
    loop {
        let a = v.floor();
        if a > 1e15 {
            break;
        }
        let a = a as u64;
        let q2 = a.saturating_mul(q1).saturating_add(q0);
        if q2 > max_den {
            let k = (max_den - q0) / q1.max(1);
            let (ps, qs) = (k * p1 + p0, k * q1 + q0);
            let err_semi = (ps as f64 / qs as f64 - x).abs();
            let err_conv = (p1 as f64 / q1 as f64 - x).abs();
            if qs > 0 && err_semi < err_conv {
                return (ps, qs);
            }
            break;
        }
        let p2 = a * p1 + p0;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = v - a as f64;
        if frac < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    (p1, q1)
}

/// `x^d * s^e` compared with 1.
fn power_vs_one(x: &BigRational, exp: RationalExponent, s: &BigUint) -> std::cmp::Ordering {
    let xd = num_traits::pow(x.clone(), exp.den as usize);
    let se = BigRational::from_integer(num_traits::pow(s.clone(), exp.num as usize).into());
    (xd * se).cmp(&BigRational::one())
}

/// Checks `1/(P_n (P_n + P_{n+1})) < |i - Q_n/P_n| < 1/(P_n P_{n+1})` exactly, with `i`
/// bracketed by all available digits (at least `n + 2`).
pub fn approximation_bounds_check(pq: &PartialQuotients, n: usize) -> Result<bool> {
    if n == 0 {
        return Err(Error::InvalidArgument("index n must be >= 1".into()));
    }
    let m = match pq.available() {
        Some(avail) if avail < n + 2 => {
            return Err(Error::NotEnoughDigits {
                needed: n + 2,
                available: avail,
            })
        }
        Some(avail) => avail,
        None => n + 2,
    };
    let digits = pq.digits(m)?;
    let convs = convergents_of(&digits);
    let (lo, hi) = irrational_bracket(&digits);
    let c_n = convs[n - 1].to_rational();
    let p_n = &convs[n - 1].p;
    let p_next = &convs[n].p;
    let lower = BigRational::new(BigUint::one().into(), (p_n * (p_n + p_next)).into());
    let upper = BigRational::new(BigUint::one().into(), (p_n * p_next).into());
    let (d_lo, d_hi) = distance_range(&c_n, &lo, &hi)
        .ok_or_else(|| Error::InvalidArgument(format!("convergent {n} lies inside the bracket")))?;
    // The bracket is open, so d_lo < |i - c_n| < d_hi.
    Ok(d_lo >= lower && d_hi <= upper)
}

/// `(inf, sup)` of `|x - r|` for `x` in the open interval `(lo, hi)`; `None` if `r` is inside.
fn distance_range(
    r: &BigRational,
    lo: &BigRational,
    hi: &BigRational,
) -> Option<(BigRational, BigRational)> {
    if r <= lo {
        Some((lo - r, hi - r))
    } else if r >= hi {
        Some((r - hi, r - lo))
    } else {
        None
    }
}

/// Result of the brute-force enumeration of good rational approximations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Claim1Outcome {
    /// No denominator `s` in `[s_min, s_max]`.
    EmptyDomain { s_min: u64, s_max: u64 },
    Checked {
        s_min: u64,
        /// Fractions meeting `|i - r/s| < s^-(beta+theta)` (all of them convergents if the claim holds).
        satisfying: Vec<(u64, u64)>,
        /// Fractions meeting the bound that are not convergents.
        violations: Vec<(u64, u64)>,
        /// Fractions the digit bracket could not decide.
        undecided: Vec<(u64, u64)>,
    },
}

impl Claim1Outcome {
    pub fn violations(&self) -> &[(u64, u64)] {
        match self {
            Claim1Outcome::EmptyDomain { .. } => &[],
            Claim1Outcome::Checked { violations, .. } => violations,
        }
    }
}

/// Enumerates every `r/s` with `ceil(2^(1/theta)) <= s <= s_max` and returns those with
/// `|i - r/s| < 1/s^(beta+theta)` that are not convergents of `i`.
pub fn claim1_oracle(
    pq: &PartialQuotients,
    beta: f64,
    theta: f64,
    s_max: u64,
) -> Result<Claim1Outcome> {
    if beta < 2.0 || !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "need beta >= 2 and 0 < theta < 1 (got {beta}, {theta})"
        )));
    }
    let exp = RationalExponent::from_f64(beta + theta)?;
    let s_min = 2f64.powf(1.0 / theta).ceil() as u64;
    if s_max < s_min {
        return Ok(Claim1Outcome::EmptyDomain { s_min, s_max });
    }

    // Enough digits that the bracket is far narrower than s_max^-(beta+theta).
    let mut m = 24usize;
    loop {
        let m_eff = pq.available().map_or(m, |a| a.min(m));
        let digits = pq.digits(m_eff)?;
        let (lo, hi) = irrational_bracket(&digits);
        let convs: Vec<Fraction> = convergents_of(&digits)
            .iter()
            .map(|c| c.fraction())
            .collect();
        let mut satisfying = Vec::new();
        let mut violations = Vec::new();
        let mut undecided = Vec::new();
        for s in s_min..=s_max {
            let sb = BigUint::from(s);
            let s_rat = BigRational::from_integer(sb.clone().into());
            let r_lo = (&lo * &s_rat).floor().to_integer().to_u64().unwrap_or(0);
            let r_hi = (&hi * &s_rat).ceil().to_integer().to_u64().unwrap_or(s);
            for r in r_lo..=r_hi.min(s) {
                let rs = BigRational::new(r.into(), s.into());
                let decided = match distance_range(&rs, &lo, &hi) {
                    None => None,
                    Some((d_lo, d_hi)) => {
                        if power_vs_one(&d_hi, exp, &sb) != std::cmp::Ordering::Greater {
                            Some(true)
                        } else if power_vs_one(&d_lo, exp, &sb) != std::cmp::Ordering::Less {
                            Some(false)
                        } else {
                            None
                        }
                    }
                };
                match decided {
                    Some(false) => {}
                    Some(true) => {
                        let g = r.gcd(&s);
                        let reduced = Fraction::from_u64(r / g, s / g);
                        satisfying.push((r, s));
                        if !convs.contains(&reduced) {
                            violations.push((r, s));
                        }
                    }
                    None => undecided.push((r, s)),
                }
            }
        }
        let exhausted = pq.available().is_some_and(|a| a <= m);
        if undecided.is_empty() || exhausted || m >= 1024 {
            return Ok(Claim1Outcome::Checked {
                s_min,
                satisfying,
                violations,
                undecided,
            });
        }
        m *= 2;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum ProbeStatus {
    /// Both inequalities verified on the sampled range.
    Holds,
    /// No conclusion within the horizon `N`.
    Inconclusive(usize),
}

/// Outcome of probing `P_n(P_n + P_{n+1}) < P_n^(beta+delta)` and
/// `P_n^(beta-theta) < P_n P_{n+1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClaimProbe {
    /// Least `n0` such that the first inequality holds for every `n0 <= n <= N`.
    pub n_delta: Option<usize>,
    /// Indices in the tail `[N/2, N]` where the second inequality holds.
    pub witnesses: Vec<usize>,
    pub status: ProbeStatus,
}

/// Evaluates both claims over `n <= N` with exact integer powers.
pub fn claim2_claim3_probe(
    pq: &PartialQuotients,
    beta: f64,
    delta: f64,
    theta: f64,
    n_max: usize,
) -> Result<ClaimProbe> {
    if beta < 2.0 || delta <= 0.0 || !(theta > 0.0 && theta < 1.0) || n_max < 2 {
        return Err(Error::InvalidArgument(format!(
            "claim probe needs beta >= 2, delta > 0, 0 < theta < 1, N >= 2 (got {beta}, {delta}, {theta}, {n_max})"
        )));
    }
    let upper = RationalExponent::from_f64(beta + delta)?;
    let lower = RationalExponent::from_f64(beta - theta)?;
    let digits = pq.digits(n_max + 1)?;
    let dens: Vec<BigUint> = convergents_of(&digits).into_iter().map(|c| c.p).collect();

    // dens[n - 1] = P_n.
    let eq6 = |n: usize| {
        let p = &dens[n - 1];
        let lhs = (p * (p + &dens[n])).pow(upper.den as u32);
        lhs < p.pow(upper.num as u32)
    };
    let eq7 = |n: usize| {
        let p = &dens[n - 1];
        p.pow(lower.num as u32) < (p * &dens[n]).pow(lower.den as u32)
    };

    let mut n_delta = None;
    for n in (1..=n_max).rev() {
        if eq6(n) {
            n_delta = Some(n);
        } else {
            break;
        }
    }
    let witnesses: Vec<usize> = (n_max.div_ceil(2).max(1)..=n_max)
        .filter(|&n| eq7(n))
        .collect();
    let status = if n_delta.is_some() && !witnesses.is_empty() {
        ProbeStatus::Holds
    } else {
        ProbeStatus::Inconclusive(n_max)
    };
    Ok(ClaimProbe {
        n_delta,
        witnesses,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contfrac::DigitRule;

    #[test]
    fn exponent_parsing() {
        assert_eq!(
            RationalExponent::from_f64(2.3).unwrap(),
            RationalExponent { num: 23, den: 10 }
        );
        assert_eq!(
            RationalExponent::from_f64(2.5).unwrap(),
            RationalExponent { num: 5, den: 2 }
        );
        assert!(RationalExponent::from_f64(std::f64::consts::PI).is_err());
    }

    #[test]
    fn bounds_examples() {
        assert!(approximation_bounds_check(&PartialQuotients::golden(), 5).unwrap());
        let pq = PartialQuotients::finite([1u32, 2, 3, 4, 5, 6, 7]).unwrap();
        assert!(approximation_bounds_check(&pq, 3).unwrap());
        assert!(approximation_bounds_check(&PartialQuotients::silver(), 1).unwrap());
        assert!(matches!(
            approximation_bounds_check(&pq, 6),
            Err(Error::NotEnoughDigits { .. })
        ));
    }

    #[test]
    fn claim1_examples() {
        let out = claim1_oracle(&PartialQuotients::golden(), 2.0, 0.5, 200).unwrap();
        assert!(out.violations().is_empty());
        match &out {
            Claim1Outcome::Checked {
                s_min, undecided, ..
            } => {
                assert_eq!(*s_min, 4);
                assert!(undecided.is_empty());
            }
            other => panic!("unexpected {other:?}"),
        }
        let alt = PartialQuotients::with_rule(DigitRule::Periodic(vec![1, 2])).unwrap();
        assert!(claim1_oracle(&alt, 2.0, 0.8, 100)
            .unwrap()
            .violations()
            .is_empty());
        assert_eq!(
            claim1_oracle(&alt, 2.0, 0.3, 5).unwrap(),
            Claim1Outcome::EmptyDomain {
                s_min: 11,
                s_max: 5
            }
        );
    }

    #[test]
    fn claim_probe_examples() {
        let g = PartialQuotients::golden();
        let probe = claim2_claim3_probe(&g, 2.0, 0.2, 0.5, 40).unwrap();
        assert_eq!(probe.status, ProbeStatus::Holds);
        // P_n = F_{n+1}: 89 * 233 > 89^2.2 but 144 * 377 < 144^2.2.
        assert_eq!(probe.n_delta, Some(11));

        let cal = PartialQuotients::calibrated(2.5).unwrap();
        let probe = claim2_claim3_probe(&cal, 2.5, 0.3, 0.3, 25).unwrap();
        assert_eq!(probe.status, ProbeStatus::Holds);
        assert!(!probe.witnesses.is_empty());

        let wrong = claim2_claim3_probe(&g, 3.0, 0.2, 0.5, 40).unwrap();
        assert!(wrong.witnesses.is_empty());
        assert_eq!(wrong.status, ProbeStatus::Inconclusive(40));
    }
}
