//! Continued fractions over arbitrary-precision integers.
//!
//! Digits are written `[a_1, a_2, ...]` for numbers in `(0, 1)`, so that
//! `[a_1, ..., a_n] = Q_n / P_n` with `P_{-1} = 0, P_0 = 1, Q_{-1} = 1, Q_0 = 0`.

mod bounds;
mod classify;

pub use bounds::{
    approximation_bounds_check, claim1_oracle, claim2_claim3_probe, Claim1Outcome, ClaimProbe,
    ProbeStatus, RationalExponent,
};
pub use classify::{
    beta_estimate, log_denominators, TypeEstimate, TypeLabel, G_INF_MIN_INCREMENT, G_INF_RATIO,
};

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::farey::Fraction;

/// Rule generating digits past an explicit prefix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum DigitRule {
    /// The block repeated forever (`[1]` golden, `[2]` silver).
    Periodic(Vec<u64>),
    /// `a_n = n`.
    Naturals,
    /// `a_n = n^2`.
    Squares,
    /// `a_{n+1} = max(1, ceil(P_n^excess))`, which drives `ln P_{n+1} / ln P_n -> 1 + excess`.
    Calibrated { excess: f64 },
    /// `a_1` given, then `a_n = P_{n-1}^{n-1} + 1`.
    Liouville { a1: u64 },
}

/// A digit sequence `a_1, a_2, ...` with every `a_n >= 1`: an explicit prefix and an optional
/// generating rule for the infinite tail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialQuotients {
    prefix: Vec<BigUint>,
    tail: Option<DigitRule>,
}

impl PartialQuotients {
    pub fn finite<I, D>(digits: I) -> Result<Self>
    where
        I: IntoIterator<Item = D>,
        D: Into<BigUint>,
    {
        let prefix: Vec<BigUint> = digits.into_iter().map(Into::into).collect();
        if let Some(i) = prefix.iter().position(|d| d.is_zero()) {
            return Err(Error::ZeroDigit(i + 1));
        }
        Ok(PartialQuotients { prefix, tail: None })
    }

    pub fn with_rule(rule: DigitRule) -> Result<Self> {
        match &rule {
            DigitRule::Periodic(block) if block.is_empty() || block.contains(&0) => {
                return Err(Error::InvalidArgument(
                    "periodic block must be non-empty with digits >= 1".into(),
                ))
            }
            DigitRule::Calibrated { excess } if !(excess.is_finite() && *excess >= 0.0) => {
                return Err(Error::InvalidArgument(format!(
                    "calibration excess {excess}"
                )))
            }
            DigitRule::Liouville { a1: 0 } => return Err(Error::ZeroDigit(1)),
            _ => {}
        }
        Ok(PartialQuotients {
            prefix: Vec::new(),
            tail: Some(rule),
        })
    }

    pub fn golden() -> Self {
        Self::with_rule(DigitRule::Periodic(vec![1])).expect("valid rule")
    }

    pub fn silver() -> Self {
        Self::with_rule(DigitRule::Periodic(vec![2])).expect("valid rule")
    }

    /// Digits with `ln P_{n+1} / ln P_n -> beta - 1`.
    pub fn calibrated(beta: f64) -> Result<Self> {
        Self::with_rule(DigitRule::Calibrated { excess: beta - 2.0 })
    }

    pub fn prefix(&self) -> &[BigUint] {
        &self.prefix
    }

    pub fn rule(&self) -> Option<&DigitRule> {
        self.tail.as_ref()
    }

    pub fn is_finite(&self) -> bool {
        self.tail.is_none()
    }

    /// Number of digits available, `None` when unbounded.
    pub fn available(&self) -> Option<usize> {
        self.tail.is_none().then_some(self.prefix.len())
    }

    /// The digit list with `b` prepended (the transform `[b; a]`).
    pub fn prepend(&self, b: &[BigUint]) -> Self {
        let mut prefix = b.to_vec();
        prefix.extend(self.prefix.iter().cloned());
        PartialQuotients {
            prefix,
            tail: self.tail.clone(),
        }
    }

    /// The first `n` digits.
    pub fn digits(&self, n: usize) -> Result<Vec<BigUint>> {
        Ok(self.expand(n)?.0)
    }

    /// First `n` digits with their continuants `P_1..P_n`.
    fn expand(&self, n: usize) -> Result<(Vec<BigUint>, Vec<BigUint>)> {
        if let Some(avail) = self.available() {
            if n > avail {
                return Err(Error::NotEnoughDigits {
                    needed: n,
                    available: avail,
                });
            }
        }
        let mut digits = Vec::with_capacity(n);
        let mut dens = Vec::with_capacity(n);
        let (mut p_prev, mut p_cur) = (BigUint::zero(), BigUint::one());
        for idx in 1..=n {
            let a = if idx <= self.prefix.len() {
                self.prefix[idx - 1].clone()
            } else {
                let rule = self.tail.as_ref().expect("availability checked");
                rule_digit(rule, idx, idx - self.prefix.len(), &p_cur)
            };
            let p_next = &a * &p_cur + &p_prev;
            p_prev = std::mem::replace(&mut p_cur, p_next);
            dens.push(p_cur.clone());
            digits.push(a);
        }
        Ok((digits, dens))
    }

    /// Canonical finite form: the last digit is at least 2 unless the list is `[1]`.
    pub fn canonical(&self) -> Self {
        let mut prefix = self.prefix.clone();
        if self.tail.is_none() && prefix.len() > 1 && prefix.last().is_some_and(|d| d.is_one()) {
            prefix.pop();
            if let Some(last) = prefix.last_mut() {
                *last += 1u32;
            }
        }
        PartialQuotients {
            prefix,
            tail: self.tail.clone(),
        }
    }
}

/// Digit produced by `rule` at global index `idx` (1-based); `local` counts from the rule's
/// start and `p_prev` is `P_{idx-1}`.
fn rule_digit(rule: &DigitRule, idx: usize, local: usize, p_prev: &BigUint) -> BigUint {
    match rule {
        DigitRule::Periodic(block) => BigUint::from(block[(local - 1) % block.len()]),
        DigitRule::Naturals => BigUint::from(local as u64),
        DigitRule::Squares => BigUint::from((local as u64) * (local as u64)),
        DigitRule::Calibrated { excess } => ceil_power(p_prev, *excess).max(BigUint::one()),
        DigitRule::Liouville { a1 } => {
            if local == 1 {
                BigUint::from(*a1)
            } else {
                p_prev.pow((idx - 1) as u32) + 1u32
            }
        }
    }
}

/// `ceil(p^c)` for `c >= 0`: exact for integer and half-integer `c`, otherwise rounded through
/// a 53-bit mantissa (deterministic).
pub(crate) fn ceil_power(p: &BigUint, c: f64) -> BigUint {
    if c == 0.0 || p.is_one() {
        return BigUint::one();
    }
    let twice = 2.0 * c;
    if twice.fract() == 0.0 && twice <= u32::MAX as f64 {
        let twice = twice as u32;
        if twice.is_multiple_of(2) {
            return p.pow(twice / 2);
        }
        let pw = p.pow(twice);
        let r = pw.sqrt();
        return if &r * &r == pw { r } else { r + 1u32 };
    }
    let log2 = ln_big(p) / std::f64::consts::LN_2 * c;
    if log2 < 52.0 {
        return BigUint::from(2f64.powf(log2).ceil() as u64);
    }
    let shift = log2.floor() as u64 - 52;
    let mantissa = 2f64.powf(log2 - shift as f64).ceil() as u64;
    (BigUint::from(mantissa) << shift) + 1u32
}

/// Natural logarithm of a positive big integer.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("bounded").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64 bits");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// One convergent `Q_n / P_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub n: usize,
    pub q: BigUint,
    pub p: BigUint,
}

impl Convergent {
    pub fn fraction(&self) -> Fraction {
        Fraction::new(self.q.clone(), self.p.clone()).expect("P_n >= 1")
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.q.clone().into(), self.p.clone().into())
    }
}

/// Convergents `Q_1/P_1, ..., Q_n/P_n` by the three-term recurrence.
pub fn convergents(pq: &PartialQuotients, n: usize) -> Result<Vec<Convergent>> {
    let digits = pq.digits(n)?;
    Ok(convergents_of(&digits))
}

/// Convergents of an explicit digit list.
pub fn convergents_of(digits: &[BigUint]) -> Vec<Convergent> {
    let (mut q_prev, mut q_cur) = (BigUint::one(), BigUint::zero());
    let (mut p_prev, mut p_cur) = (BigUint::zero(), BigUint::one());
    let mut out = Vec::with_capacity(digits.len());
    for (i, a) in digits.iter().enumerate() {
        let q_next = a * &q_cur + &q_prev;
        let p_next = a * &p_cur + &p_prev;
        q_prev = std::mem::replace(&mut q_cur, q_next);
        p_prev = std::mem::replace(&mut p_cur, p_next);
        out.push(Convergent {
            n: i + 1,
            q: q_cur.clone(),
            p: p_cur.clone(),
        });
    }
    out
}

/// Euclidean-algorithm digits of `f` in `(0, 1)`, canonical form.
pub fn cf_of_fraction(f: &Fraction) -> Result<PartialQuotients> {
    if f.num().is_zero() || f.num() >= f.den() {
        return Err(Error::OutOfRange(f.to_string()));
    }
    let mut digits = Vec::new();
    let (mut num, mut den) = (f.den().clone(), f.num().clone());
    while !den.is_zero() {
        let (a, r) = num.div_rem(&den);
        digits.push(a);
        num = std::mem::replace(&mut den, r);
    }
    Ok(PartialQuotients::finite(digits)?.canonical())
}

/// Continuant polynomial `P_n(a_1, ..., a_n)`; `K() = 1`, `K(a) = a`.
pub fn continuant<D: std::borrow::Borrow<BigUint>>(digits: &[D]) -> BigUint {
    let (mut prev, mut cur) = (BigUint::zero(), BigUint::one());
    for a in digits {
        let next = a.borrow() * &cur + &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// `K(b ++ a) == K(b) K(a) + K(b minus last) K(a minus first)`, checked exactly.
pub fn split_identity_check(b: &[BigUint], a: &[BigUint]) -> bool {
    if b.is_empty() || a.is_empty() {
        return false;
    }
    let joined: Vec<&BigUint> = b.iter().chain(a.iter()).collect();
    let lhs = continuant(&joined);
    let rhs = continuant(b) * continuant(a) + continuant(&b[..b.len() - 1]) * continuant(&a[1..]);
    lhs == rhs
}

/// True iff `r` equals some `Q_n / P_n` with `n <= horizon`.
pub fn is_convergent(pq: &PartialQuotients, r: &Fraction, horizon: usize) -> Result<bool> {
    let n = match pq.available() {
        Some(avail) => horizon.min(avail),
        None => horizon,
    };
    Ok(convergents(pq, n)?.iter().any(|c| c.fraction() == *r))
}

/// Liouville-type digits: `a_1` given, `a_n = P_{n-1}^{n-1} + 1`.
///
/// Counts above 8 are allowed but produce astronomically large integers.
pub fn liouville_digits(a1: u64, count: usize) -> Result<PartialQuotients> {
    if a1 == 0 || count == 0 {
        return Err(Error::InvalidArgument(format!(
            "liouville digits need a1 >= 1 and count >= 1 (got {a1}, {count})"
        )));
    }
    let digits = PartialQuotients::with_rule(DigitRule::Liouville { a1 })?.digits(count)?;
    PartialQuotients::finite(digits)
}

/// Exact open interval `(lo, hi)` containing every irrational whose expansion starts with
/// `digits`: between `[a_1..a_M]` and `[a_1..a_M + 1]`.
pub fn irrational_bracket(digits: &[BigUint]) -> (BigRational, BigRational) {
    let convs = convergents_of(digits);
    let last = convs.last().expect("non-empty digits");
    let (q_prev, p_prev) = if convs.len() >= 2 {
        let c = &convs[convs.len() - 2];
        (c.q.clone(), c.p.clone())
    } else {
        (BigUint::zero(), BigUint::one())
    };
    let a = last.to_rational();
    let b = BigRational::new((&last.q + q_prev).into(), (&last.p + p_prev).into());
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Fibonacci numbers with `F_1 = F_2 = 1`.
pub fn fibonacci(n: usize) -> BigUint {
    let (mut a, mut b) = (BigUint::zero(), BigUint::one());
    for _ in 0..n {
        let c = &a + &b;
        a = std::mem::replace(&mut b, c);
    }
    a
}
