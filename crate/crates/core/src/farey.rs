//! Exact fractions and the Farey-Brocot (mediant) tree.
//!
//! Level numbering follows the classical listing: level 1 is `{0/1, 1/1}` and
//! level `k + 1` inserts the mediant of every adjacent pair of level `k`.
//! A segment of level `k + 1` has *partition depth* `k`: the level is cut into
//! `2^k` segments, each of Farey-Brocot measure `2^-k`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest level ever materialized as a list.
pub const MAX_MATERIALIZED_LEVEL: usize = 20;

/// A non-negative rational in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fraction {
    num: BigUint,
    den: BigUint,
}

impl Fraction {
    pub fn new(num: impl Into<BigUint>, den: impl Into<BigUint>) -> Result<Self> {
        let num = num.into();
        let den = den.into();
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let g = num.gcd(&den);
        if g.is_one() || g.is_zero() {
            Ok(Fraction { num, den })
        } else {
            Ok(Fraction {
                num: num / &g,
                den: den / &g,
            })
        }
    }

    /// Panics on a zero denominator; meant for literals.
    pub fn from_u64(num: u64, den: u64) -> Self {
        Self::new(num, den).expect("nonzero denominator")
    }

    pub fn zero() -> Self {
        Fraction {
            num: BigUint::zero(),
            den: BigUint::one(),
        }
    }

    pub fn one() -> Self {
        Fraction {
            num: BigUint::one(),
            den: BigUint::one(),
        }
    }

    pub fn num(&self) -> &BigUint {
        &self.num
    }

    pub fn den(&self) -> &BigUint {
        &self.den
    }

    /// `(num, den)` when both fit in a `u64`.
    pub fn to_u64_pair(&self) -> Option<(u64, u64)> {
        Some((self.num.to_u64()?, self.den.to_u64()?))
    }

    pub fn to_f64(&self) -> f64 {
        match self.to_u64_pair() {
            Some((q, p)) => q as f64 / p as f64,
            None => self.to_rational().to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone().into(), self.den.clone().into())
    }

    /// `1 - self`, for fractions in `[0, 1]`.
    pub fn complement(&self) -> Result<Self> {
        if self.num > self.den {
            return Err(Error::OutOfRange(self.to_string()));
        }
        Ok(Fraction {
            num: &self.den - &self.num,
            den: self.den.clone(),
        })
    }

    /// True when `self < other` and `other.num * self.den - self.num * other.den == 1`.
    pub fn is_adjacent_to(&self, other: &Fraction) -> bool {
        let lhs = &other.num * &self.den;
        let rhs = &self.num * &other.den;
        lhs > rhs && lhs - rhs == BigUint::one()
    }
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl TryFrom<&BigRational> for Fraction {
    type Error = Error;

    fn try_from(r: &BigRational) -> Result<Self> {
        if r.numer().sign() == num_bigint::Sign::Minus {
            return Err(Error::OutOfRange(r.to_string()));
        }
        let num = r.numer().magnitude().clone();
        let den = r.denom().magnitude().clone();
        Fraction::new(num, den)
    }
}

/// Mediant `(Q+Q')/(P+P')` of a Farey-adjacent pair.
pub fn mediant(a: &Fraction, b: &Fraction) -> Result<Fraction> {
    if !a.is_adjacent_to(b) {
        return Err(Error::NotAdjacent {
            left: a.to_string(),
            right: b.to_string(),
        });
    }
    // Unimodularity keeps the sum in lowest terms.
    Ok(Fraction {
        num: &a.num + &b.num,
        den: &a.den + &b.den,
    })
}

/// One level of the Farey-Brocot construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FareyLevel {
    pub depth: usize,
    pub entries: Vec<Fraction>,
}

impl FareyLevel {
    /// The `2^(k-1)` segments of the level, in increasing order.
    pub fn segments(&self) -> Vec<FareyInterval> {
        self.entries
            .windows(2)
            .map(|w| FareyInterval {
                left: w[0].clone(),
                right: w[1].clone(),
                depth: self.depth - 1,
            })
            .collect()
    }
}

/// `farey_level(k)` by iterated mediant interpolation from `{0/1, 1/1}`.
pub fn farey_level(k: usize) -> Result<FareyLevel> {
    if k == 0 {
        return Err(Error::ZeroLevel(k));
    }
    if k > MAX_MATERIALIZED_LEVEL {
        return Err(Error::InvalidArgument(format!(
            "level {k} exceeds the materialization cap {MAX_MATERIALIZED_LEVEL}; use tree descent"
        )));
    }
    let mut entries = vec![Fraction::zero(), Fraction::one()];
    for _ in 1..k {
        let mut next = Vec::with_capacity(2 * entries.len() - 1);
        for w in entries.windows(2) {
            next.push(w[0].clone());
            next.push(mediant(&w[0], &w[1])?);
        }
        next.push(entries.last().cloned().expect("non-empty level"));
        entries = next;
    }
    Ok(FareyLevel { depth: k, entries })
}

/// The fractions that first appear at level `k` (for `k >= 2`), or `{0/1, 1/1}` at `k = 1`.
pub fn new_fractions(k: usize) -> Result<Vec<Fraction>> {
    let level = farey_level(k)?;
    if k == 1 {
        return Ok(level.entries);
    }
    Ok(level.entries.into_iter().skip(1).step_by(2).collect())
}

/// A segment `[left, right]` of the Farey-Brocot partition at `depth`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FareyInterval {
    pub left: Fraction,
    pub right: Fraction,
    /// Partition depth: the segment belongs to `farey_level(depth + 1)`.
    pub depth: usize,
}

impl FareyInterval {
    pub fn unit() -> Self {
        FareyInterval {
            left: Fraction::zero(),
            right: Fraction::one(),
            depth: 0,
        }
    }

    pub fn mediant(&self) -> Fraction {
        mediant(&self.left, &self.right).expect("Farey intervals are unimodular")
    }

    pub fn children(&self) -> (FareyInterval, FareyInterval) {
        let m = self.mediant();
        (
            FareyInterval {
                left: self.left.clone(),
                right: m.clone(),
                depth: self.depth + 1,
            },
            FareyInterval {
                left: m,
                right: self.right.clone(),
                depth: self.depth + 1,
            },
        )
    }

    /// Exact Euclidean length `1/(P P')`.
    pub fn euclidean_length(&self) -> BigRational {
        BigRational::new(
            BigUint::one().into(),
            (&self.left.den * &self.right.den).into(),
        )
    }

    pub fn euclidean_length_f64(&self) -> f64 {
        1.0 / (self.left.den.to_f64().unwrap_or(f64::INFINITY)
            * self.right.den.to_f64().unwrap_or(f64::INFINITY))
    }

    /// Mirror image under `x -> 1 - x`.
    pub fn mirror(&self) -> FareyInterval {
        FareyInterval {
            left: self.right.complement().expect("segment inside [0,1]"),
            right: self.left.complement().expect("segment inside [0,1]"),
            depth: self.depth,
        }
    }
}

impl fmt::Display for FareyInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.left, self.right)
    }
}

/// A point to be located in the tree: exact, or known only through a rational bracket.
#[derive(Clone, Debug)]
pub enum Point {
    Exact(Fraction),
    /// `lo <= x <= hi`.
    Bracket(Fraction, Fraction),
}

/// The level-`level` segment `[Q/P, Q'/P')` containing `x`, found by tree descent.
pub fn covering_segment(x: &Point, level: usize) -> Result<FareyInterval> {
    if level == 0 {
        return Err(Error::ZeroLevel(level));
    }
    let (lo, hi) = match x {
        Point::Exact(f) => (f, f),
        Point::Bracket(lo, hi) => {
            if lo > hi {
                return Err(Error::InvalidArgument(format!(
                    "empty bracket [{lo}, {hi}]"
                )));
            }
            (lo, hi)
        }
    };
    let one = Fraction::one();
    if *lo >= one || *hi >= one {
        return Err(Error::OutOfRange(hi.to_string()));
    }
    let mut seg = FareyInterval::unit();
    for _ in 1..level {
        let m = seg.mediant();
        let (left, right) = seg.children();
        seg = if *hi < m {
            left
        } else if *lo >= m {
            right
        } else {
            return Err(Error::Straddles {
                lo: lo.to_string(),
                hi: hi.to_string(),
                level,
                boundary: m.to_string(),
            });
        };
    }
    Ok(seg)
}

/// Farey-Brocot (hyperbolic) measure `2^-depth` of a segment.
pub fn fb_measure(seg: &FareyInterval) -> BigRational {
    BigRational::new(BigUint::one().into(), (BigUint::one() << seg.depth).into())
}

/// Mediant-tree descendants of `seg` down `extra_depth` levels, strictly inside, sorted.
pub fn subtree_fractions(seg: &FareyInterval, extra_depth: usize) -> Vec<Fraction> {
    let mut out = Vec::new();
    collect_subtree(seg, extra_depth, &mut out);
    out
}

fn collect_subtree(seg: &FareyInterval, remaining: usize, out: &mut Vec<Fraction>) {
    if remaining == 0 {
        return;
    }
    let (l, r) = seg.children();
    collect_subtree(&l, remaining - 1, out);
    out.push(l.right.clone());
    collect_subtree(&r, remaining - 1, out);
}

/// All segments of partition depth `depth` (i.e. of `farey_level(depth + 1)`).
pub fn partition(depth: usize) -> Result<Vec<FareyInterval>> {
    Ok(farey_level(depth + 1)?.segments())
}

/// The level at which `f` in `[0, 1]` first appears: the sum of its continued-fraction digits,
/// or 1 for the endpoints.
pub fn fraction_level(f: &Fraction) -> usize {
    if f.num.is_zero() || f.num == f.den {
        return 1;
    }
    let (mut a, mut b) = (f.den.clone(), f.num.clone());
    let mut total = BigUint::zero();
    while !b.is_zero() {
        let (d, r) = a.div_rem(&b);
        total += d;
        a = std::mem::replace(&mut b, r);
    }
    total.to_usize().unwrap_or(usize::MAX)
}

/// Every reduced `Q/P` in `[0, 1]` with `P <= p_max`, ordered by `(P, Q)`.
pub fn fractions_up_to(p_max: u64) -> Vec<Fraction> {
    let mut out = vec![Fraction::zero(), Fraction::one()];
    for p in 2..=p_max {
        for q in 1..p {
            if q.gcd(&p) == 1 {
                out.push(Fraction::from_u64(q, p));
            }
        }
    }
    out
}
