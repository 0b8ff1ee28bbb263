//! Words in the modular generators `A = (1 0; 1 1)` and `P = (1 1; 0 1)`.
//!
//! A word `A^b1 P^b2 A^b3 ...` is stored as its exponent list. Read after its leading `A`,
//! the letters are moves in the Farey-Brocot tree (`A` left, `P` right), and the exponents
//! are continued-fraction digits of the segment it reaches.

use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::contfrac::{continuant, PartialQuotients};
use crate::error::{Error, Result};
use crate::farey::{FareyInterval, Fraction};

/// Exponent list `(b_1, ..., b_m)` of `A^b1 P^b2 A^b3 ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HyperbolicWord {
    exponents: Vec<u64>,
}

impl HyperbolicWord {
    pub fn new(exponents: Vec<u64>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::InvalidArgument(
                "a word needs at least one exponent".into(),
            ));
        }
        if let Some(i) = exponents.iter().position(|&b| b == 0) {
            return Err(Error::ZeroDigit(i + 1));
        }
        Ok(HyperbolicWord { exponents })
    }

    /// Parses a letter string such as `"AAP"`; it must start with `A`.
    pub fn from_letters(letters: &str) -> Result<Self> {
        if !letters.starts_with('A') {
            return Err(Error::InvalidArgument(format!(
                "word {letters:?} must start with A"
            )));
        }
        let mut exponents: Vec<u64> = Vec::new();
        let mut last = ' ';
        for c in letters.chars() {
            if c != 'A' && c != 'P' {
                return Err(Error::InvalidArgument(format!("unknown letter {c:?}")));
            }
            if c == last {
                *exponents.last_mut().expect("run started") += 1;
            } else {
                exponents.push(1);
                last = c;
            }
        }
        Ok(HyperbolicWord { exponents })
    }

    /// All `2^k` words of `k + 1` letters, in left-to-right order of their segments.
    pub fn all_of_depth(k: usize) -> Vec<HyperbolicWord> {
        (0..1u64 << k)
            .map(|bits| {
                let mut s = String::with_capacity(k + 1);
                s.push('A');
                for i in (0..k).rev() {
                    s.push(if bits >> i & 1 == 1 { 'P' } else { 'A' });
                }
                HyperbolicWord::from_letters(&s).expect("valid letters")
            })
            .collect()
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn letter_count(&self) -> usize {
        self.exponents.iter().sum::<u64>() as usize
    }

    pub fn letters(&self) -> String {
        self.exponents
            .iter()
            .enumerate()
            .flat_map(|(i, &b)| std::iter::repeat_n(if i % 2 == 0 { 'A' } else { 'P' }, b as usize))
            .collect()
    }

    pub fn digits(&self) -> Vec<BigUint> {
        self.exponents.iter().map(|&b| BigUint::from(b)).collect()
    }
}

impl fmt::Display for HyperbolicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.letters())
    }
}

/// `(a b; c d)` with non-negative entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Matrix2 {
    pub a: BigUint,
    pub b: BigUint,
    pub c: BigUint,
    pub d: BigUint,
}

impl Matrix2 {
    pub fn identity() -> Self {
        Matrix2 {
            a: BigUint::one(),
            b: BigUint::ZERO,
            c: BigUint::ZERO,
            d: BigUint::one(),
        }
    }

    /// `A^n = (1 0; n 1)`.
    pub fn a_pow(n: u64) -> Self {
        Matrix2 {
            c: BigUint::from(n),
            ..Self::identity()
        }
    }

    /// `P^n = (1 n; 0 1)`.
    pub fn p_pow(n: u64) -> Self {
        Matrix2 {
            b: BigUint::from(n),
            ..Self::identity()
        }
    }

    pub fn mul(&self, o: &Matrix2) -> Matrix2 {
        Matrix2 {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    pub fn is_unimodular(&self) -> bool {
        &self.a * &self.d == &self.b * &self.c + 1u32
    }

    /// Columns read as fractions `top / bottom`.
    pub fn column_fractions(&self) -> (Fraction, Fraction) {
        (
            Fraction::new(self.a.clone(), self.c.clone()).expect("positive bottom entry"),
            Fraction::new(self.b.clone(), self.d.clone()).expect("positive bottom entry"),
        )
    }
}

/// Product of the letter powers.
///
/// For even `m` the columns are `(Q_{m-1}, P_{m-1})` and `(Q_m, P_m)` of `[b_1..b_m]`; for odd
/// `m` the two columns appear in the opposite order.
pub fn word_matrix(w: &HyperbolicWord) -> Matrix2 {
    w.exponents
        .iter()
        .enumerate()
        .fold(Matrix2::identity(), |acc, (i, &b)| {
            let step = if i % 2 == 0 {
                Matrix2::a_pow(b)
            } else {
                Matrix2::p_pow(b)
            };
            acc.mul(&step)
        })
}

/// The Farey-Brocot segment of `farey_level(L)` reached by a word of `L` letters.
pub fn word_interval(w: &HyperbolicWord) -> FareyInterval {
    let mut seg = FareyInterval::unit();
    for c in w.letters().chars().skip(1) {
        let (l, r) = seg.children();
        seg = if c == 'A' { l } else { r };
    }
    seg
}

/// The digit sequence `[b_1, ..., b_m; a_1, a_2, ...]`.
pub fn apply_transform(t: &HyperbolicWord, pq: &PartialQuotients) -> PartialQuotients {
    pq.prepend(&t.digits())
}

/// Ratio of corresponding step widths under a word transform.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaleFactor {
    #[serde(serialize_with = "ser_rational")]
    pub lambda: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub theta_m: BigRational,
    pub pm: BigUint,
}

fn ser_rational<S: serde::Serializer>(
    r: &BigRational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl ScaleFactor {
    /// `lambda * P_m`.
    pub fn normalized(&self) -> BigRational {
        &self.lambda * BigRational::from_integer(self.pm.clone().into())
    }

    /// `1/2 < lambda P_m < 1`.
    pub fn within_bounds(&self) -> bool {
        let x = self.normalized();
        x > BigRational::new(1.into(), 2.into()) && x < BigRational::one()
    }

    /// `lambda P_m > 1/(1 + phi^-2)`, decided exactly as `(3 - 2 theta)^2 > 5`.
    pub fn above_golden_bound(&self) -> bool {
        let three = BigRational::from_integer(3.into());
        let two = BigRational::from_integer(2.into());
        let t = three - two * &self.theta_m;
        t > BigRational::from_integer(0.into()) && &t * &t > BigRational::from_integer(5.into())
    }
}

/// `lambda = K(a) / K(b ++ a)` and `theta_m = K(b minus last)/K(b) * K(a minus first)/K(a)`.
///
/// `b = a = (1)` is the one pair with `theta_m = 1`, where `lambda P_m = 1/2` sits on the bound.
pub fn scale_factor(b: &[BigUint], a: &[BigUint]) -> Result<ScaleFactor> {
    if b.is_empty() || a.is_empty() {
        return Err(Error::InvalidArgument(
            "scale factor needs non-empty b and a".into(),
        ));
    }
    if let Some(i) = b.iter().chain(a.iter()).position(|d| *d == BigUint::ZERO) {
        return Err(Error::ZeroDigit(i + 1));
    }
    let joined: Vec<&BigUint> = b.iter().chain(a.iter()).collect();
    let ka = continuant(a);
    let kb = continuant(b);
    let rat = |n: BigUint, d: BigUint| BigRational::new(n.into(), d.into());
    let lambda = rat(ka.clone(), continuant(&joined));
    let theta_m = rat(continuant(&b[..b.len() - 1]), kb.clone()) * rat(continuant(&a[1..]), ka);
    Ok(ScaleFactor {
        lambda,
        theta_m,
        pm: kb,
    })
}
