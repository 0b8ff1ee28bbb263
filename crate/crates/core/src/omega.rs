//! Finite approximations of the Cantor dust left between the steps of a staircase.
//!
//! The depth-`k` approximation keeps one interval per segment of the depth-`k` Farey-Brocot
//! partition: the gap between the steps at the segment's two ends. Every interval carries the
//! same measure `2^-k`.

use serde::Serialize;

use crate::contfrac::{irrational_bracket, PartialQuotients};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::farey::{covering_segment, farey_level, partition, FareyInterval, Fraction, Point};
use crate::staircase::StaircaseModel;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OmegaInterval {
    pub label: FareyInterval,
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OmegaApprox {
    pub depth: usize,
    pub intervals: Vec<OmegaInterval>,
    pub model_id: String,
    /// Length of the depth-0 interval between the `0/1` and `1/1` steps.
    pub base_length: f64,
}

impl OmegaApprox {
    pub fn lengths(&self) -> Vec<f64> {
        self.intervals.iter().map(|i| i.length).collect()
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|i| i.length).sum()
    }

    /// `ln 2^-k`, the log-measure shared by all intervals.
    pub fn log_measure(&self) -> f64 {
        -(self.depth as f64) * std::f64::consts::LN_2
    }
}

/// The depth-`k` approximation. Lengths must all be positive.
pub fn omega_approx(model: &dyn StaircaseModel, k: usize, exec: Executor) -> Result<OmegaApprox> {
    let level = farey_level(k + 1)?;
    model.prepare(&level.entries, exec)?;
    let segments = partition(k)?;
    let lengths = exec.map(&segments, |seg| model.gap_length(seg));
    let mut intervals = Vec::with_capacity(segments.len());
    for (label, length) in segments.into_iter().zip(lengths) {
        let length = length?;
        if !(length > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "non-positive gap {length:e} at {label} for {}",
                model.id()
            )));
        }
        intervals.push(OmegaInterval { label, length });
    }
    let base_length = model.gap_length(&FareyInterval::unit())?;
    Ok(OmegaApprox {
        depth: k,
        intervals,
        model_id: model.id(),
        base_length,
    })
}

/// `alpha = ln 2^-k / ln length` of interval `i`.
pub fn alpha_index(approx: &OmegaApprox, i: usize) -> Result<f64> {
    let iv = approx
        .intervals
        .get(i)
        .ok_or_else(|| Error::InvalidArgument(format!("interval index {i} out of range")))?;
    alpha_of(approx.depth, iv.length)
}

fn alpha_of(depth: usize, length: f64) -> Result<f64> {
    if !(length > 0.0 && length < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha index needs a length in (0, 1), got {length}"
        )));
    }
    Ok(-(depth as f64) * std::f64::consts::LN_2 / length.ln())
}

/// A point of `(0, 1)` whose covering intervals are followed.
#[derive(Clone, Debug)]
pub enum Target {
    Rational(Fraction),
    Digits(PartialQuotients),
}

/// One entry of [`alpha_along`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlphaStep {
    pub depth: usize,
    pub label: FareyInterval,
    pub length: f64,
    pub alpha: f64,
}

/// The segment of partition depth `k` covering `target`; rationals use the left-closed rule.
pub fn covering_label(target: &Target, k: usize) -> Result<FareyInterval> {
    match target {
        Target::Rational(f) => {
            if *f == Fraction::zero() || *f >= Fraction::one() {
                return Err(Error::OutOfRange(f.to_string()));
            }
            covering_segment(&Point::Exact(f.clone()), k + 1)
        }
        Target::Digits(pq) => {
            let mut m = k + 4;
            loop {
                let m_eff = pq.available().map_or(m, |a| a.min(m));
                let (lo, hi) = irrational_bracket(&pq.digits(m_eff)?);
                let point = Point::Bracket(Fraction::try_from(&lo)?, Fraction::try_from(&hi)?);
                match covering_segment(&point, k + 1) {
                    Err(Error::Straddles { .. }) if m_eff == m && m < 64 * (k + 4) => m *= 2,
                    other => return other,
                }
            }
        }
    }
}

/// `alpha` of the nested intervals covering `target` at depths `1..=max_depth`.
pub fn alpha_along(
    model: &dyn StaircaseModel,
    max_depth: usize,
    target: &Target,
    exec: Executor,
) -> Result<Vec<AlphaStep>> {
    let labels: Vec<FareyInterval> = (1..=max_depth)
        .map(|k| covering_label(target, k))
        .collect::<Result<_>>()?;
    let mut ends: Vec<Fraction> = labels
        .iter()
        .flat_map(|l| [l.left.clone(), l.right.clone()])
        .collect();
    ends.sort();
    ends.dedup();
    model.prepare(&ends, exec)?;
    labels
        .into_iter()
        .map(|label| {
            let length = model.gap_length(&label)?;
            Ok(AlphaStep {
                depth: label.depth,
                alpha: alpha_of(label.depth, length)?,
                length,
                label,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::staircase::{IsingModel, IsingParams, TernaryModel};

    fn fr(q: u64, p: u64) -> Fraction {
        Fraction::from_u64(q, p)
    }

    #[test]
    fn ternary_alpha_is_constant() {
        let approx = omega_approx(&TernaryModel, 5, Executor::Sequential).unwrap();
        assert_eq!(approx.intervals.len(), 32);
        for i in 0..32 {
            let a = alpha_index(&approx, i).unwrap();
            assert!((a - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
        }
        let along = alpha_along(
            &TernaryModel,
            6,
            &Target::Digits(PartialQuotients::golden()),
            Executor::Sequential,
        )
        .unwrap();
        assert!(along
            .iter()
            .all(|s| (s.alpha - 2f64.ln() / 3f64.ln()).abs() < 1e-12));
    }

    #[test]
    fn labels_at_depth_two() {
        let m = IsingModel::with_p_max(IsingParams::new(2.0, 1.0).unwrap(), 3000);
        let approx = omega_approx(&m, 2, Executor::Sequential).unwrap();
        let labels: Vec<(Fraction, Fraction)> = approx
            .intervals
            .iter()
            .map(|i| (i.label.left.clone(), i.label.right.clone()))
            .collect();
        assert_eq!(
            labels,
            vec![
                (fr(0, 1), fr(1, 3)),
                (fr(1, 3), fr(1, 2)),
                (fr(1, 2), fr(2, 3)),
                (fr(2, 3), fr(1, 1))
            ]
        );
        let one = omega_approx(&m, 1, Executor::Sequential).unwrap();
        assert!((one.intervals[0].length - one.intervals[1].length).abs() < 1e-15);
    }

    #[test]
    fn alpha_rejects_long_intervals() {
        let approx = OmegaApprox {
            depth: 1,
            intervals: vec![OmegaInterval {
                label: FareyInterval::unit(),
                length: 1.5,
            }],
            model_id: "test".into(),
            base_length: 1.5,
        };
        assert!(alpha_index(&approx, 0).is_err());
    }

    #[test]
    fn rational_targets() {
        let seg = covering_label(&Target::Rational(fr(1, 2)), 3).unwrap();
        assert_eq!((seg.left, seg.right), (fr(1, 2), fr(3, 5)));
        assert!(covering_label(&Target::Rational(fr(0, 1)), 3).is_err());
        let g = covering_label(&Target::Digits(PartialQuotients::golden()), 2).unwrap();
        assert_eq!((g.left, g.right), (fr(1, 2), fr(2, 3)));
    }
}
