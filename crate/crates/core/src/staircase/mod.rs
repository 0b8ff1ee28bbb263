//! Staircase generators behind one interface, and staircase assembly.

pub mod cache;
pub mod circle;
pub mod ising;

use std::sync::{Arc, OnceLock};

use serde::Serialize;

pub use cache::TongueCache;
pub use circle::{
    circle_map_step, locking_interval, locking_test, winding_number, CircleSolverConfig,
    LockingInterval,
};
pub use ising::{
    ising_domain_position, ising_partial_position, ising_step_width, DenominatorTable, IsingParams,
};

use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::farey::{farey_level, fraction_level, FareyInterval, Fraction};

/// A devil's staircase whose steps are indexed by the rationals of `[0, 1]`.
pub trait StaircaseModel: Send + Sync {
    /// Short identifier recorded with every output.
    fn id(&self) -> String;

    /// Parameters echoed into output metadata.
    fn describe(&self) -> Vec<(String, String)>;

    fn step_width(&self, f: &Fraction) -> Result<f64>;

    /// `(x_left, x_right)` of the step at height `f` in the layout used for `level`.
    fn step_position(&self, f: &Fraction, level: usize) -> Result<(f64, f64)>;

    /// `(x_lo, x_hi)`: left edge of the `0/1` step and right edge of the `1/1` step.
    fn domain_bounds(&self, level: usize) -> Result<(f64, f64)>;

    /// Length between the steps at the two ends of a Farey-Brocot segment.
    fn gap_length(&self, seg: &FareyInterval) -> Result<f64>;

    /// Precomputes whatever the given heights need.
    fn prepare(&self, _fractions: &[Fraction], _exec: Executor) -> Result<()> {
        Ok(())
    }
}

fn is_endpoint(f: &Fraction) -> bool {
    *f == Fraction::zero() || *f == Fraction::one()
}

/// Default truncation of the Ising position sums.
pub const DEFAULT_P_MAX: u64 = 200_000;

pub struct IsingModel {
    params: IsingParams,
    p_max: u64,
    table: OnceLock<DenominatorTable>,
    total: OnceLock<f64>,
}

impl IsingModel {
    pub fn new(params: IsingParams) -> Self {
        Self::with_p_max(params, DEFAULT_P_MAX)
    }

    pub fn with_p_max(params: IsingParams, p_max: u64) -> Self {
        IsingModel {
            params,
            p_max: p_max.max(1),
            table: OnceLock::new(),
            total: OnceLock::new(),
        }
    }

    pub fn params(&self) -> &IsingParams {
        &self.params
    }

    fn table(&self) -> &DenominatorTable {
        self.table
            .get_or_init(|| DenominatorTable::new(self.params, self.p_max))
    }

    /// Total width of the interior steps of the complete staircase.
    fn interior_total(&self) -> f64 {
        *self
            .total
            .get_or_init(|| self.table().gap_sum(&Fraction::zero(), &Fraction::one()).0)
    }

    /// For non-summable parameters the steps of `farey_level(level)` are packed end to end.
    fn truncated_positions(&self, level: usize) -> Result<Vec<(Fraction, f64, f64)>> {
        let mut x = 0.0;
        let mut out = Vec::new();
        for f in farey_level(level)?.entries {
            let w = ising_step_width(&self.params, &f);
            out.push((f, x, x + w));
            x += w;
        }
        Ok(out)
    }

    /// Tail bound on the positions of the complete layout.
    pub fn position_bound(&self) -> f64 {
        if self.params.is_summable() {
            self.table().tail_bound(1.0)
        } else {
            f64::INFINITY
        }
    }
}

impl StaircaseModel for IsingModel {
    fn id(&self) -> String {
        format!("ising(a={},gamma={})", self.params.a, self.params.gamma)
    }

    fn describe(&self) -> Vec<(String, String)> {
        vec![
            ("model".into(), "ising".into()),
            ("a".into(), self.params.a.to_string()),
            ("gamma".into(), self.params.gamma.to_string()),
            ("p_max".into(), self.p_max.to_string()),
            (
                "layout".into(),
                if self.params.is_summable() {
                    "complete"
                } else {
                    "truncated"
                }
                .into(),
            ),
        ]
    }

    fn step_width(&self, f: &Fraction) -> Result<f64> {
        Ok(ising_step_width(&self.params, f))
    }

    fn step_position(&self, f: &Fraction, level: usize) -> Result<(f64, f64)> {
        let w = ising_step_width(&self.params, f);
        if !self.params.is_summable() {
            return self
                .truncated_positions(level.max(fraction_level(f)))?
                .into_iter()
                .find(|(g, _, _)| g == f)
                .map(|(_, l, r)| (l, r))
                .ok_or_else(|| Error::OutOfRange(f.to_string()));
        }
        if *f == Fraction::zero() {
            return Ok((-w, 0.0));
        }
        if *f == Fraction::one() {
            let t = self.interior_total();
            return Ok((t, t + w));
        }
        if *f > Fraction::one() {
            return Err(Error::OutOfRange(f.to_string()));
        }
        let x = self.table().gap_sum(&Fraction::zero(), f).0;
        Ok((x, x + w))
    }

    fn domain_bounds(&self, level: usize) -> Result<(f64, f64)> {
        let w1 = self.params.width_of_den(1);
        if !self.params.is_summable() {
            let steps = self.truncated_positions(level)?;
            return Ok((0.0, steps.last().expect("level has steps").2));
        }
        Ok((-w1, self.interior_total() + w1))
    }

    fn gap_length(&self, seg: &FareyInterval) -> Result<f64> {
        if !self.params.is_summable() {
            return Err(Error::Divergent(self.params.a));
        }
        Ok(self.table().gap_sum(&seg.left, &seg.right).0)
    }
}

/// The critical circle map; steps are its locking intervals in `omega`.
pub struct CircleModel {
    cache: Arc<TongueCache>,
}

impl CircleModel {
    pub fn new(cfg: CircleSolverConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(CircleModel {
            cache: Arc::new(TongueCache::in_memory(cfg)),
        })
    }

    pub fn with_cache(cache: Arc<TongueCache>) -> Result<Self> {
        cache.config().validate()?;
        Ok(CircleModel { cache })
    }

    pub fn config(&self) -> &CircleSolverConfig {
        self.cache.config()
    }

    pub fn cache(&self) -> &TongueCache {
        &self.cache
    }

    /// Locking intervals of `fractions`, solving the missing ones with `exec`. New results
    /// are stored in `(P, Q)` order. Non-converged results are returned, not stored.
    pub fn intervals(
        &self,
        fractions: &[Fraction],
        exec: Executor,
    ) -> Result<Vec<LockingInterval>> {
        let mut keys = Vec::with_capacity(fractions.len());
        for f in fractions {
            let (q, p) = f
                .to_u64_pair()
                .ok_or_else(|| Error::OutOfRange(f.to_string()))?;
            keys.push((q, p));
        }
        let mut missing: Vec<(u64, u64)> = keys
            .iter()
            .filter(|&&(q, p)| self.cache.get(q, p).is_none())
            .cloned()
            .collect();
        missing.sort_by_key(|&(q, p)| (p, q));
        missing.dedup();
        let cfg = self.cache.config().clone();
        let solved = exec.map(&missing, |&(q, p)| {
            locking_interval(&Fraction::from_u64(q, p), &cfg)
        });
        let solved: Vec<LockingInterval> = solved.into_iter().collect::<Result<_>>()?;
        self.cache.insert_all(&solved)?;
        keys.iter()
            .map(|&(q, p)| {
                if let Some(t) = self.cache.peek(q, p) {
                    return Ok(t);
                }
                let idx = missing
                    .binary_search_by_key(&(p, q), |&(q2, p2)| (p2, q2))
                    .expect("solved above");
                Ok(solved[idx].clone())
            })
            .collect()
    }

    pub fn interval(&self, f: &Fraction) -> Result<LockingInterval> {
        Ok(self
            .intervals(std::slice::from_ref(f), Executor::Sequential)?
            .pop()
            .expect("one result"))
    }

    fn converged(&self, f: &Fraction) -> Result<LockingInterval> {
        let t = self.interval(f)?;
        if !t.converged {
            return Err(Error::NotConverged(vec![f.to_string()]));
        }
        Ok(t)
    }
}

impl StaircaseModel for CircleModel {
    fn id(&self) -> String {
        "circle(K=1)".into()
    }

    fn describe(&self) -> Vec<(String, String)> {
        let c = self.cache.config();
        vec![
            ("model".into(), "circle".into()),
            ("omega_tol".into(), format!("{:e}", c.omega_tol)),
            ("phase_grid".into(), c.phase_grid.to_string()),
            ("refine_iters".into(), c.refine_iters.to_string()),
            ("max_period".into(), c.max_period.to_string()),
        ]
    }

    fn step_width(&self, f: &Fraction) -> Result<f64> {
        Ok(self.converged(f)?.width)
    }

    fn step_position(&self, f: &Fraction, _level: usize) -> Result<(f64, f64)> {
        let t = self.converged(f)?;
        Ok((t.omega_minus, t.omega_plus))
    }

    fn domain_bounds(&self, _level: usize) -> Result<(f64, f64)> {
        Ok((
            self.converged(&Fraction::zero())?.omega_minus,
            self.converged(&Fraction::one())?.omega_plus,
        ))
    }

    fn gap_length(&self, seg: &FareyInterval) -> Result<f64> {
        Ok(self.converged(&seg.right)?.omega_minus - self.converged(&seg.left)?.omega_plus)
    }

    fn prepare(&self, fractions: &[Fraction], exec: Executor) -> Result<()> {
        let bad: Vec<String> = self
            .intervals(fractions, exec)?
            .into_iter()
            .filter(|t| !t.converged)
            .map(|t| t.height.to_string())
            .collect();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::NotConverged(bad))
        }
    }
}

/// Middle-thirds Cantor staircase: the gap of a depth-`k` segment has length `3^-k`.
#[derive(Clone, Copy, Debug, Default)]
pub struct TernaryModel;

impl TernaryModel {
    /// Position of the gap spanned by `seg` inside `[0, 1]`.
    fn gap_of(seg: &FareyInterval) -> (f64, f64) {
        let (mut lo, mut len) = (0.0, 1.0);
        let mut cur = FareyInterval::unit();
        while cur.depth < seg.depth {
            let (l, r) = cur.children();
            len /= 3.0;
            if seg.right <= l.right {
                cur = l;
            } else {
                lo += 2.0 * len;
                cur = r;
            }
        }
        (lo, lo + len)
    }

    fn parent_segment(f: &Fraction) -> Result<FareyInterval> {
        let mut seg = FareyInterval::unit();
        loop {
            let m = seg.mediant();
            if m == *f {
                return Ok(seg);
            }
            let (l, r) = seg.children();
            seg = if *f < m { l } else { r };
            if seg.depth > 64 {
                return Err(Error::OutOfRange(f.to_string()));
            }
        }
    }
}

impl StaircaseModel for TernaryModel {
    fn id(&self) -> String {
        "ternary".into()
    }

    fn describe(&self) -> Vec<(String, String)> {
        vec![("model".into(), "ternary".into())]
    }

    fn step_width(&self, f: &Fraction) -> Result<f64> {
        if is_endpoint(f) {
            return Ok(1.0);
        }
        Ok(3f64.powi(-(fraction_level(f) as i32 - 1)))
    }

    fn step_position(&self, f: &Fraction, _level: usize) -> Result<(f64, f64)> {
        if *f == Fraction::zero() {
            return Ok((-1.0, 0.0));
        }
        if *f == Fraction::one() {
            return Ok((1.0, 2.0));
        }
        let (lo, hi) = Self::gap_of(&Self::parent_segment(f)?);
        let third = (hi - lo) / 3.0;
        Ok((lo + third, hi - third))
    }

    fn domain_bounds(&self, _level: usize) -> Result<(f64, f64)> {
        Ok((-1.0, 2.0))
    }

    fn gap_length(&self, seg: &FareyInterval) -> Result<f64> {
        Ok(3f64.powi(-(seg.depth as i32)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Step {
    pub height: Fraction,
    pub x_left: f64,
    pub x_right: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Staircase {
    pub level: usize,
    pub steps: Vec<Step>,
    /// `(x, g(x))` on a uniform grid over the domain.
    pub samples: Vec<(f64, f64)>,
}

/// Steps of `farey_level(level)` and `resolution` samples of the height function, linear
/// between consecutive steps.
pub fn assemble_staircase(
    model: &dyn StaircaseModel,
    level: usize,
    resolution: usize,
    exec: Executor,
) -> Result<Staircase> {
    let entries = farey_level(level)?.entries;
    model.prepare(&entries, exec)?;
    let mut steps = Vec::with_capacity(entries.len());
    for f in entries {
        let (x_left, x_right) = model.step_position(&f, level)?;
        steps.push(Step {
            height: f,
            x_left,
            x_right,
        });
    }
    if let Some(w) = steps.windows(2).find(|w| w[0].x_right > w[1].x_left) {
        return Err(Error::InvalidArgument(format!(
            "steps {} and {} overlap",
            w[0].height, w[1].height
        )));
    }
    let (x_lo, x_hi) = model.domain_bounds(level)?;
    let n = resolution.max(2);
    let samples = (0..n)
        .map(|i| {
            let x = if i == n - 1 {
                x_hi
            } else {
                x_lo + (x_hi - x_lo) * i as f64 / (n - 1) as f64
            };
            (x, height_at(&steps, x))
        })
        .collect();
    Ok(Staircase {
        level,
        steps,
        samples,
    })
}

fn height_at(steps: &[Step], x: f64) -> f64 {
    let i = steps.partition_point(|s| s.x_left <= x);
    if i == 0 {
        return 0.0;
    }
    let s = &steps[i - 1];
    let h = s.height.to_f64();
    if x <= s.x_right || i == steps.len() {
        return h;
    }
    let next = &steps[i];
    let t = (x - s.x_right) / (next.x_left - s.x_right);
    h + t * (next.height.to_f64() - h)
}
