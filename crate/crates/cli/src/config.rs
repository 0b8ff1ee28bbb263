use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, ValueEnum};
use farey_stairs::contfrac::{DigitRule, PartialQuotients};
use farey_stairs::spectrum::default_q_grid;
use farey_stairs::staircase::{
    CircleModel, CircleSolverConfig, IsingModel, IsingParams, StaircaseModel, TernaryModel,
    TongueCache, DEFAULT_P_MAX,
};
use farey_stairs::table::{format_float, Table};
use farey_stairs::{Error, Executor, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Circle,
    Ising,
    /// Equal-thirds Cantor staircase, a closed-form fixture.
    Ternary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Options shared by every subcommand.
#[derive(Args, Clone, Debug)]
pub struct RunConfig {
    #[arg(long, value_enum, default_value = "circle", global = true)]
    pub model: ModelKind,
    /// Ising width exponent.
    #[arg(long, default_value_t = 2.0, global = true)]
    pub a: f64,
    /// Ising width scale.
    #[arg(long, default_value_t = 1.0, global = true)]
    pub gamma: f64,
    /// Denominator cutoff of the Ising position sums.
    #[arg(long, default_value_t = DEFAULT_P_MAX, global = true)]
    pub ising_p_max: u64,
    #[arg(long, default_value_t = 1e-10, global = true)]
    pub omega_tol: f64,
    #[arg(long, default_value_t = 256, global = true)]
    pub phase_grid: usize,
    #[arg(long, default_value_t = 60, global = true)]
    pub refine_iters: usize,
    #[arg(long, default_value_t = 256, global = true)]
    pub max_period: u64,
    /// Tongue cache (JSON lines).
    #[arg(long, env = "FAREY_STAIRS_CACHE", global = true)]
    pub cache_path: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, short = 'o', global = true)]
    pub output_path: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv", global = true)]
    pub format: Format,
    #[arg(long, default_value_t = 1, global = true)]
    pub jobs: usize,
}

impl RunConfig {
    pub fn solver(&self) -> CircleSolverConfig {
        CircleSolverConfig {
            omega_tol: self.omega_tol,
            phase_grid: self.phase_grid,
            refine_iters: self.refine_iters,
            max_period: self.max_period,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.jobs == 0 {
            return Err(Error::InvalidArgument("--jobs must be at least 1".into()));
        }
        match self.model {
            ModelKind::Circle => self.solver().validate(),
            ModelKind::Ising => {
                IsingParams::new(self.a, self.gamma)?;
                if self.ising_p_max < 2 {
                    return Err(Error::InvalidArgument(
                        "--ising-p-max must be at least 2".into(),
                    ));
                }
                Ok(())
            }
            ModelKind::Ternary => Ok(()),
        }
    }

    pub fn executor(&self) -> Executor {
        Executor::from_jobs(self.jobs)
    }

    pub fn build_model(&self) -> Result<Built> {
        Ok(match self.model {
            ModelKind::Circle => {
                let cache = match &self.cache_path {
                    Some(p) => TongueCache::open(p, self.solver())?,
                    None => TongueCache::in_memory(self.solver()),
                };
                Built::Circle(CircleModel::with_cache(Arc::new(cache))?)
            }
            ModelKind::Ising => Built::Ising(IsingModel::with_p_max(
                IsingParams::new(self.a, self.gamma)?,
                self.ising_p_max,
            )),
            ModelKind::Ternary => Built::Ternary(TernaryModel),
        })
    }

    /// Preamble shared by every table: command, model parameters and format. The worker count
    /// and file paths are left out so output bytes depend on the computation alone.
    pub fn table(
        &self,
        command: &str,
        model: Option<&dyn StaircaseModel>,
        columns: &[&str],
    ) -> Table {
        let mut t = Table::new(columns.iter().copied());
        t.meta("tool", concat!("farey-stairs ", env!("CARGO_PKG_VERSION")));
        t.meta("command", command);
        if let Some(m) = model {
            for (k, v) in m.describe() {
                t.meta(k, v);
            }
        }
        t.meta("format", self.format.extension());
        t
    }
}

pub enum Built {
    Circle(CircleModel),
    Ising(IsingModel),
    Ternary(TernaryModel),
}

impl Built {
    pub fn model(&self) -> &dyn StaircaseModel {
        match self {
            Built::Circle(m) => m,
            Built::Ising(m) => m,
            Built::Ternary(m) => m,
        }
    }

    pub fn report_cache(&self) {
        if let Built::Circle(m) = self {
            let (hits, misses) = m.cache().stats();
            eprintln!(
                "cache: {hits} hits, {misses} misses, {} entries{}",
                m.cache().len(),
                m.cache()
                    .path()
                    .map(|p| format!(" ({})", p.display()))
                    .unwrap_or_default()
            );
        }
    }
}

/// `default`, `lin:MIN:MAX:COUNT`, or an explicit comma-separated list.
pub fn parse_q_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("malformed q grid {spec:?}"));
    let grid = if spec == "default" {
        default_q_grid()
    } else if let Some(rest) = spec.strip_prefix("lin:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let [lo, hi, n] = parts.as_slice() else {
            return Err(bad());
        };
        let lo: f64 = lo.parse().map_err(|_| bad())?;
        let hi: f64 = hi.parse().map_err(|_| bad())?;
        let n: usize = n.parse().map_err(|_| bad())?;
        if n < 2 || !(hi > lo) {
            return Err(bad());
        }
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    } else {
        spec.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if grid.iter().any(|q| !q.is_finite()) || grid.is_empty() {
        return Err(bad());
    }
    Ok(grid)
}

pub fn describe_q_grid(grid: &[f64]) -> String {
    grid.iter()
        .map(|&q| format_float(q))
        .collect::<Vec<_>>()
        .join(" ")
}

/// A digit sequence named on the command line.
pub enum DigitSpec {
    Finite(Vec<u64>),
    Infinite(PartialQuotients),
}

/// Accepts `golden`, `silver`, `naturals`, `squares`, `liouville:A1`, `calibrated:BETA`,
/// a finite list `a1,a2,...,am`, or a periodic block `a1,...,am,...`.
pub fn parse_digits(spec: &str) -> Result<DigitSpec> {
    let bad = |why: &str| Error::InvalidArgument(format!("malformed digit spec {spec:?}: {why}"));
    let spec = spec.trim();
    let named = match spec {
        "golden" => Some(PartialQuotients::golden()),
        "silver" => Some(PartialQuotients::silver()),
        "naturals" => Some(PartialQuotients::with_rule(DigitRule::Naturals)?),
        "squares" => Some(PartialQuotients::with_rule(DigitRule::Squares)?),
        _ => None,
    };
    if let Some(pq) = named {
        return Ok(DigitSpec::Infinite(pq));
    }
    if let Some(a1) = spec.strip_prefix("liouville:") {
        let a1: u64 = a1
            .parse()
            .map_err(|_| bad("liouville needs an integer a1"))?;
        return Ok(DigitSpec::Infinite(PartialQuotients::with_rule(
            DigitRule::Liouville { a1 },
        )?));
    }
    if let Some(beta) = spec.strip_prefix("calibrated:") {
        let beta: f64 = beta.parse().map_err(|_| bad("calibrated needs a number"))?;
        if !(beta >= 2.0) {
            return Err(bad("calibrated needs beta >= 2"));
        }
        return Ok(DigitSpec::Infinite(PartialQuotients::calibrated(beta)?));
    }
    let mut parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    let periodic = parts.last() == Some(&"...");
    if periodic {
        parts.pop();
    }
    if parts.is_empty() || parts.iter().any(|p| p.is_empty()) {
        return Err(bad("empty entry"));
    }
    let digits: Vec<u64> = parts
        .iter()
        .map(|p| {
            p.parse::<u64>()
                .map_err(|_| bad("digits must be positive integers"))
        })
        .collect::<Result<_>>()?;
    if digits.contains(&0) {
        return Err(bad("digits must be positive integers"));
    }
    Ok(if periodic {
        DigitSpec::Infinite(PartialQuotients::with_rule(DigitRule::Periodic(digits))?)
    } else {
        DigitSpec::Finite(digits)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digit_specs() {
        assert!(matches!(
            parse_digits("1,1,1,...").unwrap(),
            DigitSpec::Infinite(_)
        ));
        assert!(
            matches!(parse_digits("2,2,2").unwrap(), DigitSpec::Finite(ref d) if d == &[2, 2, 2])
        );
        assert!(matches!(
            parse_digits("liouville:1").unwrap(),
            DigitSpec::Infinite(_)
        ));
        for bad in [
            "",
            "1,,2",
            "1,0",
            "x",
            "liouville:",
            "calibrated:1.5",
            "1,-2",
        ] {
            assert!(parse_digits(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn q_grids() {
        assert_eq!(parse_q_grid("default").unwrap().len(), 81);
        assert_eq!(parse_q_grid("lin:-1:1:3").unwrap(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(parse_q_grid("0, 1,2").unwrap(), vec![0.0, 1.0, 2.0]);
        assert!(parse_q_grid("lin:1:0:3").is_err());
        assert!(parse_q_grid("a,b").is_err());
    }
}
