use std::collections::BTreeMap;

use clap::Subcommand;
use farey_stairs::contfrac::{beta_estimate, convergents, PartialQuotients, TypeLabel};
use farey_stairs::farey::{farey_level, new_fractions, MAX_MATERIALIZED_LEVEL};
use farey_stairs::omega::{alpha_index, omega_approx};
use farey_stairs::selfsim::{fig1_regression, slope_law, PROPORTIONALITY_R2};
use farey_stairs::spectrum::{dimension_estimate, spectrum, summarize};
use farey_stairs::staircase::assemble_staircase;
use farey_stairs::table::{format_float, Cell, Table};
use farey_stairs::{Error, Fraction, Result};

use crate::config::{
    describe_q_grid, parse_digits, parse_q_grid, Built, DigitSpec, ModelKind, RunConfig,
};

#[derive(Subcommand, Clone, Debug)]
pub enum Command {
    /// List the Farey-Brocot fractions of a level.
    Farey {
        #[arg(long)]
        level: usize,
    },
    /// Estimate the Diophantine type of a digit sequence.
    Classify {
        /// golden, silver, naturals, squares, liouville:A1, calibrated:BETA, `a1,...,am`
        /// (finite) or `a1,...,am,...` (periodic block).
        digits: String,
        #[arg(long, short = 'n', default_value_t = 30)]
        horizon: usize,
        #[arg(long)]
        window: Option<usize>,
    },
    /// Circle-map locking intervals of every fraction down to a tree depth.
    Lock {
        #[arg(long)]
        depth: usize,
    },
    /// Step positions or a sampled height function.
    Staircase {
        #[arg(long)]
        level: usize,
        #[arg(long, default_value_t = 1001)]
        resolution: usize,
        /// Emit the steps instead of samples.
        #[arg(long)]
        steps: bool,
    },
    /// Interval lengths of the depth-k approximation of the gap set.
    Omega {
        #[arg(long)]
        depth: usize,
    },
    /// tau(q), alpha(q), f(q) at a depth.
    Spectrum {
        #[arg(long)]
        depth: usize,
        /// `default`, `lin:MIN:MAX:COUNT` or a comma-separated list.
        #[arg(long, default_value = "default", allow_hyphen_values = true)]
        q_grid: String,
    },
    /// Per-depth size regressions and the slope law; writes selfsim_K and slopes tables.
    Selfsim {
        #[arg(long, default_value_t = 2)]
        k_min: usize,
        #[arg(long, default_value_t = 6)]
        k_max: usize,
        #[arg(long, default_value = ".")]
        out_dir: std::path::PathBuf,
    },
    /// Mean step width against denominator on log-log axes.
    Fig1 {
        #[arg(long, default_value_t = 32)]
        p_max: u64,
    },
}

/// A table and, for multi-file commands, its file stem.
pub struct Emit {
    pub stem: Option<String>,
    pub table: Table,
}

fn single(table: Table) -> Vec<Emit> {
    vec![Emit { stem: None, table }]
}

fn pair(f: &Fraction) -> (Cell, Cell) {
    let (q, p) = f.to_u64_pair().expect("materialized fractions fit in u64");
    (Cell::from(q), Cell::from(p))
}

fn label_text(label: &TypeLabel) -> String {
    match label {
        TypeLabel::Finite(b) => format!("G_{b:.2}"),
        TypeLabel::Infinite => "G_inf".into(),
        TypeLabel::Inconclusive => "inconclusive".into(),
    }
}

pub fn run(cmd: &Command, cfg: &RunConfig) -> Result<Vec<Emit>> {
    match cmd {
        Command::Farey { level } => farey(cfg, *level),
        Command::Classify {
            digits,
            horizon,
            window,
        } => classify(cfg, digits, *horizon, *window),
        _ => {
            let built = cfg.build_model()?;
            let out = run_model(cmd, cfg, &built);
            built.report_cache();
            out
        }
    }
}

fn farey(cfg: &RunConfig, level: usize) -> Result<Vec<Emit>> {
    if level > MAX_MATERIALIZED_LEVEL {
        return Err(Error::InvalidArgument(format!(
            "refusing to list level {level}: it has 2^{} + 1 fractions (cap is level {MAX_MATERIALIZED_LEVEL})",
            level - 1
        )));
    }
    let fl = farey_level(level)?;
    let mut t = cfg.table("farey", None, &["index", "q", "p"]);
    t.meta("level", level);
    for (i, f) in fl.entries.iter().enumerate() {
        let (q, p) = pair(f);
        t.push(vec![Cell::from(i), q, p]);
    }
    Ok(single(t))
}

fn classify(cfg: &RunConfig, spec: &str, n: usize, window: Option<usize>) -> Result<Vec<Emit>> {
    let pq = match parse_digits(spec)? {
        DigitSpec::Infinite(pq) => pq,
        DigitSpec::Finite(d) => {
            let len = d.len();
            let value = convergents(&PartialQuotients::finite(d)?, len)?
                .pop()
                .expect("non-empty")
                .fraction();
            let notice = format!("finite continued fraction; the number is the rational {value}");
            eprintln!("notice: {notice}");
            let mut t = cfg.table("classify", None, &["n", "ratio", "exponent", "kappa"]);
            t.meta("digits", spec).meta("notice", notice);
            return Ok(single(t));
        }
    };
    let est = beta_estimate(&pq, n, window)?;
    let mut t = cfg.table("classify", None, &["n", "ratio", "exponent", "kappa"]);
    t.meta("digits", spec)
        .meta("horizon", n)
        .meta("window", est.window);
    let mut rows: BTreeMap<usize, [f64; 3]> = BTreeMap::new();
    for (col, series) in [&est.ratio_series, &est.exponent_series, &est.kappa_series]
        .into_iter()
        .enumerate()
    {
        for &(k, v) in series {
            rows.entry(k).or_insert([f64::NAN; 3])[col] = v;
        }
    }
    for (k, v) in rows {
        t.push(vec![Cell::from(k), v[0].into(), v[1].into(), v[2].into()]);
    }
    t.trail("beta_hat", format_float(est.beta_hat));
    t.trail("label", label_text(&est.label));
    Ok(single(t))
}

fn run_model(cmd: &Command, cfg: &RunConfig, built: &Built) -> Result<Vec<Emit>> {
    let model = built.model();
    let exec = cfg.executor();
    match cmd {
        Command::Lock { depth } => {
            let Built::Circle(circle) = built else {
                return Err(Error::InvalidArgument("lock needs --model circle".into()));
            };
            let level = farey_level(depth + 2)?;
            let fresh = new_fractions(depth + 2)?;
            let tongues = circle.intervals(&level.entries, exec)?;
            let bad: Vec<String> = tongues
                .iter()
                .filter(|t| !t.converged)
                .map(|t| t.height.to_string())
                .collect();
            if !bad.is_empty() {
                return Err(Error::NotConverged(bad));
            }
            let mut t = cfg.table(
                "lock",
                Some(model),
                &[
                    "q",
                    "p",
                    "new",
                    "omega_minus",
                    "omega_plus",
                    "width",
                    "residual",
                ],
            );
            t.meta("depth", depth);
            for tg in &tongues {
                let (q, p) = pair(&tg.height);
                let is_new = fresh.contains(&tg.height) as u64;
                t.push(vec![
                    q,
                    p,
                    Cell::from(is_new),
                    tg.omega_minus.into(),
                    tg.omega_plus.into(),
                    tg.width.into(),
                    tg.residual.into(),
                ]);
            }
            Ok(single(t))
        }
        Command::Staircase {
            level,
            resolution,
            steps,
        } => {
            let sc = assemble_staircase(model, *level, *resolution, exec)?;
            let mut t = if *steps {
                let mut t = cfg.table("staircase", Some(model), &["q", "p", "x_left", "x_right"]);
                for s in &sc.steps {
                    let (q, p) = pair(&s.height);
                    t.push(vec![q, p, s.x_left.into(), s.x_right.into()]);
                }
                t
            } else {
                let mut t = cfg.table("staircase", Some(model), &["x", "g"]);
                for &(x, g) in &sc.samples {
                    t.push(vec![x.into(), g.into()]);
                }
                t
            };
            t.meta("level", level).meta("resolution", resolution);
            Ok(single(t))
        }
        Command::Omega { depth } => {
            let approx = omega_approx(model, *depth, exec)?;
            let mut t = cfg.table(
                "omega",
                Some(model),
                &[
                    "index", "left_q", "left_p", "right_q", "right_p", "length", "alpha",
                ],
            );
            t.meta("depth", depth);
            for (i, iv) in approx.intervals.iter().enumerate() {
                let (lq, lp) = pair(&iv.label.left);
                let (rq, rp) = pair(&iv.label.right);
                t.push(vec![
                    Cell::from(i),
                    lq,
                    lp,
                    rq,
                    rp,
                    iv.length.into(),
                    alpha_index(&approx, i)?.into(),
                ]);
            }
            t.trail("total_length", format_float(approx.total_length()));
            t.trail("base_length", format_float(approx.base_length));
            t.trail("dimension", format_float(dimension_estimate(&approx)?));
            Ok(single(t))
        }
        Command::Spectrum { depth, q_grid } => {
            let grid = parse_q_grid(q_grid)?;
            let approx = omega_approx(model, *depth, exec)?;
            let points = spectrum(&approx, &grid, exec)?;
            let mut t = cfg.table("spectrum", Some(model), &["q", "tau", "alpha", "f"]);
            t.meta("depth", depth)
                .meta("q_grid", describe_q_grid(&grid));
            for p in &points {
                t.push(vec![p.q.into(), p.tau.into(), p.alpha.into(), p.f.into()]);
            }
            t.trail("dimension", format_float(dimension_estimate(&approx)?));
            if points.len() >= 2 {
                let s = summarize(*depth, &points)?;
                t.trail("alpha_min", format_float(s.alpha_min));
                t.trail("alpha_max", format_float(s.alpha_max));
                t.trail("f_left", format_float(s.f_left));
                t.trail("alpha_at_f_max", format_float(s.alpha_at_f_max));
                t.trail("increasing_share", format_float(s.increasing_share));
                t.trail("argmax_gap", format_float(s.argmax_gap));
                t.trail(
                    "thresholds",
                    "desk-scale: f_left < 0.05, increasing_share >= 0.9, argmax_gap < 0.15",
                );
            }
            Ok(single(t))
        }
        Command::Selfsim { k_min, k_max, .. } => {
            let law = slope_law(model, *k_min..=*k_max, exec)?;
            let mut out = Vec::new();
            for fit in &law.fits {
                let mut t = cfg.table(
                    "selfsim",
                    Some(model),
                    &["k", "q", "p", "omega_len", "fb_len"],
                );
                t.meta("k", fit.k);
                for pt in &fit.points {
                    let (q, p) = pair(&pt.left);
                    t.push(vec![
                        Cell::from(fit.k),
                        q,
                        p,
                        pt.omega_len.into(),
                        pt.fb_len.into(),
                    ]);
                }
                out.push(Emit {
                    stem: Some(format!("selfsim_{}", fit.k)),
                    table: t,
                });
            }
            let mut t = cfg.table("selfsim", Some(model), &["k", "slope", "intercept", "r2"]);
            t.meta("k_min", k_min).meta("k_max", k_max);
            for fit in &law.fits {
                t.push(vec![
                    Cell::from(fit.k),
                    fit.fit.slope.into(),
                    fit.fit.intercept.into(),
                    fit.fit.r2.into(),
                ]);
            }
            t.trail("law_slope", format_float(law.linear_fit.slope));
            t.trail("law_intercept", format_float(law.linear_fit.intercept));
            t.trail("law_r2", format_float(law.linear_fit.r2));
            let flagged: Vec<String> = law.flagged.iter().map(usize::to_string).collect();
            t.trail(
                format!("flagged_r2_below_{PROPORTIONALITY_R2}"),
                flagged.join(" "),
            );
            out.push(Emit {
                stem: Some("slopes".into()),
                table: t,
            });
            Ok(out)
        }
        Command::Fig1 { p_max } => {
            let (fit, rows) = fig1_regression(model, *p_max, exec)?;
            let mut t = cfg.table(
                "fig1",
                Some(model),
                &["p", "mean_width", "log_p", "log_mean_width"],
            );
            t.meta("p_max", p_max).meta("log_base", 10);
            for r in &rows {
                t.push(vec![
                    Cell::from(r.p),
                    r.mean_width.into(),
                    r.log_p.into(),
                    r.log_mean_width.into(),
                ]);
            }
            t.trail("slope", format_float(fit.slope));
            t.trail("intercept", format_float(fit.intercept));
            t.trail("r2", format_float(fit.r2));
            t.trail("residual_max", format_float(fit.residual_max));
            if cfg.model == ModelKind::Ising {
                t.trail("expected_slope", format_float(-(cfg.a + 1.0)));
            }
            Ok(single(t))
        }
        Command::Farey { .. } | Command::Classify { .. } => unreachable!("handled without a model"),
    }
}
