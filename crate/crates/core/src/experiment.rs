//! JSON-configured experiments. Each `cmd_*` function returns a [`Report`]
//! holding CSV rows and a JSON document; the `semibound` binary only parses
//! arguments and writes one of the two.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bound::PiecewiseLogAffineBound;
use crate::error::{Error, Result};
use crate::iteration::{
    apply_in_order, iterate_u_only, iterate_with, underline_u, IterationOptions, OmegaSet,
    ResolventProfile,
};
use crate::models::{diffop_r, jordan_numrange_slope, jordan_true_norm, rstar, JordanBlockModel};
use crate::output::{bound_rows, grid_rows, grid_steps, time_grid, write_csv, Format, Row};
use crate::riccati::{a_star, gp_bound, update_bound};

/// Top-level experiment description. Unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub initial_bound: InitialBound,
    pub omega_set: OmegaSetConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub iteration: IterationConfig,
    #[serde(default)]
    pub mode: Mode,
    /// Split `t ≥ a + b` for the Gearhart–Prüss mode; `a = b = t/2` if absent.
    #[serde(default)]
    pub gp: Option<GpSplit>,
    /// Frequencies to apply one after another (in this order) in `update`.
    #[serde(default)]
    pub order: Option<Vec<f64>>,
    #[serde(default)]
    pub output: Option<OutputConfig>,
    /// Directory relative paths in the config are resolved against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    #[serde(rename = "diffop")]
    DiffOp {
        #[serde(default = "unit")]
        gamma: f64,
        #[serde(default)]
        delta: f64,
    },
    Jordan { n: usize },
    /// Either inline `pairs` or a `path` to a JSON array of `[ω, r]` pairs.
    Tabulated {
        #[serde(default)]
        pairs: Option<Vec<(f64, f64)>>,
        #[serde(default)]
        path: Option<PathBuf>,
    },
}

fn unit() -> f64 {
    1.0
}

/// `"one"`, `{"exp": δ}` (optionally with `"log_scale"`), or an explicit
/// bound `{"breakpoints": …, "slopes": …, "intercepts": …}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialBound {
    Named(NamedBound),
    Exp(ExpBound),
    Explicit(PiecewiseLogAffineBound),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedBound {
    One,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpBound {
    pub exp: f64,
    #[serde(default)]
    pub log_scale: f64,
}

impl Default for InitialBound {
    fn default() -> Self {
        Self::Named(NamedBound::One)
    }
}

impl InitialBound {
    pub fn to_bound(&self) -> Result<PiecewiseLogAffineBound> {
        match self {
            Self::Named(NamedBound::One) => Ok(PiecewiseLogAffineBound::one()),
            Self::Exp(e) => {
                if !(e.exp.is_finite() && e.log_scale.is_finite()) {
                    return Err(Error::Config("exp bound parameters must be finite".into()));
                }
                Ok(PiecewiseLogAffineBound::scaled_exponential(e.log_scale, e.exp))
            }
            Self::Explicit(m) => Ok(m.clone()),
        }
    }
}

/// A list of values, or `count` log-spaced values from `from` to `to`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OmegaSetConfig {
    List(Vec<f64>),
    LogSpaced(LogSpaced),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogSpaced {
    pub from: f64,
    pub to: f64,
    pub count: usize,
}

impl OmegaSetConfig {
    pub fn to_set(&self) -> Result<OmegaSet> {
        match self {
            Self::List(v) => OmegaSet::new(v.clone()),
            Self::LogSpaced(l) => OmegaSet::log_spaced(l.from, l.to, l.count),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub h: f64,
    #[serde(rename = "T")]
    pub t_max: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { h: 0.01, t_max: 20.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterationConfig {
    pub max_steps: usize,
    #[serde(default = "yes")]
    pub use_semigroupize: bool,
}

fn yes() -> bool {
    true
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self {
            max_steps: 20,
            use_semigroupize: true,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// `U(m, ω, r)` and `U̲_Ω`.
    #[default]
    Riccati,
    /// The quantitative Gearhart–Prüss bound.
    Gp,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GpSplit {
    pub a: f64,
    pub b: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

/// A validated configuration.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub profile: ResolventProfile,
    pub omegas: OmegaSet,
    pub initial: PiecewiseLogAffineBound,
    pub h: f64,
    pub t_max: f64,
    pub config: ExperimentConfig,
}

fn config_err(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string())
}

impl FromStr for ExperimentConfig {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(config_err)
    }
}

impl ExperimentConfig {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: Self = text
            .parse()
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    fn profile(&self) -> Result<ResolventProfile> {
        match &self.model {
            ModelConfig::DiffOp { gamma, delta } => ResolventProfile::scaled_diffop(*gamma, *delta),
            ModelConfig::Jordan { n } => ResolventProfile::jordan(*n),
            ModelConfig::Tabulated { pairs, path } => match (pairs, path) {
                (Some(p), None) => ResolventProfile::tabulated(p.iter().copied()),
                (None, Some(p)) => {
                    let full = match &self.base_dir {
                        Some(dir) if p.is_relative() => dir.join(p),
                        _ => p.clone(),
                    };
                    let text = std::fs::read_to_string(&full).map_err(|e| {
                        Error::Config(format!("cannot read profile {}: {e}", full.display()))
                    })?;
                    let pairs: Vec<(f64, f64)> = serde_json::from_str(&text).map_err(|e| {
                        Error::Config(format!("profile {}: {e}", full.display()))
                    })?;
                    ResolventProfile::tabulated(pairs)
                }
                _ => Err(Error::Config(
                    "a tabulated model needs exactly one of 'pairs' and 'path'".into(),
                )),
            },
        }
    }

    /// Checks every invariant and builds the objects the commands need.
    /// All failures are reported as configuration errors.
    pub fn resolve(&self) -> Result<Experiment> {
        let as_config = |e: Error| match e {
            Error::Config(_) => e,
            other => Error::Config(other.to_string()),
        };
        let profile = self.profile().map_err(as_config)?;
        let omegas = self.omega_set.to_set().map_err(as_config)?;
        let (lo, hi) = profile.domain();
        if let Some(w) = omegas.values().iter().find(|&&w| !(w > lo && w < hi)) {
            return Err(Error::Config(format!(
                "omega = {w} lies outside the profile domain ]{lo}, {hi}["
            )));
        }
        let initial = self.initial_bound.to_bound().map_err(as_config)?;
        let GridConfig { h, t_max } = self.grid;
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Config(format!("grid.h must be positive, got {h}")));
        }
        if !(t_max >= h && t_max.is_finite()) {
            return Err(Error::Config(format!("grid.T must be >= grid.h, got {t_max}")));
        }
        if let Some(GpSplit { a, b }) = self.gp {
            if !(a > 0.0 && b > 0.0) {
                return Err(Error::Config(format!("gp split needs a, b > 0 (a = {a}, b = {b})")));
            }
        }
        if let Some(order) = &self.order {
            if let Some(w) = order.iter().find(|&&w| !(w > lo && w < hi)) {
                return Err(Error::Config(format!("order: omega = {w} outside the profile domain")));
            }
        }
        Ok(Experiment {
            profile,
            omegas,
            initial,
            h,
            t_max,
            config: self.clone(),
        })
    }
}

/// Output of a command.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub rows: Vec<Row>,
    pub json: Value,
}

impl Report {
    pub fn write<W: std::io::Write>(&self, format: Format, mut out: W) -> Result<()> {
        match format {
            Format::Csv => write_csv(out, &self.rows),
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, &self.json)?;
                writeln!(out)?;
                Ok(())
            }
        }
    }
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

/// `U(1, 0, r)` sampled on `[0, t_max]`.
pub fn cmd_wei(r: f64, h: f64, t_max: f64) -> Result<Report> {
    let m = PiecewiseLogAffineBound::wei(r)?;
    if !(h > 0.0) || !(t_max >= 0.0) {
        return Err(Error::domain(format!("need h > 0 and t_max >= 0 (h = {h}, t_max = {t_max})")));
    }
    Ok(Report {
        rows: bound_rows(&m, h, t_max, "wei"),
        json: json!({ "r": r, "bound": m }),
    })
}

/// One round of updates per the configuration: every `U(m, ω, r(ω))`, their
/// minimum, and optionally the updates applied in a given order. In `gp`
/// mode, the Gearhart–Prüss bound for every `ω` instead.
pub fn cmd_update(cfg: &ExperimentConfig) -> Result<Report> {
    let ex = cfg.resolve()?;
    match cfg.mode {
        Mode::Riccati => update_riccati(&ex),
        Mode::Gp => update_gp(&ex),
    }
}

fn update_riccati(ex: &Experiment) -> Result<Report> {
    let m = &ex.initial;
    let pairs = ex.omegas.pairs(&ex.profile)?;
    let mut rows = bound_rows(m, ex.h, ex.t_max, "m0");
    let mut updates = Vec::new();
    for pair in &pairs {
        let a = a_star(m, *pair);
        let u = update_bound(m, *pair);
        let label = format!("U omega={}", pair.omega);
        rows.extend(bound_rows(&u, ex.h, ex.t_max, &label));
        updates.push(json!({
            "omega": pair.omega,
            "r": pair.r,
            "a_star": finite_or_null(a),
            "bound": u,
        }));
    }
    let combined = underline_u(m, &ex.omegas, &ex.profile)?;
    rows.extend(bound_rows(&combined, ex.h, ex.t_max, "underline_U"));
    let mut doc = json!({
        "initial": m,
        "updates": updates,
        "underline_u": combined,
    });

    if let Some(order) = &ex.config.order {
        let ordered_pairs = order
            .iter()
            .map(|&w| ex.profile.pair(w))
            .collect::<Result<Vec<_>>>()?;
        let mut cur = m.clone();
        let mut a_stars = Vec::new();
        for &p in &ordered_pairs {
            a_stars.push(finite_or_null(a_star(&cur, p)));
            cur = update_bound(&cur, p);
        }
        debug_assert_eq!(cur, apply_in_order(m, &ordered_pairs));
        rows.extend(bound_rows(&cur, ex.h, ex.t_max, "ordered"));
        doc["ordered"] = json!({ "omegas": order, "a_stars": a_stars, "bound": cur });
    }
    Ok(Report { rows, json: doc })
}

fn update_gp(ex: &Experiment) -> Result<Report> {
    let m = &ex.initial;
    let pairs = ex.omegas.pairs(&ex.profile)?;
    let mut rows = Vec::new();
    let mut curves = Vec::new();
    for pair in &pairs {
        let label = format!("gp omega={}", pair.omega);
        let mut samples = Vec::new();
        for t in time_grid(ex.h, ex.t_max).skip(1) {
            let (a, b) = match ex.config.gp {
                Some(GpSplit { a, b }) => (a, b),
                None => (0.5 * t, 0.5 * t),
            };
            if t < a + b {
                continue;
            }
            let v = gp_bound(m, *pair, a, b, t)?;
            rows.push(Row::new(t, v, &label));
            samples.push((t, v));
        }
        curves.push(json!({ "omega": pair.omega, "r": pair.r, "samples": samples }));
    }
    Ok(Report {
        rows,
        json: json!({ "initial": m, "split": ex.config.gp, "gp": curves }),
    })
}

/// Iterates `𝔖 U̲_Ω` (or `U̲_Ω` alone) per the configuration.
pub fn cmd_iterate(cfg: &ExperimentConfig) -> Result<Report> {
    let ex = cfg.resolve()?;
    let opts = IterationOptions {
        max_steps: cfg.iteration.max_steps,
        h: ex.h,
        n: grid_steps(ex.h, ex.t_max),
        semigroupize: cfg.iteration.use_semigroupize,
    };
    let trace = iterate_with(&ex.initial, &ex.omegas, &ex.profile, opts)?;
    let mut rows = Vec::new();
    for step in &trace.steps {
        let label = format!("step {}", step.index);
        match (&step.grid, &step.exact) {
            (Some(g), _) => rows.extend(grid_rows(g, &label)),
            (None, Some(m)) => rows.extend(bound_rows(m, ex.h, ex.t_max, &label)),
            (None, None) => {}
        }
    }
    Ok(Report {
        rows,
        json: serde_json::to_value(&trace)?,
    })
}

/// `(ω, r(ω))` over the configured frequency set.
pub fn cmd_profile(cfg: &ExperimentConfig) -> Result<Report> {
    let ex = cfg.resolve()?;
    let pairs = ex.omegas.pairs(&ex.profile)?;
    let rows = pairs.iter().map(|p| Row::new(p.omega, p.r, "r")).collect();
    let doc: Vec<(f64, f64)> = pairs.iter().map(|p| (p.omega, p.r)).collect();
    Ok(Report {
        rows,
        json: json!({ "model": cfg.model, "profile": doc }),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FigureName {
    Omegar,
    Jordan3,
    DiffopR,
}

impl FromStr for FigureName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omegar" => Ok(Self::Omegar),
            "jordan3" => Ok(Self::Jordan3),
            "diffop_r" => Ok(Self::DiffopR),
            other => Err(Error::Config(format!(
                "unknown figure '{other}' (expected omegar, jordan3 or diffop_r)"
            ))),
        }
    }
}

/// Abscissa range for figures; `None` picks the figure's default.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FigureRange {
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub step: Option<f64>,
}

impl FigureRange {
    fn resolve(&self, from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
        let (from, to, step) = (
            self.from.unwrap_or(from),
            self.to.unwrap_or(to),
            self.step.unwrap_or(step),
        );
        if !(step > 0.0 && to >= from && from.is_finite() && to.is_finite()) {
            return Err(Error::Config(format!(
                "bad figure range from = {from}, to = {to}, step = {step}"
            )));
        }
        let n = grid_steps(step, to - from);
        Ok((0..=n).map(|k| from + k as f64 * step).collect())
    }
}

/// The 101 frequencies `e^{-5}, e^{-4.9}, …, e^{5}`.
pub fn jordan_fine_omegas() -> OmegaSet {
    OmegaSet::new((0..=100).map(|k| (-5.0 + 0.1 * k as f64).exp()).collect())
        .expect("non-empty and finite")
}

/// Bound for `‖e^{tJ}‖` obtained by updating the numerical-range bound
/// `e^{t cos(π/(n+1))}` with the frequencies `omegas` until nothing changes.
pub fn jordan_updated_bound(n: usize, omegas: &OmegaSet) -> Result<PiecewiseLogAffineBound> {
    let model = JordanBlockModel::new(n)?;
    let m0 = PiecewiseLogAffineBound::exponential(jordan_numrange_slope(model));
    let trace = iterate_u_only(&m0, omegas, &ResolventProfile::Jordan(model), 50)?;
    Ok(trace
        .last()
        .exact
        .clone()
        .expect("exact iterations keep the bound"))
}

/// The `ω` where the two regions in which iterating an update with
/// `(ω, r)` after `(0, 1)` can help become non-empty: below the first value
/// `r*(π/2, ω) > ω + 1`, above the second `r*(π/8, ω) < ω + 1`.
pub fn omegar_thresholds() -> Result<(f64, f64)> {
    let lower = bisect_sign(|w| Ok(rstar(FRAC_PI_2, w)? - (w + 1.0)), -5.0, 0.0)?;
    let upper = bisect_sign(|w| Ok(w + 1.0 - rstar(FRAC_PI_8, w)?), 1.0, 10.0)?;
    Ok((lower, upper))
}

/// Root of `f` on `[a, b]` given a sign change.
fn bisect_sign(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<f64> {
    let fa = f(a)?;
    if fa.signum() == f(b)?.signum() {
        return Err(Error::NonConvergent(format!("no sign change on [{a}, {b}]")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if f(mid)?.signum() == fa.signum() {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

pub fn cmd_figure(name: FigureName, range: FigureRange) -> Result<Report> {
    match name {
        FigureName::Omegar => {
            let omegas = range.resolve(-3.0, 6.0, 0.01)?;
            let mut rows = Vec::new();
            for &w in &omegas {
                rows.push(Row::new(w, w, "r=omega"));
                rows.push(Row::new(w, w + 1.0, "r=omega+1"));
            }
            for (alpha, label) in [
                (FRAC_PI_4, "rstar(pi/4)"),
                (FRAC_PI_2, "rstar(pi/2)"),
                (FRAC_PI_8, "rstar(pi/8)"),
            ] {
                for &w in &omegas {
                    rows.push(Row::new(w, rstar(alpha, w)?, label));
                }
            }
            let (lower, upper) = omegar_thresholds()?;
            Ok(Report {
                rows,
                json: json!({ "thresholds": { "lower": lower, "upper": upper } }),
            })
        }
        FigureName::Jordan3 => {
            let model = JordanBlockModel::new(3)?;
            let times = range.resolve(0.0, 20.0, 0.1)?;
            let coarse = OmegaSet::new(vec![0.5, 1.0, 2.0])?;
            let b3 = jordan_updated_bound(3, &coarse)?;
            let b101 = jordan_updated_bound(3, &jordan_fine_omegas())?;
            let slope = jordan_numrange_slope(model);
            let mut rows = Vec::new();
            for &t in &times {
                rows.push(Row::new(t, jordan_true_norm(model, t)?.ln(), "true_norm"));
            }
            rows.extend(times.iter().map(|&t| Row::new(t, slope * t, "numerical_range")));
            rows.extend(times.iter().map(|&t| Row::new(t, b3.log_at(t), "omega3")));
            rows.extend(times.iter().map(|&t| Row::new(t, b101.log_at(t), "omega101")));
            Ok(Report {
                rows,
                json: json!({ "numerical_range_slope": slope, "omega3": b3, "omega101": b101 }),
            })
        }
        FigureName::DiffopR => {
            let omegas = range.resolve(-5.0, 5.0, 0.05)?;
            let rows = omegas
                .iter()
                .map(|&w| Ok(Row::new(w, diffop_r(w)?, "r")))
                .collect::<Result<Vec<_>>>()?;
            Ok(Report {
                json: json!({ "r": rows.iter().map(|r| (r.t, r.value)).collect::<Vec<_>>() }),
                rows,
            })
        }
    }
}
