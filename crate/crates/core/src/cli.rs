//! JSON-configured runs, convergence sweeps and the built-in example
//! presets.

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bie::{BoundaryData, BoundaryProblem, ComplexFn, ProblemKind};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::green::{green, MediumPair, PlaneWave, Point2};
use crate::nystrom::{assemble, solve, DensitySolution, Grid};
use crate::potentials::{four_wave_exact, point_source_exact, total_field, write_field_csv, FieldSample};
use crate::specfun::C64;
use crate::surface::SurfaceProfile;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceSpec {
    Builtin(String),
    Expr {
        f: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        df: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d2f: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IncidentSpec {
    Plane { theta_d: f64 },
    Point { y0: [f64; 2] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BetaSpec {
    /// [re, im]
    Constant([f64; 2]),
    Expr {
        re: String,
        #[serde(default = "zero_expr")]
        im: String,
    },
}

fn zero_expr() -> String {
    "0".into()
}

fn default_beta() -> BetaSpec {
    BetaSpec::Constant([1.0, 0.0])
}

fn default_n() -> usize {
    16
}

fn default_a_pi() -> f64 {
    10.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    /// Directory for CSV files; nothing is written when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default = "yes")]
    pub density: bool,
    #[serde(default = "yes")]
    pub field: bool,
}

fn yes() -> bool {
    true
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { dir: None, density: true, field: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemKind,
    pub k_plus: f64,
    pub k_minus: f64,
    pub surface: SurfaceSpec,
    pub incident: IncidentSpec,
    #[serde(default = "default_beta")]
    pub beta: BetaSpec,
    /// Dirichlet coupling; √(k₊k₋) when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default = "default_n", rename = "N")]
    pub n: usize,
    /// Truncation half-width in units of π.
    #[serde(default = "default_a_pi")]
    pub a_pi: f64,
    #[serde(default)]
    pub eval_points: Vec<[f64; 2]>,
    #[serde(default)]
    pub output: OutputSpec,
}

fn field_err(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{field}: {msg}"))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("k_plus", self.k_plus), ("k_minus", self.k_minus), ("a_pi", self.a_pi)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(field_err(name, format!("must be positive and finite, got {v}")));
            }
        }
        if self.k_plus == self.k_minus {
            return Err(field_err("k_minus", "must differ from k_plus"));
        }
        if self.n == 0 {
            return Err(field_err("N", "must be at least 1"));
        }
        let steps = self.a_pi * self.n as f64;
        if (steps - steps.round()).abs() > 1e-9 * steps {
            return Err(field_err("a_pi", format!("A/h = a_pi*N = {steps} must be an integer")));
        }
        if let Some(eta) = self.eta {
            if !(eta.is_finite() && eta > 0.0) {
                return Err(field_err("eta", format!("must be positive, got {eta}")));
            }
        }
        match &self.incident {
            IncidentSpec::Plane { theta_d } => {
                if !(theta_d.is_finite() && (PI..=2.0 * PI).contains(theta_d)) {
                    return Err(field_err("incident.plane.theta_d", format!("must lie in [pi, 2pi], got {theta_d}")));
                }
            }
            IncidentSpec::Point { y0 } => {
                if !(y0[0].is_finite() && y0[1].is_finite()) {
                    return Err(field_err("incident.point.y0", "must be finite"));
                }
            }
        }
        if let BetaSpec::Constant(b) = &self.beta {
            if !(b[0].is_finite() && b[1].is_finite()) {
                return Err(field_err("beta", "must be finite"));
            }
        }
        for (i, x) in self.eval_points.iter().enumerate() {
            if !(x[0].is_finite() && x[1].is_finite()) {
                return Err(field_err(&format!("eval_points[{i}]"), "must be finite"));
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn medium(&self) -> Result<MediumPair> {
        MediumPair::new(self.k_plus, self.k_minus).map_err(|e| field_err("k_plus/k_minus", e))
    }

    pub fn build_surface(&self) -> Result<SurfaceProfile> {
        match &self.surface {
            SurfaceSpec::Builtin(name) => SurfaceProfile::builtin(name),
            SurfaceSpec::Expr { f, df, d2f } => SurfaceProfile::from_expressions(f, df.as_deref(), d2f.as_deref()),
        }
        .map_err(|e| match e {
            Error::Config(m) | Error::InvalidSurface(m) => field_err("surface", m),
            other => other,
        })
    }

    fn build_beta(&self) -> Result<ComplexFn> {
        Ok(match &self.beta {
            BetaSpec::Constant([re, im]) => {
                let b = C64::new(*re, *im);
                Arc::new(move |_| b)
            }
            BetaSpec::Expr { re, im } => {
                let re = Expr::parse(re).map_err(|e| field_err("beta.re", e))?;
                let im = Expr::parse(im).map_err(|e| field_err("beta.im", e))?;
                Arc::new(move |s| C64::new(re.eval(s), im.eval(s)))
            }
        })
    }

    pub fn build_problem(&self) -> Result<BoundaryProblem> {
        let medium = self.medium()?;
        let surface = self.build_surface()?;
        let data = match &self.incident {
            IncidentSpec::Plane { theta_d } => BoundaryData::Plane(PlaneWave::new(medium, *theta_d)?),
            IncidentSpec::Point { y0 } => BoundaryData::PointSource(Point2::new(y0[0], y0[1])),
        };
        match self.problem {
            ProblemKind::Dirichlet => {
                let eta = self.eta.unwrap_or((self.k_plus * self.k_minus).sqrt());
                BoundaryProblem::dirichlet(medium, surface, eta, data)
            }
            ProblemKind::Impedance => BoundaryProblem::impedance(medium, surface, self.build_beta()?, data),
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.a_pi * PI, self.n)
    }
}

/// Exact value at x where one is known: G(x, y₀) for a point source, the
/// four-wave solution for a plane wave on the flat built-in surface with
/// constant β.
pub fn exact_value(cfg: &RunConfig, x: Point2) -> Result<Option<C64>> {
    let medium = cfg.medium()?;
    match &cfg.incident {
        IncidentSpec::Point { y0 } => {
            let surface = cfg.build_surface()?;
            Ok(Some(point_source_exact(&medium, &surface, Point2::new(y0[0], y0[1]), x)?))
        }
        IncidentSpec::Plane { theta_d } => {
            let flat = matches!(&cfg.surface, SurfaceSpec::Builtin(n) if n == "gamma2");
            let beta = match (&cfg.beta, cfg.problem) {
                (_, ProblemKind::Dirichlet) => Some(C64::new(1.0, 0.0)),
                (BetaSpec::Constant([re, im]), _) => Some(C64::new(*re, *im)),
                _ => None,
            };
            match (flat, beta) {
                (true, Some(b)) => Ok(Some(four_wave_exact(medium, *theta_d, cfg.problem, b, -1.0)?.eval(x).0)),
                _ => Ok(None),
            }
        }
    }
}

/// Round to 15 significant digits.
pub fn round15(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.14e}").parse().unwrap_or(v)
}

#[derive(Debug, Clone, Serialize)]
pub struct PointReport {
    pub x: [f64; 2],
    pub re: f64,
    pub im: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_re: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_im: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timings {
    pub assembly_s: f64,
    pub solve_s: f64,
    pub eval_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config_hash: String,
    pub problem: ProblemKind,
    #[serde(rename = "N")]
    pub n: usize,
    pub a: f64,
    pub nodes: usize,
    pub condition_estimate: f64,
    pub residual_norm: f64,
    pub points: Vec<PointReport>,
    pub timings: Timings,
    pub outputs: Vec<PathBuf>,
}

/// Everything a run produces, before it is written anywhere.
pub struct RunResult {
    pub report: RunReport,
    pub density: DensitySolution,
    pub samples: Vec<FieldSample>,
}

fn point_report(sample: &FieldSample, exact: Option<C64>) -> PointReport {
    let v = sample.total;
    let err = exact.map(|e| (v - e).norm());
    PointReport {
        x: [sample.x.x1, sample.x.x2],
        re: round15(v.re),
        im: round15(v.im),
        exact_re: exact.map(|e| round15(e.re)),
        exact_im: exact.map(|e| round15(e.im)),
        abs_error: err.map(round15),
        rel_error: err.zip(exact).map(|(a, e)| round15(a / e.norm())),
        warning: sample.warning.clone(),
    }
}

/// Solve and evaluate without writing files.
pub fn compute(cfg: &RunConfig) -> Result<RunResult> {
    cfg.validate()?;
    let problem = cfg.build_problem()?;
    let grid = cfg.grid()?;
    let t0 = Instant::now();
    let system = assemble(&problem, &grid)?;
    let t1 = Instant::now();
    let density = solve(&system)?;
    drop(system);
    let t2 = Instant::now();
    let mut samples = Vec::with_capacity(cfg.eval_points.len());
    let mut points = Vec::with_capacity(cfg.eval_points.len());
    for x in &cfg.eval_points {
        let x = Point2::new(x[0], x[1]);
        let s = total_field(&problem, &density, x)?;
        points.push(point_report(&s, exact_value(cfg, x)?));
        samples.push(s);
    }
    let t3 = Instant::now();
    let report = RunReport {
        config_hash: cfg.hash(),
        problem: cfg.problem,
        n: cfg.n,
        a: grid.half_width_a,
        nodes: grid.len(),
        condition_estimate: round15(density.condition_estimate),
        residual_norm: density.residual_norm,
        points,
        timings: Timings {
            assembly_s: (t1 - t0).as_secs_f64(),
            solve_s: (t2 - t1).as_secs_f64(),
            eval_s: (t3 - t2).as_secs_f64(),
        },
        outputs: Vec::new(),
    };
    Ok(RunResult { report, density, samples })
}

fn csv_header(cfg: &RunConfig) -> Vec<String> {
    vec![
        format!("config-sha256 {}", cfg.hash()),
        format!("config {}", serde_json::to_string(cfg).expect("config serializes")),
    ]
}

/// Solve, evaluate and write the requested CSV files.
pub fn run(cfg: &RunConfig) -> Result<RunReport> {
    let mut res = compute(cfg)?;
    if let Some(dir) = &cfg.output.dir {
        std::fs::create_dir_all(dir)?;
        let header = csv_header(cfg);
        if cfg.output.density {
            let p = dir.join("density.csv");
            res.density.write_csv(&p, &header)?;
            res.report.outputs.push(p);
        }
        if cfg.output.field && !res.samples.is_empty() {
            let p = dir.join("field.csv");
            write_field_csv(&p, &header, &res.samples)?;
            res.report.outputs.push(p);
        }
    }
    Ok(res.report)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub point: usize,
    pub x: [f64; 2],
    pub re: f64,
    pub im: f64,
    pub abs_error: Option<f64>,
    pub rel_error: Option<f64>,
    /// |u_N − u_{N_prev}| for the previous N of the sweep.
    pub diff_prev: Option<f64>,
}

/// One row per (N, evaluation point).
pub fn convergence_sweep(cfg: &RunConfig, n_list: &[usize]) -> Result<Vec<SweepRow>> {
    if n_list.is_empty() {
        return Err(field_err("N list", "is empty"));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(field_err("N list", "must be strictly ascending"));
    }
    let mut rows = Vec::new();
    let mut prev: Option<Vec<C64>> = None;
    for &n in n_list {
        let mut c = cfg.clone();
        c.n = n;
        let res = compute(&c)?;
        let vals: Vec<C64> = res.samples.iter().map(|s| s.total).collect();
        for (i, (p, v)) in res.report.points.iter().zip(&vals).enumerate() {
            rows.push(SweepRow {
                n,
                point: i,
                x: p.x,
                re: p.re,
                im: p.im,
                abs_error: p.abs_error,
                rel_error: p.rel_error,
                diff_prev: prev.as_ref().map(|pv| round15((v - pv[i]).norm())),
            });
        }
        prev = Some(vals);
    }
    Ok(rows)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

pub fn write_sweep_csv(w: &mut dyn Write, cfg: &RunConfig, rows: &[SweepRow]) -> Result<()> {
    for h in csv_header(cfg) {
        writeln!(w, "# {h}")?;
    }
    writeln!(w, "N,point,x1,x2,re,im,abs_error,rel_error,diff_prev")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{:e},{:e},{},{},{}",
            r.n,
            r.point,
            r.x[0],
            r.x[1],
            r.re,
            r.im,
            opt(r.abs_error),
            opt(r.rel_error),
            opt(r.diff_prev)
        )?;
    }
    Ok(())
}

/// Rectangular grid "x1min:x1max:n1,x2min:x2max:n2".
pub fn parse_grid(spec: &str) -> Result<Vec<Point2>> {
    let axis = |s: &str| -> Result<Vec<f64>> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(field_err("grid", format!("expected min:max:count, got '{s}'")));
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| field_err("grid", format!("bad number '{}'", parts[0])))?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| field_err("grid", format!("bad number '{}'", parts[1])))?;
        let n: usize = parts[2].trim().parse().map_err(|_| field_err("grid", format!("bad count '{}'", parts[2])))?;
        if n == 0 || !lo.is_finite() || !hi.is_finite() {
            return Err(field_err("grid", format!("invalid axis '{s}'")));
        }
        Ok((0..n).map(|i| if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect())
    };
    let (a, b) = spec.split_once(',').ok_or_else(|| field_err("grid", "expected two comma-separated axes"))?;
    let (xs, ys) = (axis(a)?, axis(b)?);
    Ok(ys.iter().flat_map(|&y| xs.iter().map(move |&x| Point2::new(x, y))).collect())
}

/// G(x, y) on a grid of x for a fixed source y; points where G is not
/// defined are reported with NaN.
pub fn greens_table(cfg: &RunConfig, source: Point2, points: &[Point2], w: &mut dyn Write) -> Result<()> {
    let medium = cfg.medium()?;
    for h in csv_header(cfg) {
        writeln!(w, "# {h}")?;
    }
    writeln!(w, "# source {},{}", source.x1, source.x2)?;
    writeln!(w, "x1,x2,re,im")?;
    for x in points {
        let g = green(&medium, *x, source).unwrap_or(C64::new(f64::NAN, f64::NAN));
        writeln!(w, "{:.17e},{:.17e},{:.17e},{:.17e}", x.x1, x.x2, g.re, g.im)?;
    }
    Ok(())
}

pub const PRESET_NAMES: [&str; 6] =
    ["example1-dbvp", "example1-ibvp", "example2-dbvp", "example2-ibvp", "example3-dbvp", "example3-ibvp"];

/// Built-in experiment configurations.
pub fn preset(name: &str) -> Result<RunConfig> {
    let (example, kind) = name
        .rsplit_once('-')
        .ok_or_else(|| Error::Config(format!("unknown preset '{name}'")))?;
    let problem = match kind {
        "dbvp" => ProblemKind::Dirichlet,
        "ibvp" => ProblemKind::Impedance,
        _ => return Err(Error::Config(format!("unknown preset '{name}'"))),
    };
    let (k_plus, k_minus, surface, incident, x) = match example {
        "example1" => (2.7, 3.5, "gamma1", IncidentSpec::Point { y0: [1.0, -1.3] }, [0.6, 0.56]),
        "example2" => (2.7, 3.5, "gamma2", IncidentSpec::Plane { theta_d: 4.0 * PI / 3.0 }, [1.0, -0.2]),
        "example3" => (3.0, 4.0, "gamma3", IncidentSpec::Plane { theta_d: 17.0 * PI / 12.0 }, [1.0, 0.3]),
        _ => {
            return Err(Error::Config(format!(
                "unknown preset '{name}' (expected one of {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(RunConfig {
        problem,
        k_plus,
        k_minus,
        surface: SurfaceSpec::Builtin(surface.into()),
        incident,
        beta: default_beta(),
        eta: None,
        n: default_n(),
        a_pi: default_a_pi(),
        eval_points: vec![x],
        output: OutputSpec::default(),
    })
}

/// Process exit code for an error: 2 for configuration problems, 3 for
/// numerical failures.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::InvalidSurface(_) | Error::Io(_) => 2,
        _ => 3,
    }
}
