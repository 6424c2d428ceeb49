//! Fields from a solved density, and closed-form reference solutions.

use std::io::Write;
use std::path::Path;

use nalgebra::{Matrix4, Vector4};

use crate::bie::{BoundaryData, BoundaryProblem, ProblemKind};
use crate::error::{Error, Result};
use crate::green::{green, green_full, MediumPair, PlaneWave, Point2};
use crate::nystrom::DensitySolution;
use crate::specfun::C64;
use crate::surface::SurfaceProfile;

const I: C64 = C64 { re: 0.0, im: 1.0 };
/// Points closer than this to Γ are rejected.
pub const MIN_DISTANCE: f64 = 1e-6;
/// Points closer than this to Γ are evaluated but tagged.
pub const WARN_DISTANCE: f64 = 1e-2;

/// Distance from x to Γ, by sampling near x₁ and refining.
pub fn distance_to_surface(surface: &SurfaceProfile, x: Point2) -> f64 {
    let d = |s: f64| x.dist(&surface.point(s));
    let reach = (x.x2 - surface.height(x.x1)).abs() + 1.0;
    let n = 400;
    let (mut best_s, mut best) = (x.x1, d(x.x1));
    for i in 0..=n {
        let s = x.x1 - reach + 2.0 * reach * i as f64 / n as f64;
        let v = d(s);
        if v < best {
            best = v;
            best_s = s;
        }
    }
    let (mut a, mut b) = (best_s - 2.0 * reach / n as f64, best_s + 2.0 * reach / n as f64);
    for _ in 0..100 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if d(m1) < d(m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    best.min(d(0.5 * (a + b)))
}

fn check_point(p: &BoundaryProblem, x: Point2) -> Result<Option<String>> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("evaluation point {x:?} is not finite")));
    }
    if !(x.x2 > p.surface.height(x.x1)) {
        return Err(Error::Domain(format!("evaluation point {x:?} is not above the surface")));
    }
    let dist = distance_to_surface(&p.surface, x);
    if dist < MIN_DISTANCE {
        return Err(Error::Singularity(format!(
            "evaluation point {x:?} is {dist:.2e} from the surface; the plain node sum is not accurate there"
        )));
    }
    Ok((dist < WARN_DISTANCE).then(|| format!("near-surface ({dist:.1e})")))
}

fn check_solution(sol: &DensitySolution, kind: ProblemKind) -> Result<()> {
    if sol.problem_kind != kind || sol.values.len() != sol.grid.len() {
        return Err(Error::Config("density does not belong to this problem".into()));
    }
    Ok(())
}

fn layer_sum(p: &BoundaryProblem, sol: &DensitySolution, x: Point2) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for (&t, &psi) in sol.grid.nodes.iter().zip(&sol.values) {
        if psi == C64::new(0.0, 0.0) {
            continue;
        }
        let y = p.surface.point(t);
        let df = p.surface.slope(t);
        let sp = df.hypot(1.0);
        let term = match p.kind {
            ProblemKind::Dirichlet => {
                let v = green_full(&p.medium, x, y)?;
                v.grad_y[0] * df - v.grad_y[1] + I * p.eta * v.g * sp
            }
            ProblemKind::Impedance => green(&p.medium, x, y)? * sp,
        };
        acc += term * psi;
    }
    Ok(acc * sol.grid.h)
}

/// Combined-layer potential ∫[∂G/∂ν(y) + iηG]ψ ds(y) by the node rule.
pub fn eval_scattered_dbvp(sol: &DensitySolution, p: &BoundaryProblem, x: Point2) -> Result<C64> {
    check_solution(sol, ProblemKind::Dirichlet)?;
    check_point(p, x)?;
    layer_sum(p, sol, x)
}

/// Single-layer potential ∫Gψ ds(y) by the node rule.
pub fn eval_scattered_ibvp(sol: &DensitySolution, p: &BoundaryProblem, x: Point2) -> Result<C64> {
    check_solution(sol, ProblemKind::Impedance)?;
    check_point(p, x)?;
    layer_sum(p, sol, x)
}

pub fn eval_scattered(sol: &DensitySolution, p: &BoundaryProblem, x: Point2) -> Result<C64> {
    match p.kind {
        ProblemKind::Dirichlet => eval_scattered_dbvp(sol, p, x),
        ProblemKind::Impedance => eval_scattered_ibvp(sol, p, x),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    /// x₂ > 0
    Upper,
    /// f(x₁) < x₂ ≤ 0
    Lower,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct FieldSample {
    pub x: Point2,
    pub incident: C64,
    pub scattered: C64,
    pub total: C64,
    pub region: Region,
    pub warning: Option<String>,
}

/// u⁰ + u^s at x. For point-source and custom data there is no incident
/// field and the total equals the scattered field.
pub fn total_field(p: &BoundaryProblem, sol: &DensitySolution, x: Point2) -> Result<FieldSample> {
    check_solution(sol, p.kind)?;
    let warning = check_point(p, x)?;
    let scattered = layer_sum(p, sol, x)?;
    let incident = match &p.data {
        BoundaryData::Plane(pw) => pw.eval(x).0,
        _ => C64::new(0.0, 0.0),
    };
    Ok(FieldSample {
        x,
        incident,
        scattered,
        total: incident + scattered,
        region: if x.x2 > 0.0 { Region::Upper } else { Region::Lower },
        warning,
    })
}

/// Exact scattered field G(x, y₀) for point-source data; y₀ must lie below Γ.
pub fn point_source_exact(medium: &MediumPair, surface: &SurfaceProfile, y0: Point2, x: Point2) -> Result<C64> {
    if !(y0.x2 < surface.height(y0.x1)) {
        return Err(Error::Config(format!("source {y0:?} is not below the surface")));
    }
    green(medium, x, y0)
}

/// Flat-boundary solution
///   x₂ > 0:          e^{ik₊x·d} + B e^{ik₊x·dʳ}
///   h < x₂ ≤ 0:      C e^{ik₋x·dᵗ} + D e^{ik₋x·dⁿ}
/// with dⁿ the mirror image of dᵗ, for a Dirichlet or constant-impedance
/// plane at x₂ = h.
#[derive(Debug, Clone, Copy)]
pub struct FourWaveSolution {
    pub medium: MediumPair,
    pub theta_d: f64,
    pub kind: ProblemKind,
    pub beta0: C64,
    pub plane_height: f64,
    pub a_c: C64,
    pub b_c: C64,
    pub c_c: C64,
    pub d_c: C64,
    pub d: [C64; 2],
    pub d_r: [C64; 2],
    pub d_t: [C64; 2],
    pub d_n: [C64; 2],
    /// Largest residual of the four conditions relative to the incident
    /// amplitude.
    pub residual: f64,
}

impl FourWaveSolution {
    /// u and ∇u at x (x₂ > h).
    pub fn eval(&self, x: Point2) -> (C64, [C64; 2]) {
        let wave = |amp: C64, k: f64, d: [C64; 2]| {
            let u = amp * (I * k * (x.x1 * d[0] + x.x2 * d[1])).exp();
            (u, [I * k * d[0] * u, I * k * d[1] * u])
        };
        let (kp, km) = (self.medium.k_plus, self.medium.k_minus);
        let (w1, w2) = if x.x2 > 0.0 {
            (wave(self.a_c, kp, self.d), wave(self.b_c, kp, self.d_r))
        } else {
            (wave(self.c_c, km, self.d_t), wave(self.d_c, km, self.d_n))
        };
        (w1.0 + w2.0, [w1.1[0] + w2.1[0], w1.1[1] + w2.1[1]])
    }

    /// Residuals of the interface and plane conditions at x₁.
    pub fn condition_residuals(&self, x1: f64) -> [C64; 4] {
        let up = self.eval(Point2::new(x1, f64::MIN_POSITIVE));
        let down = self.eval(Point2::new(x1, 0.0));
        let (u, g) = self.eval(Point2::new(x1, self.plane_height));
        let surf = match self.kind {
            ProblemKind::Dirichlet => u,
            ProblemKind::Impedance => -g[1] - I * self.medium.k_minus * self.beta0 * u,
        };
        [up.0 - down.0, (up.1[1] - down.1[1]) / self.medium.k_plus, surf, C64::new(0.0, 0.0)]
    }
}

pub fn four_wave_exact(
    medium: MediumPair,
    theta_d: f64,
    kind: ProblemKind,
    beta0: C64,
    plane_height: f64,
) -> Result<FourWaveSolution> {
    if !(plane_height < 0.0) {
        return Err(Error::Config(format!("plane height must be negative, got {plane_height}")));
    }
    if kind == ProblemKind::Impedance && !(beta0.re > 0.0) {
        return Err(Error::Config(format!("impedance needs Re(beta) > 0, got {beta0}")));
    }
    let pw = PlaneWave::new(medium, theta_d)?;
    let (kp, km) = (medium.k_plus, medium.k_minus);
    let (s, c) = theta_d.sin_cos();
    // below the interface the waves are e^{ik₊c x₁ ± σx₂} with σ = k₊S
    let sigma = kp * pw.s_t;
    let h = plane_height;
    let (ep, em) = ((sigma * h).exp(), (-sigma * h).exp());
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let iks = I * kp * s;
    let plane_row = match kind {
        ProblemKind::Dirichlet => [zero, zero, ep, em],
        ProblemKind::Impedance => {
            let ikb = I * km * beta0;
            [zero, zero, (-sigma - ikb) * ep, (sigma - ikb) * em]
        }
    };
    // unknowns (A, B, C, D)
    #[rustfmt::skip]
    let mat = Matrix4::new(
        one, zero, zero, zero,
        one, one, -one, -one,
        iks, -iks, -sigma, sigma,
        plane_row[0], plane_row[1], plane_row[2], plane_row[3],
    );
    let rhs = Vector4::new(one, zero, zero, zero);
    let lu = mat.lu();
    let sol = lu
        .solve(&rhs)
        .filter(|v| v.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
        .ok_or_else(|| Error::DegenerateIncidence(format!("flat-boundary system is singular at theta_d={theta_d}")))?;
    let pivot = lu.u().diagonal().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if pivot < 1e-13 * mat.iter().map(|z| z.norm()).fold(0.0, f64::max) {
        return Err(Error::DegenerateIncidence(format!("flat-boundary system is nearly singular at theta_d={theta_d}")));
    }
    let n = medium.n;
    let d_t = [C64::new(c / n, 0.0), -I * pw.s_t / n];
    let mut out = FourWaveSolution {
        medium,
        theta_d,
        kind,
        beta0,
        plane_height,
        a_c: sol[0],
        b_c: sol[1],
        c_c: sol[2],
        d_c: sol[3],
        d: [C64::new(c, 0.0), C64::new(s, 0.0)],
        d_r: [C64::new(c, 0.0), C64::new(-s, 0.0)],
        d_t,
        d_n: [d_t[0], -d_t[1]],
        residual: 0.0,
    };
    let scale = 1.0 + sol.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for x1 in [-7.3, -2.0, -0.4, 0.0, 0.9, 1.7, 3.1, 5.0, 8.8, 12.5] {
        for r in out.condition_residuals(x1) {
            worst = worst.max(r.norm() / scale);
        }
    }
    out.residual = worst;
    if worst > 1e-12 {
        return Err(Error::Accuracy { estimate: worst, context: "flat-boundary conditions not satisfied".into() });
    }
    Ok(out)
}

/// CSV with columns x1, x2, re, im, tag.
pub fn write_field_csv(path: &Path, header: &[String], samples: &[FieldSample]) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    for h in header {
        writeln!(w, "# {h}")?;
    }
    writeln!(w, "x1,x2,re,im,tag")?;
    for s in samples {
        let tag = match (&s.warning, s.region) {
            (Some(_), _) => "near-surface",
            (None, Region::Upper) => "upper",
            (None, Region::Lower) => "lower",
        };
        writeln!(w, "{:.17e},{:.17e},{:.17e},{:.17e},{tag}", s.x.x1, s.x.x2, s.total.re, s.total.im)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn four_wave_table_values() {
        let x = Point2::new(1.0, -0.2);
        let th = 4.0 * PI / 3.0;
        let cases = [
            (2.7, 3.5, ProblemKind::Dirichlet, C64::new(0.737691867188743, 0.215552888696214)),
            (2.7, 3.5, ProblemKind::Impedance, C64::new(0.643898669829883, -0.508543039062194)),
            (3.5, 2.7, ProblemKind::Dirichlet, C64::new(0.347332742418633, -2.094506667524657)),
            (3.5, 2.7, ProblemKind::Impedance, C64::new(0.301680817549291, -1.296995588516340)),
        ];
        for (kp, km, kind, want) in cases {
            let m = MediumPair::new(kp, km).unwrap();
            let fw = four_wave_exact(m, th, kind, C64::new(1.0, 0.0), -1.0).unwrap();
            let got = fw.eval(x).0;
            assert!((got - want).norm() < 1e-9, "{kp} {km} {kind:?}: {got}");
        }
    }

    #[test]
    fn four_wave_residual_and_normalization() {
        let m = MediumPair::new(2.7, 3.5).unwrap();
        let fw = four_wave_exact(m, 4.0 * PI / 3.0, ProblemKind::Dirichlet, C64::new(1.0, 0.0), -1.0).unwrap();
        assert!(fw.residual < 1e-12);
        assert_eq!(fw.a_c, C64::new(1.0, 0.0));
    }
}
