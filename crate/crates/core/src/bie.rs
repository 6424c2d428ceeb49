//! Boundary integral kernels for the Dirichlet and impedance problems and
//! their splitting into a periodic-logarithm part and a smooth part.
//!
//! Both problems are written as ψ − ∫K(s,t)ψ(t)dt = rhs with
//!   Dirichlet: K = 2[∂G/∂ν(y) + iηG]·|x′(t)|,           rhs = −2g̃,
//!   impedance: K = −2[∂G/∂ν(x) − ik₋β̃(s)G]·|x′(t)|,     rhs = +2g̃,
//! where x = (s, f(s)), y = (t, f(t)). Each kernel is split as
//! K = a(s,t) ln|s−t| + b(s,t) with a, b smooth, and then rewritten as
//! K = (1/2π)A ln(4 sin²((s−t)/2)) + B with A = π·a·χ(s−t).

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::green::{green_full, remainder, MediumPair, PlaneWave, Point2, RemainderValue};
use crate::specfun::{bessel01, EULER_GAMMA, C64};
use crate::surface::SurfaceProfile;

const I: C64 = C64 { re: 0.0, im: 1.0 };

pub type ComplexFn = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Dirichlet,
    Impedance,
}

/// Where the boundary data come from.
#[derive(Clone)]
pub enum BoundaryData {
    /// Plane wave incident from above at angle θ_d; g is built from the
    /// reference field u⁰.
    Plane(PlaneWave),
    /// Manufactured solution whose scattered field is G(·, y₀) for a source
    /// y₀ below Γ.
    PointSource(Point2),
    /// Given data g̃(s).
    Custom(ComplexFn),
}

impl std::fmt::Debug for BoundaryData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryData::Plane(p) => write!(f, "Plane(theta_d={})", p.theta_d),
            BoundaryData::PointSource(y) => write!(f, "PointSource({y:?})"),
            BoundaryData::Custom(_) => write!(f, "Custom"),
        }
    }
}

#[derive(Clone)]
pub struct BoundaryProblem {
    pub kind: ProblemKind,
    pub medium: MediumPair,
    pub surface: SurfaceProfile,
    /// Coupling parameter of the combined potential (Dirichlet only).
    pub eta: f64,
    /// Impedance function β̃(s) (impedance only).
    pub beta: ComplexFn,
    pub data: BoundaryData,
}

impl std::fmt::Debug for BoundaryProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BoundaryProblem")
            .field("kind", &self.kind)
            .field("medium", &self.medium)
            .field("surface", &self.surface)
            .field("eta", &self.eta)
            .field("data", &self.data)
            .finish()
    }
}

impl BoundaryProblem {
    pub fn dirichlet(medium: MediumPair, surface: SurfaceProfile, eta: f64, data: BoundaryData) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::Config(format!("eta must be positive, got {eta}")));
        }
        let p = BoundaryProblem {
            kind: ProblemKind::Dirichlet,
            medium,
            surface,
            eta,
            beta: Arc::new(|_| C64::new(0.0, 0.0)),
            data,
        };
        p.check_data()?;
        Ok(p)
    }

    pub fn impedance(medium: MediumPair, surface: SurfaceProfile, beta: ComplexFn, data: BoundaryData) -> Result<Self> {
        let mut d = f64::INFINITY;
        for i in 0..=4000 {
            let s = -100.0 + 0.05 * i as f64;
            let b = beta(s);
            if !(b.re.is_finite() && b.im.is_finite()) {
                return Err(Error::Config(format!("beta is not finite at s={s}")));
            }
            d = d.min(b.re);
        }
        if !(d > 0.0) {
            return Err(Error::Config(format!("Re(beta) must be bounded below by a positive constant (min sampled {d})")));
        }
        let p = BoundaryProblem { kind: ProblemKind::Impedance, medium, surface, eta: 0.0, beta, data };
        p.check_data()?;
        Ok(p)
    }

    fn check_data(&self) -> Result<()> {
        if let BoundaryData::PointSource(y0) = self.data {
            if !(y0.x2 < self.surface.height(y0.x1)) {
                return Err(Error::Config(format!("point source {y0:?} must lie strictly below the surface")));
            }
        }
        Ok(())
    }

    /// Boundary data g̃(s).
    pub fn data_g(&self, s: f64) -> Result<C64> {
        let x = self.surface.point(s);
        let (n1, n2) = self.surface.normal(s);
        let km = self.medium.k_minus;
        match (&self.data, self.kind) {
            (BoundaryData::Custom(g), _) => Ok(g(s)),
            (BoundaryData::Plane(pw), ProblemKind::Dirichlet) => Ok(-pw.eval(x).0),
            (BoundaryData::Plane(pw), ProblemKind::Impedance) => {
                let (u, g) = pw.eval(x);
                let dn = g[0] * n1 + g[1] * n2;
                Ok(-dn + I * km * (self.beta)(s) * u)
            }
            (BoundaryData::PointSource(y0), ProblemKind::Dirichlet) => Ok(green_full(&self.medium, x, *y0)?.g),
            (BoundaryData::PointSource(y0), ProblemKind::Impedance) => {
                let v = green_full(&self.medium, x, *y0)?;
                let dn = v.grad_x[0] * n1 + v.grad_x[1] * n2;
                Ok(dn - I * km * (self.beta)(s) * v.g)
            }
        }
    }

    /// Right-hand side of the second-kind equation at s.
    pub fn rhs(&self, s: f64) -> Result<C64> {
        let g = self.data_g(s)?;
        Ok(match self.kind {
            ProblemKind::Dirichlet => -2.0 * g,
            ProblemKind::Impedance => 2.0 * g,
        })
    }
}

pub fn rhs_dbvp(p: &BoundaryProblem, s: f64) -> Result<C64> {
    if p.kind != ProblemKind::Dirichlet {
        return Err(Error::Config("rhs_dbvp called on an impedance problem".into()));
    }
    p.rhs(s)
}

pub fn rhs_ibvp(p: &BoundaryProblem, s: f64) -> Result<C64> {
    if p.kind != ProblemKind::Impedance {
        return Err(Error::Config("rhs_ibvp called on a Dirichlet problem".into()));
    }
    p.rhs(s)
}

/// Smooth cutoff: 1 on |s| ≤ 1, 0 on |s| ≥ π, even.
pub fn cutoff_chi(s: f64) -> f64 {
    let u = (PI - s.abs()) / (PI - 1.0);
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let phi = |u: f64| if u > 0.0 { (-1.0 / u).exp() } else { 0.0 };
    let a = phi(u);
    a / (a + phi(1.0 - u))
}

/// Surface data at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeGeom {
    pub s: f64,
    pub f: f64,
    pub df: f64,
    pub d2f: f64,
    pub speed: f64,
    pub beta: C64,
}

impl NodeGeom {
    pub fn new(p: &BoundaryProblem, s: f64) -> Self {
        let df = p.surface.slope(s);
        NodeGeom {
            s,
            f: p.surface.height(s),
            df,
            d2f: p.surface.curvature_term(s),
            speed: df.hypot(1.0),
            beta: (p.beta)(s),
        }
    }
}

/// Logarithmic coefficient a(s,t) and smooth part b(s,t) of the kernel, given
/// the Green remainder R and its derivatives at Δ = s − t, v = f(s) + f(t).
pub fn log_split(p: &BoundaryProblem, x: &NodeGeom, y: &NodeGeom, rem: &RemainderValue) -> (C64, C64) {
    let k = p.medium.k_minus;
    let d = x.s - y.s;
    if d == 0.0 {
        return diagonal_split(p, x, rem);
    }
    let m = mean_slope(p, x, y);
    let r = d.abs() * m.hypot(1.0);
    let bes = bessel01(k * r);
    let ln_d = d.abs().ln();
    match p.kind {
        ProblemKind::Dirichlet => {
            let n_y = (y.s - x.s) * (y.df - m);
            let l_phi = -0.5 * I * k * bes.h1() * (n_y / r);
            let l1 = k / PI * bes.j1 * n_y / r;
            let l3 = 2.0 * (-rem.r_delta * y.df - rem.r_v);
            let m_phi = 0.5 * I * bes.h0() * y.speed;
            let m1 = -bes.j0 / PI * y.speed;
            let m3 = 2.0 * rem.r * y.speed;
            let a = l1 + I * p.eta * m1;
            let b = (l_phi - l1 * ln_d + l3) + I * p.eta * (m_phi - m1 * ln_d + m3);
            (a, b)
        }
        ProblemKind::Impedance => {
            let n_x = (x.s - y.s) * (x.df - m);
            let ratio = y.speed / x.speed;
            let l_phi = 0.5 * I * k * bes.h1() * (n_x / r * ratio);
            let l1 = -k / PI * bes.j1 * n_x / r * ratio;
            let l3 = -2.0 * (rem.r_delta * x.df - rem.r_v) * ratio;
            let ikb = I * k * x.beta;
            let m_phi = -0.5 * k * x.beta * bes.h0() * y.speed;
            let m1 = -ikb / PI * bes.j0 * y.speed;
            let m3 = 2.0 * ikb * rem.r * y.speed;
            let a = l1 + m1;
            let b = (l_phi - l1 * ln_d + l3) + (m_phi - m1 * ln_d + m3);
            (a, b)
        }
    }
}

/// (f(s) − f(t))/(s − t); close to the diagonal it is averaged from f′ so
/// that the normal projections keep their relative accuracy.
fn mean_slope(p: &BoundaryProblem, x: &NodeGeom, y: &NodeGeom) -> f64 {
    let d = x.s - y.s;
    if d.abs() >= 1e-2 {
        return (x.f - y.f) / d;
    }
    const NODES: [f64; 4] = [-0.861_136_311_594_052_6, -0.339_981_043_584_856_3, 0.339_981_043_584_856_3, 0.861_136_311_594_052_6];
    const WEIGHTS: [f64; 4] = [0.347_854_845_137_453_9, 0.652_145_154_862_546_1, 0.652_145_154_862_546_1, 0.347_854_845_137_453_9];
    let c = 0.5 * (x.s + y.s);
    NODES.iter().zip(WEIGHTS).map(|(u, w)| 0.5 * w * p.surface.slope(c + 0.5 * d * u)).sum()
}

fn diagonal_split(p: &BoundaryProblem, x: &NodeGeom, rem: &RemainderValue) -> (C64, C64) {
    let k = p.medium.k_minus;
    let sp = x.speed;
    let curv = x.d2f / (2.0 * PI * sp * sp);
    let log_term = ((0.5 * k) * sp).ln();
    match p.kind {
        ProblemKind::Dirichlet => {
            let l2 = C64::new(-curv, 0.0);
            let l3 = 2.0 * (-rem.r_delta * x.df - rem.r_v);
            let m2 = (0.5 * I - (EULER_GAMMA + log_term) / PI) * sp;
            let m3 = 2.0 * rem.r * sp;
            let a = I * p.eta * (-sp / PI);
            (a, (l2 + l3) + I * p.eta * (m2 + m3))
        }
        ProblemKind::Impedance => {
            let ikb = I * k * x.beta;
            let l2 = C64::new(curv, 0.0);
            let l3 = -2.0 * (rem.r_delta * x.df - rem.r_v);
            let m2 = 2.0 * ikb * (0.25 * I - (log_term + EULER_GAMMA) / (2.0 * PI)) * sp;
            let m3 = 2.0 * ikb * rem.r * sp;
            let a = -ikb / PI * sp;
            (a, l2 + l3 + m2 + m3)
        }
    }
}

/// Periodic-log coefficients (A, B) from the log split (a, b).
pub fn periodic_split(d: f64, a: C64, b: C64) -> (C64, C64) {
    let chi = cutoff_chi(d);
    if d == 0.0 {
        return (PI * a, b);
    }
    let ad = d.abs();
    let mut bb = b + a * ad.ln() * (1.0 - chi);
    if chi > 0.0 {
        let h = 0.5 * ad;
        bb -= a * chi * (h.sin() / h).ln();
    }
    (PI * a * chi, bb)
}

/// Both coefficients at one (s, t), remainder evaluated by contour
/// quadrature.
pub fn split_entry(p: &BoundaryProblem, s: f64, t: f64) -> Result<(C64, C64)> {
    let x = NodeGeom::new(p, s);
    let y = NodeGeom::new(p, t);
    let rem = remainder(&p.medium, s - t, x.f + y.f)?;
    let (a, b) = log_split(p, &x, &y, &rem);
    Ok(periodic_split(s - t, a, b))
}

/// K(s,t) = (1/2π)A(s,t) ln(4 sin²((s−t)/2)) + B(s,t), with A supported in
/// |s − t| < π.
#[derive(Debug, Clone)]
pub struct KernelSplit {
    pub problem: BoundaryProblem,
    pub support_radius: f64,
}

impl KernelSplit {
    pub fn a(&self, s: f64, t: f64) -> Result<C64> {
        Ok(split_entry(&self.problem, s, t)?.0)
    }

    pub fn b(&self, s: f64, t: f64) -> Result<C64> {
        Ok(split_entry(&self.problem, s, t)?.1)
    }

    pub fn ab(&self, s: f64, t: f64) -> Result<(C64, C64)> {
        split_entry(&self.problem, s, t)
    }

    /// Kernel value rebuilt from the split (s ≠ t).
    pub fn reconstruct(&self, s: f64, t: f64) -> Result<C64> {
        let (a, b) = self.ab(s, t)?;
        let d = s - t;
        if a == C64::new(0.0, 0.0) {
            return Ok(b);
        }
        let sn = (0.5 * d).sin();
        Ok(a * (4.0 * sn * sn).ln() / (2.0 * PI) + b)
    }
}

pub fn split_dbvp(p: &BoundaryProblem) -> Result<KernelSplit> {
    if p.kind != ProblemKind::Dirichlet {
        return Err(Error::Config("split_dbvp needs a Dirichlet problem".into()));
    }
    Ok(KernelSplit { problem: p.clone(), support_radius: PI })
}

pub fn split_ibvp(p: &BoundaryProblem) -> Result<KernelSplit> {
    if p.kind != ProblemKind::Impedance {
        return Err(Error::Config("split_ibvp needs an impedance problem".into()));
    }
    Ok(KernelSplit { problem: p.clone(), support_radius: PI })
}

fn raw_points(p: &BoundaryProblem, s: f64, t: f64) -> Result<(Point2, Point2)> {
    if s == t {
        return Err(Error::Singularity(format!("kernel at s = t = {s}")));
    }
    Ok((p.surface.point(s), p.surface.point(t)))
}

/// Dirichlet kernel 2[∂G/∂ν(y) + iηG]·|x′(t)| straight from the Green
/// function.
pub fn kernel_dbvp_raw(p: &BoundaryProblem, s: f64, t: f64) -> Result<C64> {
    let (x, y) = raw_points(p, s, t)?;
    let v = green_full(&p.medium, x, y)?;
    let dft = p.surface.slope(t);
    // ∇_y G·ν(y)·|x′(t)| = ∇_y G·(f′(t), −1)
    let dn = v.grad_y[0] * dft - v.grad_y[1];
    Ok(2.0 * (dn + I * p.eta * v.g * dft.hypot(1.0)))
}

/// Impedance kernel −2[∂G/∂ν(x) − ik₋β̃(s)G]·|x′(t)|, the sign convention of
/// ψ − ∫Kψ = 2g̃.
pub fn kernel_ibvp_raw(p: &BoundaryProblem, s: f64, t: f64) -> Result<C64> {
    let (x, y) = raw_points(p, s, t)?;
    let v = green_full(&p.medium, x, y)?;
    let (n1, n2) = p.surface.normal(s);
    let dn = v.grad_x[0] * n1 + v.grad_x[1] * n2;
    let km = p.medium.k_minus;
    Ok(-2.0 * (dn - I * km * (p.beta)(s) * v.g) * p.surface.speed(t))
}

/// Raw kernel of either problem.
pub fn kernel_raw(p: &BoundaryProblem, s: f64, t: f64) -> Result<C64> {
    match p.kind {
        ProblemKind::Dirichlet => kernel_dbvp_raw(p, s, t),
        ProblemKind::Impedance => kernel_ibvp_raw(p, s, t),
    }
}
