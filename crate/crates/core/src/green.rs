//! Two-layered Green function, its gradients and the plane-wave reference
//! field.
//!
//! G is written as a Fourier integral over the horizontal wavenumber ξ. The
//! integrand is even in ξ, so only the half line ξ ≥ 0 is integrated, along
//! a path that dips below the branch points k₊, k₋ on a half ellipse and
//! then either stays on the real axis or turns vertically into the complex
//! plane, whichever decays faster.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature::adaptive;
use crate::specfun::{bessel01, critical_angle, s_fn, C64};

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Absolute tolerance of the contour quadrature.
const CONTOUR_TOL: f64 = 1e-13;
const MAX_PANELS: usize = 40_000;
/// Exponent at which the tails are cut, e^{-40} ≈ 4e-18.
const TAIL_EXPONENT: f64 = 40.0;
/// Largest phase (radians) an initial panel may span.
const PANEL_PHASE: f64 = 3.0 * PI;

/// Wavenumbers of the upper half-space (x₂ > 0) and of the layer x₂ < 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumPair {
    pub k_plus: f64,
    pub k_minus: f64,
    pub n: f64,
    pub theta_c: f64,
}

impl MediumPair {
    pub fn new(k_plus: f64, k_minus: f64) -> Result<Self> {
        if !(k_plus.is_finite() && k_minus.is_finite() && k_plus > 0.0 && k_minus > 0.0) {
            return domain(format!(
                "wavenumbers must be positive and finite (k+={k_plus}, k-={k_minus})"
            ));
        }
        if k_plus == k_minus {
            return domain("k+ and k- must differ");
        }
        Ok(MediumPair {
            k_plus,
            k_minus,
            n: k_minus / k_plus,
            theta_c: critical_angle(k_plus, k_minus)?,
        })
    }

    pub fn k_min(&self) -> f64 {
        self.k_plus.min(self.k_minus)
    }

    pub fn k_max(&self) -> f64 {
        self.k_plus.max(self.k_minus)
    }

    /// Reflection coefficient 𝓡(θ).
    pub fn fresnel_r(&self, theta: f64) -> Result<C64> {
        let (s, c) = theta.sin_cos();
        let sv = s_fn(C64::new(c, 0.0), self.n);
        let den = I * s - sv;
        if den.norm() < 1e-14 {
            return Err(Error::DegenerateIncidence(format!(
                "reflection coefficient denominator vanishes at theta={theta}"
            )));
        }
        Ok((I * s + sv) / den)
    }

    /// Transmission coefficient 𝓣(θ) = 𝓡(θ) + 1.
    pub fn fresnel_t(&self, theta: f64) -> Result<C64> {
        Ok(self.fresnel_r(theta)? + 1.0)
    }
}

/// A point of the plane; the interface is x₂ = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x1: f64,
    pub x2: f64,
}

impl Point2 {
    pub const fn new(x1: f64, x2: f64) -> Self {
        Point2 { x1, x2 }
    }

    pub fn dist(&self, o: &Point2) -> f64 {
        (self.x1 - o.x1).hypot(self.x2 - o.x2)
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }
}

/// Free-space fundamental solution (i/4)H₀¹(k|x−y|).
pub fn phi_free(k: f64, x: Point2, y: Point2) -> Result<C64> {
    let r = x.dist(&y);
    if r == 0.0 {
        return Err(Error::Singularity("phi_free at coincident points".into()));
    }
    Ok(0.25 * I * bessel01(k * r).h0())
}

/// Φ_k with its x-gradient (the y-gradient is its negative).
fn phi_with_grad(k: f64, x: Point2, y: Point2) -> (C64, [C64; 2]) {
    let d1 = x.x1 - y.x1;
    let d2 = x.x2 - y.x2;
    let r = d1.hypot(d2);
    let b = bessel01(k * r);
    let g = -0.25 * I * k * b.h1() / r;
    (0.25 * I * b.h0(), [g * d1, g * d2])
}

/// G with both gradients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenValue {
    pub g: C64,
    pub grad_x: [C64; 2],
    pub grad_y: [C64; 2],
}

/// Smooth part R = G − Φ_{k₋} for two points below the interface, as a
/// function of Δ = x₁ − y₁ and v = x₂ + y₂, with its partial derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemainderValue {
    pub r: C64,
    pub r_delta: C64,
    pub r_v: C64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Case {
    BothAbove,
    XAbove,
    YAbove,
    BothBelow,
}

/// Integrand data for one quadrant: amplitude choice and the depths that
/// multiply S(ξ,k₊) and S(ξ,k₋) in the exponent.
#[derive(Clone, Copy)]
struct Spectral {
    case: Case,
    kp: f64,
    km: f64,
    a_plus: f64,
    a_minus: f64,
}

impl Spectral {
    /// Returns (amplitude·exponential, S₊, S₋).
    #[inline]
    fn eval(&self, xi: C64) -> (C64, C64, C64) {
        let sp = s_fn(xi, self.kp);
        let sm = s_fn(xi, self.km);
        let sum = sp + sm;
        let amp = match self.case {
            Case::BothAbove => (sp - sm) / (2.0 * sum * sp),
            Case::BothBelow => (sm - sp) / (2.0 * sum * sm),
            _ => 1.0 / sum,
        };
        let mut e = ZERO;
        if self.a_plus != 0.0 {
            e -= sp * self.a_plus;
        }
        if self.a_minus != 0.0 {
            e -= sm * self.a_minus;
        }
        (amp * e.exp(), sp, sm)
    }

    fn depth(&self) -> f64 {
        self.a_plus + self.a_minus
    }
}

/// (1/π)∫₀^∞ b(ξ)·[cos ξΔ, −ξ sin ξΔ, −S₊ cos ξΔ, −S₋ cos ξΔ] dξ along the
/// deformed path, where b is the amplitude times exponential.
fn spectral_integrals(sp: &Spectral, delta: f64) -> Result<[C64; 4]> {
    let kl = sp.kp.min(sp.km);
    let kh = sp.kp.max(sp.km);
    let c = 0.5 * (kl + kh);
    let ah = (0.4 * kh).max(0.5 * (kh - kl) + 0.25 * kl);
    let ad = delta.abs();
    let sgn = if delta < 0.0 { -1.0 } else { 1.0 };
    let bv = if ad > 0.0 { (0.2 * kl).min(1.5 / ad) } else { 0.2 * kl };
    let depth = sp.depth();

    let mut out = [ZERO; 4];

    // Real segment [0, c − ah].
    let x0 = c - ah;
    let n0 = ((x0 * ad / PANEL_PHASE).ceil() as usize).max(1);
    let breaks: Vec<f64> = (0..=n0).map(|i| x0 * i as f64 / n0 as f64).collect();
    let mut f = |u: f64| {
        let xi = C64::new(u, 0.0);
        let (b, s_p, s_m) = sp.eval(xi);
        let (sn, cs) = (u * delta).sin_cos();
        [b * cs, -b * (u * sn), -b * s_p * cs, -b * s_m * cs]
    };
    let (v, _) = adaptive(&mut f, &breaks, CONTOUR_TOL, MAX_PANELS)?;
    add(&mut out, &v, 1.0);

    // Lower half ellipse from c − ah to c + ah.
    let mut arc_breaks = vec![0.0, PI];
    for k in [kl, kh] {
        let t = ((c - k) / ah).clamp(-1.0, 1.0).acos();
        arc_breaks.push(t);
    }
    let n_arc = ((2.0 * ah * ad / PANEL_PHASE).ceil() as usize).max(2);
    for i in 1..n_arc {
        arc_breaks.push(PI * i as f64 / n_arc as f64);
    }
    arc_breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    arc_breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let mut f = |phi: f64| {
        let (s, co) = phi.sin_cos();
        let xi = C64::new(c - ah * co, -bv * s);
        let dxi = C64::new(ah * s, -bv * co);
        let (b, s_p, s_m) = sp.eval(xi);
        let arg = xi * delta;
        let cs = arg.cos();
        let sn = arg.sin();
        let w = b * dxi;
        [w * cs, -w * xi * sn, -w * s_p * cs, -w * s_m * cs]
    };
    let (v, _) = adaptive(&mut f, &arc_breaks, CONTOUR_TOL, MAX_PANELS)?;
    add(&mut out, &v, 1.0);

    // Tail from X = c + ah.
    let x_end = c + ah;
    if depth >= ad {
        if depth == 0.0 {
            return Err(Error::Singularity(
                "spectral integral with zero depth and zero offset".into(),
            ));
        }
        let xi_max = ((TAIL_EXPONENT / depth).powi(2) + kh * kh).sqrt().max(x_end + 1.0);
        let len = xi_max - x_end;
        let n = ((len * ad / PANEL_PHASE).ceil() as usize).max(1);
        let mut breaks: Vec<f64> = (0..=n).map(|i| x_end + len * i as f64 / n as f64).collect();
        // geometric refinement towards the start, where the integrand is largest
        let mut g = 1.0 / depth;
        while g < len {
            breaks.push(x_end + g);
            g *= 2.0;
        }
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let (v, _) = adaptive(&mut f_real(sp, delta), &breaks, CONTOUR_TOL, MAX_PANELS)?;
        add(&mut out, &v, 1.0);
    } else {
        // Split cos and sin into e^{±iξ|Δ|} and rotate each vertically.
        let tau_max = TAIL_EXPONENT / ad;
        let n = ((depth * tau_max / PANEL_PHASE).ceil() as usize).max(1);
        let mut breaks: Vec<f64> = (0..=n).map(|i| tau_max * i as f64 / n as f64).collect();
        let mut g = 1.0 / ad;
        while g < tau_max {
            breaks.push(g);
            g *= 2.0;
        }
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let mut tails = [[ZERO; 4]; 2];
        for (idx, dir) in [1.0f64, -1.0].iter().enumerate() {
            let mut f = |tau: f64| {
                let xi = C64::new(x_end, dir * tau);
                let dxi = C64::new(0.0, *dir);
                let (b, s_p, s_m) = sp.eval(xi);
                let w = b * dxi * (I * dir * ad * xi).exp();
                [w, w * xi, w * s_p, w * s_m]
            };
            let (v, _) = adaptive(&mut f, &breaks, CONTOUR_TOL, MAX_PANELS)?;
            tails[idx] = v;
        }
        let (up, dn) = (tails[0], tails[1]);
        let v = [
            0.5 * (up[0] + dn[0]),
            -sgn * (up[1] - dn[1]) / (2.0 * I),
            -0.5 * (up[2] + dn[2]),
            -0.5 * (up[3] + dn[3]),
        ];
        add(&mut out, &v, 1.0);
    }

    for o in out.iter_mut() {
        *o /= PI;
    }
    Ok(out)
}

fn f_real(sp: &Spectral, delta: f64) -> impl FnMut(f64) -> [C64; 4] + '_ {
    move |u: f64| {
        let xi = C64::new(u, 0.0);
        let (b, s_p, s_m) = sp.eval(xi);
        let (sn, cs) = (u * delta).sin_cos();
        [b * cs, -b * (u * sn), -b * s_p * cs, -b * s_m * cs]
    }
}

fn add(acc: &mut [C64; 4], v: &[C64; 4], scale: f64) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += b * scale;
    }
}

fn classify(x: Point2, y: Point2) -> Case {
    match (x.x2 > 0.0, y.x2 > 0.0) {
        (true, true) => Case::BothAbove,
        (true, false) => Case::XAbove,
        (false, true) => Case::YAbove,
        (false, false) => Case::BothBelow,
    }
}

fn check_points(x: Point2, y: Point2) -> Result<()> {
    if !x.is_finite() || !y.is_finite() {
        return domain("non-finite point");
    }
    if x == y {
        return Err(Error::Singularity(format!(
            "Green function at coincident points ({}, {})",
            x.x1, x.x2
        )));
    }
    Ok(())
}

/// G(x, y) with both gradients, from one pass over the spectral integral.
pub fn green_full(m: &MediumPair, x: Point2, y: Point2) -> Result<GreenValue> {
    check_points(x, y)?;
    let case = classify(x, y);
    let (kp, km) = (m.k_plus, m.k_minus);
    let (a_plus, a_minus) = match case {
        Case::BothAbove => (x.x2 + y.x2, 0.0),
        Case::XAbove => (x.x2, -y.x2),
        Case::YAbove => (y.x2, -x.x2),
        Case::BothBelow => (0.0, -(x.x2 + y.x2)),
    };
    let sp = Spectral { case, kp, km, a_plus, a_minus };
    let [i0, i1, ip, im] = spectral_integrals(&sp, x.x1 - y.x1)?;
    let (dx2, dy2) = match case {
        Case::BothAbove => (ip, ip),
        Case::XAbove => (ip, -im),
        Case::YAbove => (-im, ip),
        Case::BothBelow => (-im, -im),
    };
    let mut out = GreenValue { g: i0, grad_x: [i1, dx2], grad_y: [-i1, dy2] };
    let k_free = match case {
        Case::BothAbove => Some(kp),
        Case::BothBelow => Some(km),
        _ => None,
    };
    if let Some(k) = k_free {
        let (phi, gx) = phi_with_grad(k, x, y);
        out.g += phi;
        out.grad_x[0] += gx[0];
        out.grad_x[1] += gx[1];
        out.grad_y[0] -= gx[0];
        out.grad_y[1] -= gx[1];
    }
    Ok(out)
}

/// The two-layered Green function G(x, y).
pub fn green(m: &MediumPair, x: Point2, y: Point2) -> Result<C64> {
    Ok(green_full(m, x, y)?.g)
}

/// ∇_y G(x, y). The source point must not lie on the interface.
pub fn grad_green_y(m: &MediumPair, x: Point2, y: Point2) -> Result<(C64, C64)> {
    if y.x2 == 0.0 {
        return domain("grad_green_y: y lies on the interface");
    }
    let v = green_full(m, x, y)?;
    Ok((v.grad_y[0], v.grad_y[1]))
}

/// ∇_x G(x, y). The observation point must not lie on the interface.
pub fn grad_green_x(m: &MediumPair, x: Point2, y: Point2) -> Result<(C64, C64)> {
    if x.x2 == 0.0 {
        return domain("grad_green_x: x lies on the interface");
    }
    let v = green_full(m, x, y)?;
    Ok((v.grad_x[0], v.grad_x[1]))
}

/// R(x, y) = G(x, y) − Φ_{k₋}(x, y) for x₂, y₂ < 0.
pub fn green_remainder(m: &MediumPair, x: Point2, y: Point2) -> Result<C64> {
    if !(x.x2 < 0.0 && y.x2 < 0.0) {
        return domain("green_remainder needs both points strictly below the interface");
    }
    Ok(remainder(m, x.x1 - y.x1, x.x2 + y.x2)?.r)
}

/// Remainder and its derivatives in Δ = x₁ − y₁ and v = x₂ + y₂ (v < 0).
pub fn remainder(m: &MediumPair, delta: f64, v: f64) -> Result<RemainderValue> {
    if !(v < 0.0) || !delta.is_finite() {
        return domain(format!("remainder needs v < 0, got {v}"));
    }
    let sp = Spectral {
        case: Case::BothBelow,
        kp: m.k_plus,
        km: m.k_minus,
        a_plus: 0.0,
        a_minus: -v,
    };
    let [i0, i1, _, im] = spectral_integrals(&sp, delta)?;
    Ok(RemainderValue { r: i0, r_delta: i1, r_v: -im })
}

/// Plane wave e^{ik₊x·d} incident from above with d = (cos θ_d, sin θ_d),
/// together with its reflection above the interface and transmission below.
#[derive(Debug, Clone, Copy)]
pub struct PlaneWave {
    pub medium: MediumPair,
    pub theta_d: f64,
    pub refl: C64,
    pub trans: C64,
    /// S(cos θ_d, n), the scaled vertical wavenumber of the transmitted wave.
    pub s_t: C64,
}

impl PlaneWave {
    pub fn new(medium: MediumPair, theta_d: f64) -> Result<Self> {
        if !theta_d.is_finite() || theta_d.sin() > 1e-12 {
            return domain(format!("incident direction must point downwards, theta_d={theta_d}"));
        }
        let refl = medium.fresnel_r(PI + theta_d)?;
        Ok(PlaneWave {
            medium,
            theta_d,
            refl,
            trans: refl + 1.0,
            s_t: s_fn(C64::new(theta_d.cos(), 0.0), medium.n),
        })
    }

    pub fn direction(&self) -> [f64; 2] {
        [self.theta_d.cos(), self.theta_d.sin()]
    }

    pub fn reflected_direction(&self) -> [f64; 2] {
        [self.theta_d.cos(), -self.theta_d.sin()]
    }

    /// dᵗ = n⁻¹(cos θ_d, −i S(cos θ_d, n)).
    pub fn transmitted_direction(&self) -> [C64; 2] {
        let n = self.medium.n;
        [C64::new(self.theta_d.cos() / n, 0.0), -I * self.s_t / n]
    }

    /// u⁰(x) and ∇u⁰(x).
    pub fn eval(&self, x: Point2) -> (C64, [C64; 2]) {
        let kp = self.medium.k_plus;
        let (s, c) = self.theta_d.sin_cos();
        if x.x2 > 0.0 {
            let ui = (I * kp * (x.x1 * c + x.x2 * s)).exp();
            let ur = self.refl * (I * kp * (x.x1 * c - x.x2 * s)).exp();
            let u = ui + ur;
            let g1 = I * kp * c * u;
            let g2 = I * kp * s * (ui - ur);
            (u, [g1, g2])
        } else {
            let ut = self.trans * (I * kp * c * x.x1 + kp * self.s_t * x.x2).exp();
            (ut, [I * kp * c * ut, kp * self.s_t * ut])
        }
    }
}

/// Reference field u⁰ at x for plane incidence at angle θ_d ∈ [π, 2π].
pub fn reference_field_plane(m: &MediumPair, theta_d: f64, x: Point2) -> Result<C64> {
    Ok(PlaneWave::new(*m, theta_d)?.eval(x).0)
}
