//! Bessel and Hankel functions of order 0 and 1 for real arguments, and the
//! branch-cut square roots used by the layered Green function integrands.

use num_complex::Complex64;
use std::f64::consts::{FRAC_2_PI, PI};

use crate::error::{domain, Result};

pub type C64 = Complex64;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_MAX: f64 = 4.0;
const MILLER_MAX: f64 = 25.0;

/// J0, J1, Y0, Y1 evaluated together.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bessel01 {
    pub j0: f64,
    pub j1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Bessel01 {
    pub fn h0(&self) -> C64 {
        C64::new(self.j0, self.y0)
    }

    pub fn h1(&self) -> C64 {
        C64::new(self.j1, self.y1)
    }
}

/// J0 and J1 for z >= 0.
pub fn bessel_j01(z: f64) -> (f64, f64) {
    if z <= SERIES_MAX {
        series_j01(z)
    } else if z <= MILLER_MAX {
        let (j0, j1, _, _) = miller(z);
        (j0, j1)
    } else {
        let b = asymptotic(z);
        (b.j0, b.j1)
    }
}

/// All four order 0/1 Bessel functions for z > 0. No argument checks.
pub fn bessel01(z: f64) -> Bessel01 {
    if z <= SERIES_MAX {
        series_all(z)
    } else if z <= MILLER_MAX {
        let (j0, j1, y0, y1) = miller(z);
        Bessel01 { j0, j1, y0, y1 }
    } else {
        asymptotic(z)
    }
}

/// Bessel function of the first kind of order 0 or 1.
pub fn bessel_j(order: u32, z: f64) -> Result<f64> {
    if !z.is_finite() || z < 0.0 {
        return domain(format!("bessel_j needs finite z >= 0, got {z}"));
    }
    let (j0, j1) = bessel_j01(z);
    match order {
        0 => Ok(j0),
        1 => Ok(j1),
        _ => domain(format!("unsupported Bessel order {order}")),
    }
}

/// Bessel function of the second kind of order 0 or 1.
pub fn bessel_y(order: u32, z: f64) -> Result<f64> {
    let h = hankel1(order, z)?;
    Ok(h.im)
}

/// Hankel function of the first kind H_ν¹(z) = J_ν(z) + i Y_ν(z), ν ∈ {0, 1}.
pub fn hankel1(order: u32, z: f64) -> Result<C64> {
    if !z.is_finite() || z <= 0.0 {
        return domain(format!("hankel1 needs finite z > 0, got {z}"));
    }
    let b = bessel01(z);
    match order {
        0 => Ok(b.h0()),
        1 => Ok(b.h1()),
        _ => domain(format!("unsupported Hankel order {order}")),
    }
}

fn series_j01(z: f64) -> (f64, f64) {
    let q = 0.25 * z * z;
    let mut t0 = 1.0;
    let mut t1 = 0.5 * z;
    let mut j0 = t0;
    let mut j1 = t1;
    for k in 1..60 {
        let kf = k as f64;
        t0 *= -q / (kf * kf);
        t1 *= -q / (kf * (kf + 1.0));
        j0 += t0;
        j1 += t1;
        if t0.abs() < 1e-18 && t1.abs() < 1e-18 {
            break;
        }
    }
    (j0, j1)
}

fn series_all(z: f64) -> Bessel01 {
    let q = 0.25 * z * z;
    let lg = (0.5 * z).ln() + EULER_GAMMA;

    // J0, J1 and the harmonic-number sums for Y0, Y1.
    let mut t0 = 1.0; // q^k/(k!)^2 with sign
    let mut t1 = 1.0; // q^k/(k!(k+1)!) with sign
    let mut j0 = 1.0;
    let mut j1s = 1.0;
    let mut h = 0.0; // H_k
    let mut s0 = 0.0;
    let mut s1 = 1.0 - 2.0 * EULER_GAMMA; // k = 0 term: H_0 + H_1 - 2γ
    for k in 1..60 {
        let kf = k as f64;
        t0 *= -q / (kf * kf);
        t1 *= -q / (kf * (kf + 1.0));
        h += 1.0 / kf;
        let h_next = h + 1.0 / (kf + 1.0);
        j0 += t0;
        j1s += t1;
        s0 -= h * t0;
        s1 += (h + h_next - 2.0 * EULER_GAMMA) * t1;
        if t0.abs() * (1.0 + h) < 1e-18 && t1.abs() * (1.0 + h_next) < 1e-18 {
            break;
        }
    }
    let j1 = 0.5 * z * j1s;
    let y0 = FRAC_2_PI * (lg * j0 + s0);
    let y1 = -FRAC_2_PI / z + FRAC_2_PI * (0.5 * z).ln() * j1 - z / (2.0 * PI) * s1;
    Bessel01 { j0, j1, y0, y1 }
}

/// Backward recurrence for J_n normalised by J0 + 2ΣJ_2k = 1, with Neumann
/// series for Y0 and Y1.
fn miller(z: f64) -> (f64, f64, f64, f64) {
    let start = (z + 12.0 * z.cbrt() + 30.0) as usize;
    let m = start + (start & 1);
    let mut j = vec![0.0f64; m + 2];
    j[m + 1] = 0.0;
    j[m] = 1e-280;
    let two_over_z = 2.0 / z;
    for n in (1..=m).rev() {
        j[n - 1] = (n as f64) * two_over_z * j[n] - j[n + 1];
        if j[n - 1].abs() > 1e250 {
            for v in j[n - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let mut norm = j[0];
    let mut k = 2;
    while k <= m {
        norm += 2.0 * j[k];
        k += 2;
    }
    for v in j.iter_mut() {
        *v /= norm;
    }

    let lg = (0.5 * z).ln() + EULER_GAMMA;
    let mut sy0 = 0.0;
    let mut sy1 = 0.0;
    let mut k = 1;
    while 2 * k < m + 1 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let kf = k as f64;
        sy0 += sign * j[2 * k] / kf;
        sy1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / kf;
        k += 1;
    }
    let y0 = FRAC_2_PI * lg * j[0] - 2.0 * FRAC_2_PI * sy0;
    let y1 = FRAC_2_PI * lg * j[1] - FRAC_2_PI * j[0] / z + FRAC_2_PI * sy1;
    (j[0], j[1], y0, y1)
}

/// Hankel large-argument expansion with the P/Q series summed until the terms
/// stop decreasing.
fn asymptotic(z: f64) -> Bessel01 {
    let (p0, q0) = pq(0.0, z);
    let (p1, q1) = pq(4.0, z);
    let amp = (FRAC_2_PI / z).sqrt();
    let (s, c) = z.sin_cos();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    // χ0 = z − π/4, χ1 = z − 3π/4.
    let c0 = r * (c + s);
    let s0 = r * (s - c);
    let c1 = r * (s - c);
    let s1 = -r * (s + c);
    Bessel01 {
        j0: amp * (p0 * c0 - q0 * s0),
        y0: amp * (p0 * s0 + q0 * c0),
        j1: amp * (p1 * c1 - q1 * s1),
        y1: amp * (p1 * s1 + q1 * c1),
    }
}

fn pq(mu: f64, z: f64) -> (f64, f64) {
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * z);
        let mag = term.abs();
        if mag >= last {
            break;
        }
        last = mag;
        // a_k/z^k contributes to Q for odd k and to P for even k, with
        // alternating signs within each series.
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if mag < 1e-17 {
            break;
        }
    }
    (p, q)
}

/// Square root with argument in (−3π/2, π/2]; the ray {Re z = 0, Im z > 0} is
/// excluded.
pub fn sqrt_branch1(z: C64) -> Result<C64> {
    if z.re == 0.0 && z.im == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    if z.re == 0.0 && z.im > 0.0 {
        return domain(format!("sqrt_branch1: {z} lies on the excluded ray"));
    }
    Ok(sqrt1_unchecked(z))
}

/// Square root with argument in (−π/2, 3π/2); the ray {Re z = 0, Im z < 0} is
/// excluded.
pub fn sqrt_branch2(z: C64) -> Result<C64> {
    if z.re == 0.0 && z.im == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    if z.re == 0.0 && z.im < 0.0 {
        return domain(format!("sqrt_branch2: {z} lies on the excluded ray"));
    }
    Ok(sqrt2_unchecked(z))
}

#[inline]
pub(crate) fn sqrt1_unchecked(z: C64) -> C64 {
    let r = z.sqrt();
    if z.re < 0.0 && z.im.is_sign_positive() {
        -r
    } else {
        r
    }
}

#[inline]
pub(crate) fn sqrt2_unchecked(z: C64) -> C64 {
    let r = z.sqrt();
    if z.re < 0.0 && z.im.is_sign_negative() {
        -r
    } else {
        r
    }
}

/// S(z, a) = S₁(z − a)·S₂(z + a).
pub fn vertical_wavenumber(z: C64, a: f64) -> Result<C64> {
    if !(a > 0.0) || !a.is_finite() {
        return domain(format!("vertical_wavenumber needs a > 0, got {a}"));
    }
    Ok(sqrt_branch1(z - a)? * sqrt_branch2(z + a)?)
}

/// S(z, a) without ray checks, for quadrature paths that avoid the cuts.
#[inline]
pub(crate) fn s_fn(z: C64, a: f64) -> C64 {
    sqrt1_unchecked(z - a) * sqrt2_unchecked(z + a)
}

/// S(ξ, a) for real ξ: −i√(a² − ξ²) when |ξ| ≤ a, √(ξ² − a²) otherwise.
#[inline]
pub fn s_real(xi: f64, a: f64) -> C64 {
    let x = xi.abs();
    if x <= a {
        C64::new(0.0, -((a - x) * (a + x)).sqrt())
    } else {
        C64::new(((x - a) * (x + a)).sqrt(), 0.0)
    }
}

/// Critical angle arccos(min(n, 1/n)) with n = k₋/k₊.
pub fn critical_angle(k_plus: f64, k_minus: f64) -> Result<f64> {
    if !(k_plus > 0.0 && k_minus > 0.0) || !k_plus.is_finite() || !k_minus.is_finite() {
        return domain("critical_angle needs positive finite wavenumbers");
    }
    if k_plus == k_minus {
        return domain("critical angle undefined for equal wavenumbers");
    }
    let n = k_minus / k_plus;
    Ok(if k_plus > k_minus { n.acos() } else { (1.0 / n).acos() })
}
