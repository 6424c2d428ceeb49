//! Test-only reference implementations: a brute-force real-axis evaluation of
//! the layered Green function by tanh-sinh quadrature, and golden data.
#![allow(dead_code)]

pub mod props;

use layerscat::green::{MediumPair, Point2};
use layerscat::specfun::hankel1;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn s_eq(xi: f64, a: f64) -> C64 {
    if xi.abs() <= a {
        -I * (a * a - xi * xi).sqrt()
    } else {
        C64::new((xi * xi - a * a).sqrt(), 0.0)
    }
}

/// Tanh-sinh quadrature on [a, b], refined by halving the step until two
/// levels agree.
pub fn tanh_sinh<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, tol: f64) -> C64 {
    let c = 0.5 * (a + b);
    let hw = 0.5 * (b - a);
    let tmax = 3.2;
    let term = |t: f64| {
        let u = 0.5 * PI * t.sinh();
        let ch = u.cosh();
        let x = u.tanh();
        let w = 0.5 * PI * t.cosh() / (ch * ch);
        // distance to the nearer endpoint, computed without cancellation
        let e = 1.0 / (u.abs().exp() * ch);
        let xa = if x < 0.0 { a + hw * e } else { b - hw * e };
        let xa = if e > 0.5 { c + hw * x } else { xa };
        if xa <= a || xa >= b {
            C64::new(0.0, 0.0)
        } else {
            f(xa) * w
        }
    };
    let mut h = 1.0;
    let mut sum = term(0.0);
    let mut k = 1;
    while (k as f64) * h <= tmax {
        sum += term(k as f64 * h) + term(-(k as f64) * h);
        k += 1;
    }
    let mut prev = sum * h * hw;
    for _ in 0..12 {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= tmax {
            sum += term(k as f64 * h) + term(-(k as f64) * h);
            k += 2;
        }
        let cur = sum * h * hw;
        if (cur - prev).norm() < tol {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// S(ξ, a) when |ξ| − a = `off` is known exactly.
fn s_offset(a: f64, off: f64) -> C64 {
    if off < 0.0 {
        -I * (-off * (2.0 * a + off)).sqrt()
    } else {
        C64::new((off * (2.0 * a + off)).sqrt(), 0.0)
    }
}

/// ∫ f(ξ, S₊, S₋) dξ over the real line, split at ±k₊, ±k₋ and 0 and cut at
/// ±l. Each piece is halved and mapped by ξ = e ± u² from its endpoint e so
/// the square-root behaviour at the branch points becomes smooth and the
/// offsets |ξ| − k are exact.
pub fn real_line<F: Fn(f64, C64, C64) -> C64>(kp: f64, km: f64, l: f64, piece: f64, f: &F) -> C64 {
    let kl = kp.min(km);
    let kh = kp.max(km);
    let pts = [-l, -kh, -kl, 0.0, kl, kh, l];
    let mut total = C64::new(0.0, 0.0);
    for w in pts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        for (e, other, dir) in [(w[0], mid, 1.0), (w[1], mid, -1.0)] {
            let len = (other - e).abs();
            let umax = len.sqrt();
            let n = (len / piece).ceil().max(1.0) as usize;
            let g = |u: f64| {
                let xi = e + dir * u * u;
                let s_for = |k: f64| {
                    if e.abs() == k {
                        s_offset(k, e.signum() * dir * u * u)
                    } else {
                        s_eq(xi, k)
                    }
                };
                f(xi, s_for(kp), s_for(km)) * (2.0 * u)
            };
            for i in 0..n {
                // subdivide uniformly in ξ-offset so oscillations are resolved
                let ua = (len * i as f64 / n as f64).sqrt();
                let ub = if i + 1 == n { umax } else { (len * (i + 1) as f64 / n as f64).sqrt() };
                total += tanh_sinh(&g, ua, ub, 1e-16);
            }
        }
    }
    total
}

/// G(x, y) from the Fourier integral over the whole real line.
pub fn oracle_green(m: &MediumPair, x: Point2, y: Point2) -> C64 {
    let (kp, km) = (m.k_plus, m.k_minus);
    let d = x.x1 - y.x1;
    let (ax, ay) = (x.x2 > 0.0, y.x2 > 0.0);
    let depth = match (ax, ay) {
        (true, true) => x.x2 + y.x2,
        (false, false) => -(x.x2 + y.x2),
        _ => x.x2.abs() + y.x2.abs(),
    };
    let f = |xi: f64, sp: C64, sm: C64| {
        let core = match (ax, ay) {
            (true, true) => (sp - sm) / ((sp + sm) * sp) * 0.5 * (-sp * (x.x2 + y.x2)).exp(),
            (true, false) => (sm * y.x2 - sp * x.x2).exp() / (sp + sm),
            (false, true) => (-sp * y.x2 + sm * x.x2).exp() / (sp + sm),
            (false, false) => (sm - sp) / ((sp + sm) * sm) * 0.5 * (sm * (x.x2 + y.x2)).exp(),
        };
        core * (I * xi * d).exp()
    };
    let l = kp.max(km) + 42.0 / depth;
    let piece = (PI / d.abs().max(1.0)).min(1.0);
    let mut g = real_line(kp, km, l, piece, &f) / (2.0 * PI);
    if ax == ay {
        let k = if ax { kp } else { km };
        let r = x.dist(&y);
        g += 0.25 * I * hankel1(0, k * r).unwrap();
    }
    g
}

pub struct GoldenRow {
    pub k_plus: f64,
    pub k_minus: f64,
    pub x: Point2,
    pub y: Point2,
    pub value: C64,
    pub tol: f64,
}

pub fn golden_green() -> Vec<GoldenRow> {
    include_str!("../data/green_golden.csv")
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
            GoldenRow {
                k_plus: v[0],
                k_minus: v[1],
                x: Point2::new(v[2], v[3]),
                y: Point2::new(v[4], v[5]),
                value: C64::new(v[6], v[7]),
                tol: v[8],
            }
        })
        .collect()
}

/// C^∞ bump supported on (c − w, c + w) with peak 1 at c.
pub fn bump(t: f64, c: f64, w: f64) -> f64 {
    let u = (t - c) / w;
    if u.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - u * u)).exp()
    }
}

/// Single layer, double layer and the ν₀-derivative of the single layer at
/// x for the density ψ supported on `support`, using G = Φ + R with R from
/// the fixed-node table.
pub fn layer_potentials(
    tab: &layerscat::sommerfeld::ReflectionTable,
    surface: &layerscat::surface::SurfaceProfile,
    psi: &dyn Fn(f64) -> f64,
    support: (f64, f64),
    x: Point2,
    nu0: (f64, f64),
) -> [C64; 3] {
    let k = tab.medium.k_minus;
    let i = C64::new(0.0, 1.0);
    let mut f = |t: f64| {
        let w = psi(t);
        if w == 0.0 {
            return [C64::new(0.0, 0.0); 3];
        }
        let y = surface.point(t);
        let df = surface.slope(t);
        let sp = df.hypot(1.0);
        let (d1, d2) = (x.x1 - y.x1, x.x2 - y.x2);
        let r = d1.hypot(d2);
        let h0 = hankel1(0, k * r).unwrap();
        let h1 = hankel1(1, k * r).unwrap();
        let rem = tab.eval(d1, x.x2 + y.x2);
        let g = 0.25 * i * h0 + rem.r;
        // ∇_y Φ = (ik/4)H₁(kr)(x − y)/r, ∇_x Φ = −∇_y Φ
        let c = 0.25 * i * k * h1 / r;
        let gy = [c * d1 - rem.r_delta, c * d2 + rem.r_v];
        let gx = [-c * d1 + rem.r_delta, -c * d2 + rem.r_v];
        [
            g * w * sp,
            (gy[0] * df - gy[1]) * w,
            (gx[0] * nu0.0 + gx[1] * nu0.1) * w * sp,
        ]
    };
    let s0 = x.x1;
    let mut breaks = vec![support.0, support.1];
    for e in [1e-1, 1e-2, 1e-3, 1e-4, 1e-5] {
        for b in [s0 - e, s0 + e] {
            if b > support.0 && b < support.1 {
                breaks.push(b);
            }
        }
    }
    if s0 > support.0 && s0 < support.1 {
        breaks.push(s0);
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    layerscat::quadrature::adaptive(&mut f, &breaks, 1e-10, 200_000).unwrap().0
}
