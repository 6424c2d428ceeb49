//! Measured quantities behind the Green-function, quadrature and kernel
//! property checks. Each function returns the worst observed value.

use std::f64::consts::PI;
use std::sync::Arc;

use layerscat::bie::{kernel_raw, split_entry, BoundaryData, BoundaryProblem, KernelSplit};
use layerscat::green::{green, green_full, MediumPair, Point2};
use layerscat::nystrom::log_weight;
use layerscat::sommerfeld::ReflectionTable;
use layerscat::surface::SurfaceProfile;
use num_complex::Complex64 as C64;

use super::{bump, layer_potentials, oracle_green};

fn m(kp: f64, km: f64) -> MediumPair {
    MediumPair::new(kp, km).unwrap()
}

pub fn reciprocity_max() -> f64 {
    let pairs = [
        (Point2::new(1.0, 0.7), Point2::new(-0.5, -1.2)),
        (Point2::new(0.2, 0.4), Point2::new(0.9, 1.3)),
        (Point2::new(-0.3, -0.5), Point2::new(2.0, -1.1)),
        (Point2::new(4.0, 0.1), Point2::new(0.0, -0.1)),
    ];
    let mut worst = 0.0f64;
    for med in [m(2.7, 3.5), m(3.5, 2.7)] {
        for (x, y) in pairs {
            worst = worst.max((green(&med, x, y).unwrap() - green(&med, y, x).unwrap()).norm());
        }
    }
    worst
}

/// Jumps of G and ∂G/∂x₂ across the interface, each side extrapolated
/// linearly from ±ε and ±2ε.
pub fn transmission_jump_max() -> f64 {
    let eps = 1e-5;
    let y = Point2::new(0.0, -1.0);
    let mut worst = 0.0f64;
    for med in [m(2.7, 3.5), m(3.5, 2.7)] {
        for x1 in [-1.3, 0.0, 0.4, 2.0] {
            let at = |h: f64| green_full(&med, Point2::new(x1, h), y).unwrap();
            let (p1, p2, m1, m2) = (at(eps), at(2.0 * eps), at(-eps), at(-2.0 * eps));
            worst = worst.max(((2.0 * p1.g - p2.g) - (2.0 * m1.g - m2.g)).norm());
            let up = 2.0 * p1.grad_x[1] - p2.grad_x[1];
            let dn = 2.0 * m1.grad_x[1] - m2.grad_x[1];
            worst = worst.max((up - dn).norm());
        }
    }
    worst
}

/// |ΔG + k²G| / |G| by the five-point Laplacian, h = 1e-3.
pub fn helmholtz_rel_max() -> f64 {
    let h = 1e-3;
    let mut worst = 0.0f64;
    for (kp, km) in [(2.7, 3.5), (3.5, 2.7)] {
        let med = m(kp, km);
        let y = Point2::new(0.2, -0.7);
        for (x, k) in [(Point2::new(0.5, 0.6), kp), (Point2::new(-0.4, -0.2), km), (Point2::new(1.5, 1.0), kp)] {
            let g = |a: f64, b: f64| green(&med, Point2::new(x.x1 + a, x.x2 + b), y).unwrap();
            let c = g(0.0, 0.0);
            let lap = (g(h, 0.0) + g(-h, 0.0) + g(0.0, h) + g(0.0, -h) - 4.0 * c) / (h * h);
            worst = worst.max((lap + k * k * c).norm() / c.norm());
        }
    }
    worst
}

/// Least-squares slope of log|G| against log r along a horizontal line in
/// the lower layer.
pub fn decay_slope() -> f64 {
    let med = m(2.7, 3.5);
    let x = Point2::new(0.0, -0.5);
    let pts: Vec<(f64, f64)> = [4.0f64, 8.0, 16.0, 32.0]
        .iter()
        .map(|&r| (r.ln(), green(&med, x, Point2::new(r, -0.5)).unwrap().norm().ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>()
}

/// Contour evaluator against the real-axis oracle on a 5×5 grid of pairs.
pub fn oracle_grid_max() -> f64 {
    let med = m(2.7, 3.5);
    let xs = [(0.3, 0.4), (-0.7, 1.1), (0.2, -0.3), (1.5, -1.2), (-2.0, 0.2)];
    let ys = [(0.1, 0.8), (-0.4, -0.6), (2.2, -0.2), (-1.1, 0.5), (0.6, -1.5)];
    let mut worst = 0.0f64;
    for &(a, b) in &xs {
        for &(c, d) in &ys {
            let (x, y) = (Point2::new(a, b), Point2::new(c, d));
            worst = worst.max((green(&med, x, y).unwrap() - oracle_green(&med, x, y)).norm());
        }
    }
    worst
}

/// 2π Σ_j R_j^N(s) e^{imt_j} over one period against
/// ∫₀^{2π} ln(4 sin²((s−t)/2)) e^{imt} dt.
pub fn log_rule_exactness_max() -> f64 {
    let mut worst = 0.0f64;
    for n in [3usize, 4, 8, 16] {
        let h = PI / n as f64;
        for s in [0.0, 0.37, 1.9, 4.4] {
            for mm in 0..=2i32 {
                if n as i32 <= mm {
                    continue;
                }
                let rule: C64 = (0..2 * n)
                    .map(|j| {
                        let t = j as f64 * h;
                        2.0 * PI * log_weight(n, s, t) * C64::from_polar(1.0, mm as f64 * t)
                    })
                    .sum();
                let exact = if mm == 0 {
                    C64::new(0.0, 0.0)
                } else {
                    -2.0 * PI / mm as f64 * C64::from_polar(1.0, mm as f64 * s)
                };
                worst = worst.max((rule - exact).norm());
            }
        }
    }
    worst
}

pub fn example_problems(kp: f64, km: f64) -> [BoundaryProblem; 2] {
    let med = m(kp, km);
    let g = SurfaceProfile::builtin("gamma1").unwrap();
    let src = BoundaryData::PointSource(Point2::new(1.0, -1.3));
    [
        BoundaryProblem::dirichlet(med, g.clone(), (kp * km).sqrt(), src.clone()).unwrap(),
        BoundaryProblem::impedance(med, g, Arc::new(|_| C64::new(1.0, 0.0)), src).unwrap(),
    ]
}

/// Relative mismatch between the split kernel and the raw kernel for
/// 0 < |s − t| < 1.
pub fn reconstruction_max() -> f64 {
    let mut worst = 0.0f64;
    for (kp, km) in [(2.7, 3.5), (3.5, 2.7)] {
        for p in example_problems(kp, km) {
            let ks = KernelSplit { problem: p.clone(), support_radius: PI };
            for (s, t) in [(0.0, 0.01), (0.0, -0.01), (0.3, -0.4), (-1.2, -0.35), (0.8, 1.75), (2.0, 2.9), (-0.5, -0.499)] {
                let raw = kernel_raw(&p, s, t).unwrap();
                let rec = ks.reconstruct(s, t).unwrap();
                worst = worst.max((raw - rec).norm() / raw.norm().max(1.0));
            }
        }
    }
    worst
}

/// max |B(s, s ± δ) − B(s, s)| / δ over δ = 1e-3, 1e-5, 1e-7, and whether
/// the gaps shrink with δ.
pub fn b_continuity() -> (f64, bool) {
    let mut worst = 0.0f64;
    let mut shrinking = true;
    for p in example_problems(2.7, 3.5) {
        for s in [-0.9, 0.0, 0.45] {
            let (_, b0) = split_entry(&p, s, s).unwrap();
            let mut last = f64::INFINITY;
            for d in [1e-3, 1e-5, 1e-7] {
                let gap = [s + d, s - d]
                    .iter()
                    .map(|&t| (split_entry(&p, s, t).unwrap().1 - b0).norm())
                    .fold(0.0, f64::max);
                worst = worst.max(gap / d);
                shrinking &= gap < last || gap < 1e-10;
                last = gap;
            }
        }
    }
    (worst, shrinking)
}

fn richardson(v: [C64; 3]) -> C64 {
    // values at ε = 1e-2, 1e-3, 1e-4 with error c₁ε + c₂ε²
    let r1 = (10.0 * v[1] - v[0]) / 9.0;
    let r2 = (10.0 * v[2] - v[1]) / 9.0;
    (100.0 * r2 - r1) / 99.0
}

/// Extrapolated jump errors for a bump density at five surface points:
/// single-layer jump (should vanish), double-layer jump below − above
/// (should equal ψ) and normal-derivative jump above − below (should equal
/// ψ), with ν the downward normal.
pub fn jump_relation_errors() -> [f64; 3] {
    let med = m(2.7, 3.5);
    let surface = SurfaceProfile::builtin("gamma1").unwrap();
    let tab = ReflectionTable::new(med, 4.0, (-2.6, -1.4)).unwrap();
    let (c, w) = (0.3, 1.5);
    let psi = move |t: f64| bump(t, c, w);
    let mut worst = [0.0f64; 3];
    for s0 in [-0.6, -0.2, 0.3, 0.7, 1.1] {
        let x0 = surface.point(s0);
        let nu = surface.normal(s0);
        let zero = C64::new(0.0, 0.0);
        let (mut dv, mut dw, mut dn) = ([zero; 3], [zero; 3], [zero; 3]);
        for (q, eps) in [1e-2, 1e-3, 1e-4].into_iter().enumerate() {
            let above = Point2::new(x0.x1 - eps * nu.0, x0.x2 - eps * nu.1);
            let below = Point2::new(x0.x1 + eps * nu.0, x0.x2 + eps * nu.1);
            let a = layer_potentials(&tab, &surface, &psi, (c - w, c + w), above, nu);
            let b = layer_potentials(&tab, &surface, &psi, (c - w, c + w), below, nu);
            dv[q] = b[0] - a[0];
            dw[q] = b[1] - a[1];
            dn[q] = a[2] - b[2];
        }
        let want = psi(s0);
        worst[0] = worst[0].max(richardson(dv).norm());
        worst[1] = worst[1].max((richardson(dw) - want).norm());
        worst[2] = worst[2].max((richardson(dn) - want).norm());
    }
    worst
}
