//! Gauss–Legendre rules and adaptive Gauss–Kronrod integration along
//! parametrised complex paths.

use crate::error::{Error, Result};
use crate::specfun::C64;

// 21-point Kronrod nodes on [0, 1]; odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];

const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Composite Gauss–Legendre rule: `panels` equal panels on [a, b].
pub fn composite_gl(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(lo + 0.5 * h * (xi + 1.0));
            weights.push(0.5 * h * wi);
        }
    }
    (nodes, weights)
}

/// One 21-point Kronrod panel of a vector integrand on [a, b] in the path
/// parameter. Returns the Kronrod value and the max-component |K − G|.
fn gk21<const NV: usize, F>(f: &mut F, a: f64, b: f64) -> ([C64; NV], f64)
where
    F: FnMut(f64) -> [C64; NV],
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let zero = C64::new(0.0, 0.0);
    let mut k = [zero; NV];
    let mut g = [zero; NV];
    let fc = f(c);
    for v in 0..NV {
        k[v] = fc[v] * WGK[10];
    }
    for i in 0..10 {
        let dx = h * XGK[i];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        for v in 0..NV {
            let s = f1[v] + f2[v];
            k[v] += s * WGK[i];
            if i % 2 == 1 {
                g[v] += s * WG[i / 2];
            }
        }
    }
    let mut err = 0.0f64;
    for v in 0..NV {
        k[v] *= h;
        g[v] *= h;
        err = err.max((k[v] - g[v]).norm());
    }
    (k, err)
}

/// Adaptive integration of `f` over consecutive parameter intervals given by
/// `breaks`. Panels are bisected until each panel error is below its share
/// of `tol`. Fails with an accuracy error when `max_panels` is exhausted.
pub fn adaptive<const NV: usize, F>(
    f: &mut F,
    breaks: &[f64],
    tol: f64,
    max_panels: usize,
) -> Result<([C64; NV], f64)>
where
    F: FnMut(f64) -> [C64; NV],
{
    let zero = C64::new(0.0, 0.0);
    let mut total = [zero; NV];
    let mut err_total = 0.0;
    let span: f64 = (breaks[breaks.len() - 1] - breaks[0]).abs();
    if span == 0.0 {
        return Ok((total, 0.0));
    }
    let mut stack: Vec<(f64, f64, usize)> = breaks
        .windows(2)
        .filter(|w| w[1] != w[0])
        .map(|w| (w[0], w[1], 0))
        .collect();
    stack.reverse();
    let mut used = 0usize;
    while let Some((a, b, depth)) = stack.pop() {
        used += 1;
        let (val, err) = gk21(f, a, b);
        let share = tol * ((b - a).abs() / span).max(1e-3);
        if err > share && depth < 48 && used + stack.len() >= max_panels {
            return Err(Error::Accuracy {
                estimate: err_total + err,
                context: format!("adaptive quadrature budget exhausted on [{a}, {b}]"),
            });
        }
        if err <= share || depth >= 48 {
            for v in 0..NV {
                total[v] += val[v];
            }
            err_total += err;
        } else {
            let m = 0.5 * (a + b);
            stack.push((m, b, depth + 1));
            stack.push((a, m, depth + 1));
        }
    }
    Ok((total, err_total))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        for n in [1usize, 2, 5, 16, 32] {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - want).abs() < 1e-14, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn adaptive_oscillatory() {
        // ∫_0^{10} cos(20 x) e^{i x} dx
        let mut f = |x: f64| [C64::new(0.0, x).exp() * (20.0 * x).cos()];
        let (v, _) = adaptive(&mut f, &[0.0, 10.0], 1e-13, 10_000).unwrap();
        let g = |w: f64| (C64::new(0.0, w * 10.0).exp() - 1.0) / C64::new(0.0, w);
        let want = 0.5 * (g(21.0) + g(-19.0));
        assert!((v[0] - want).norm() < 1e-12);
    }

    #[test]
    fn adaptive_reports_failure() {
        let mut f = |x: f64| [C64::new(1.0 / x.abs().max(1e-300).sqrt(), 0.0) * (1e4 * x).sin()];
        let r = adaptive(&mut f, &[-1.0, 0.7], 1e-15, 20);
        assert!(matches!(r, Err(Error::Accuracy { .. })));
    }
}
