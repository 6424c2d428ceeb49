//! Fixed-node quadrature for the smooth remainder R = G − Φ_{k₋} below the
//! interface, used when a whole matrix of remainder values is needed.
//!
//! With Δ = x₁ − y₁ and v = x₂ + y₂,
//!   R(Δ, v) = (1/π)∫₀^∞ F(ξ) e^{S₋(ξ)v} cos(ξΔ) dξ,
//! and cos(ξ(s − t)) = cos ξs cos ξt + sin ξs sin ξt separates the row and
//! column variables. The real ξ axis is split at the branch points and
//! mapped so that the square-root endpoint behaviour becomes smooth:
//! ξ = k_lo sin φ on [0, k_lo], ξ = c − h cos θ on [k_lo, k_hi] and
//! ξ = k_hi cosh w beyond.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::green::{remainder, MediumPair, RemainderValue};
use crate::quadrature::gauss_legendre;
use crate::specfun::C64;

const GL_ORDER: usize = 32;
const PANEL_PHASE: f64 = 7.0 * PI;
/// Node count above which callers should fall back to pointwise evaluation.
pub const MAX_NODES: usize = 8000;
const SELF_CHECK_TOL: f64 = 1e-11;

/// Quadrature nodes ξ_q with combined weights w_q·F(ξ_q)/π and S(ξ_q, k₋).
#[derive(Debug, Clone)]
pub struct ReflectionTable {
    pub medium: MediumPair,
    pub delta_max: f64,
    pub v_range: (f64, f64),
    xi: Vec<f64>,
    weight: Vec<C64>,
    s_minus: Vec<C64>,
}

/// R, ∂R/∂Δ and ∂R/∂v on a grid of (row, column) pairs, row-major.
#[derive(Debug, Clone)]
pub struct RemainderMatrices {
    pub rows: usize,
    pub cols: usize,
    pub r: Vec<C64>,
    pub r_delta: Vec<C64>,
    pub r_v: Vec<C64>,
}

impl ReflectionTable {
    /// Table valid for |Δ| ≤ `delta_max` and v in `v_range` = (v_min, v_max),
    /// v_max < 0. Checked against a table with doubled panel counts.
    pub fn new(medium: MediumPair, delta_max: f64, v_range: (f64, f64)) -> Result<Self> {
        let (v_min, v_max) = v_range;
        if !(v_max < 0.0 && v_min <= v_max && delta_max >= 0.0) {
            return Err(Error::Domain(format!(
                "reflection table needs v_min <= v_max < 0 and delta_max >= 0, got {v_range:?}, {delta_max}"
            )));
        }
        let mut refine = 1.0;
        let mut coarse = Self::build(medium, delta_max, v_range, refine)?;
        for _ in 0..4 {
            let fine = Self::build(medium, delta_max, v_range, 2.0 * refine)?;
            let mut worst = 0.0f64;
            for &d in &[0.0, 0.37 * delta_max, 0.71 * delta_max, delta_max] {
                for &v in &[v_max, 0.5 * (v_min + v_max), v_min] {
                    let a = coarse.eval(d, v);
                    let b = fine.eval(d, v);
                    worst = worst
                        .max((a.r - b.r).norm())
                        .max((a.r_delta - b.r_delta).norm())
                        .max((a.r_v - b.r_v).norm());
                }
            }
            if worst < SELF_CHECK_TOL {
                return Ok(coarse);
            }
            refine *= 2.0;
            coarse = fine;
        }
        Err(Error::Accuracy {
            estimate: SELF_CHECK_TOL,
            context: "reflection table did not converge under panel doubling".into(),
        })
    }

    fn build(medium: MediumPair, delta_max: f64, v_range: (f64, f64), refine: f64) -> Result<Self> {
        let kp = medium.k_plus;
        let km = medium.k_minus;
        let kl = kp.min(km);
        let kh = kp.max(km);
        let minus_is_lo = km < kp;
        let depth_min = -v_range.1;
        let depth_max = -v_range.0;
        let panel_phase = PANEL_PHASE / refine;
        let (gx, gw) = gauss_legendre(GL_ORDER);

        let mut xi = Vec::new();
        let mut weight = Vec::new();
        let mut s_minus = Vec::new();

        // Pushes one node given ξ, dξ/du·w, S(ξ,k_lo), S(ξ,k_hi).
        let mut push = |x: f64, jw: f64, s_lo: C64, s_hi: C64| {
            let (sp, sm) = if minus_is_lo { (s_hi, s_lo) } else { (s_lo, s_hi) };
            let f = (sm - sp) / (2.0 * (sp + sm) * sm);
            xi.push(x);
            weight.push(f * (jw / PI));
            s_minus.push(sm);
        };
        let panels = |len: f64, phase: f64| ((phase / panel_phase).ceil() as usize).max(2).max((len * refine).ceil() as usize);

        let rule = |a: f64, b: f64, n: usize, out: &mut Vec<(f64, f64)>| {
            let h = (b - a) / n as f64;
            for p in 0..n {
                let lo = a + p as f64 * h;
                for (x, w) in gx.iter().zip(&gw) {
                    out.push((lo + 0.5 * h * (x + 1.0), 0.5 * h * w));
                }
            }
        };

        // [0, k_lo]
        let mut nodes = Vec::new();
        let phase = (delta_max * kl + depth_max * kh) * 0.5 * PI;
        rule(0.0, 0.5 * PI, panels(0.5 * PI, phase), &mut nodes);
        for &(phi, w) in &nodes {
            let (s, c) = phi.sin_cos();
            let x = kl * s;
            let s_lo = C64::new(0.0, -kl * c);
            let s_hi = C64::new(0.0, -((kh - x) * (kh + x)).sqrt());
            push(x, kl * c * w, s_lo, s_hi);
        }

        // [k_lo, k_hi]
        nodes.clear();
        let c0 = 0.5 * (kl + kh);
        let hd = 0.5 * (kh - kl);
        let phase = (delta_max * hd + depth_max * kh) * PI;
        rule(0.0, PI, panels(PI, phase), &mut nodes);
        let r2 = (2.0 * hd).sqrt();
        for &(th, w) in &nodes {
            let x = c0 - hd * th.cos();
            let (sh, ch) = (0.5 * th).sin_cos();
            let s_lo = C64::new(r2 * sh * (x + kl).sqrt(), 0.0);
            let s_hi = C64::new(0.0, -r2 * ch * (kh + x).sqrt());
            push(x, hd * th.sin() * w, s_lo, s_hi);
        }

        // [k_hi, 2k_hi]
        nodes.clear();
        let w1 = 2f64.acosh();
        let phase = delta_max * kh * 3f64.sqrt() * w1;
        rule(0.0, w1, panels(w1, phase), &mut nodes);
        for &(u, w) in &nodes {
            let x = kh * u.cosh();
            let s_hi = C64::new(kh * u.sinh(), 0.0);
            let s_lo = C64::new(((x - kl) * (x + kl)).sqrt(), 0.0);
            push(x, kh * u.sinh() * w, s_lo, s_hi);
        }

        // [2k_hi, ξ_max]
        let f_tail = |x: f64| {
            let sp = ((x - kp) * (x + kp)).sqrt();
            let sm = ((x - km) * (x + km)).sqrt();
            ((sm - sp) / (2.0 * (sp + sm) * sm)).abs() * x.max(1.0) * (-sm * depth_min).exp() / depth_min
        };
        let mut xmax = 2.0 * kh;
        while f_tail(xmax) > 1e-17 {
            xmax += 0.25;
            if xmax > 2.0 * kh + 1e5 {
                return Err(Error::Accuracy {
                    estimate: f_tail(xmax),
                    context: "surface too close to the interface for the reflection table".into(),
                });
            }
        }
        nodes.clear();
        let phase = delta_max * (xmax - 2.0 * kh);
        rule(2.0 * kh, xmax, panels(xmax - 2.0 * kh, phase), &mut nodes);
        for &(x, w) in &nodes {
            let s_lo = C64::new(((x - kl) * (x + kl)).sqrt(), 0.0);
            let s_hi = C64::new(((x - kh) * (x + kh)).sqrt(), 0.0);
            push(x, w, s_lo, s_hi);
        }

        if xi.len() > 4 * MAX_NODES {
            return Err(Error::Accuracy {
                estimate: f64::NAN,
                context: format!("reflection table would need {} nodes", xi.len()),
            });
        }
        Ok(ReflectionTable { medium, delta_max, v_range, xi, weight, s_minus })
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    /// R and its derivatives at one (Δ, v).
    pub fn eval(&self, delta: f64, v: f64) -> RemainderValue {
        let mut r = C64::new(0.0, 0.0);
        let mut rd = r;
        let mut rv = r;
        for q in 0..self.xi.len() {
            let x = self.xi[q];
            let e = self.weight[q] * (self.s_minus[q] * v).exp();
            let (s, c) = (x * delta).sin_cos();
            r += e * c;
            rd -= e * (x * s);
            rv += e * self.s_minus[q] * c;
        }
        RemainderValue { r, r_delta: rd, r_v: rv }
    }

    /// Remainder matrices for rows x_i = (s_i, f_i) and columns
    /// y_j = (t_j, g_j), as one real matrix product.
    pub fn matrices(&self, rows: &[(f64, f64)], cols: &[(f64, f64)]) -> RemainderMatrices {
        let m = rows.len();
        let n = cols.len();
        let q = self.xi.len();
        let k2 = 2 * q; // complex inner dimension: cos block then sin block
        let kr = 2 * k2; // real inner dimension: real then imaginary parts

        // Left factor, 3m × kr: [Re L | Im L] for the three stacked blocks.
        let mut left = vec![0.0f64; 3 * m * kr];
        for (i, &(s, f)) in rows.iter().enumerate() {
            for p in 0..q {
                let e = (self.s_minus[p] * f).exp();
                let (sn, cs) = (self.xi[p] * s).sin_cos();
                let (c, d) = (e * cs, e * sn);
                let a = self.weight[p];
                let ax = a * self.xi[p];
                let as_ = a * self.s_minus[p];
                let blocks = [(a * c, a * d), (-ax * d, ax * c), (as_ * c, as_ * d)];
                for (b, (l1, l2)) in blocks.iter().enumerate() {
                    let row = &mut left[(b * m + i) * kr..(b * m + i + 1) * kr];
                    row[p] = l1.re;
                    row[q + p] = l2.re;
                    row[k2 + p] = l1.im;
                    row[k2 + q + p] = l2.im;
                }
            }
        }
        // Right factor, kr × 2n: [[Re Rt, Im Rt], [−Im Rt, Re Rt]].
        let mut right = vec![0.0f64; kr * 2 * n];
        let ld = 2 * n;
        for (j, &(t, g)) in cols.iter().enumerate() {
            for p in 0..q {
                let e = (self.s_minus[p] * g).exp();
                let (sn, cs) = (self.xi[p] * t).sin_cos();
                let (c, d) = (e * cs, e * sn);
                for (off, z) in [(p, c), (q + p, d)] {
                    right[off * ld + j] = z.re;
                    right[off * ld + n + j] = z.im;
                    right[(k2 + off) * ld + j] = -z.im;
                    right[(k2 + off) * ld + n + j] = z.re;
                }
            }
        }
        let mut out = vec![0.0f64; 3 * m * 2 * n];
        // SAFETY: all slices have exactly the dimensions and strides passed.
        unsafe {
            matrixmultiply::dgemm(
                3 * m,
                kr,
                2 * n,
                1.0,
                left.as_ptr(),
                kr as isize,
                1,
                right.as_ptr(),
                ld as isize,
                1,
                0.0,
                out.as_mut_ptr(),
                ld as isize,
                1,
            );
        }
        drop(left);
        drop(right);
        let take = |b: usize| -> Vec<C64> {
            let mut v = Vec::with_capacity(m * n);
            for i in 0..m {
                let row = &out[(b * m + i) * ld..(b * m + i + 1) * ld];
                for j in 0..n {
                    v.push(C64::new(row[j], row[n + j]));
                }
            }
            v
        };
        RemainderMatrices { rows: m, cols: n, r: take(0), r_delta: take(1), r_v: take(2) }
    }
}

/// Remainder matrices by pointwise contour evaluation; used when the table
/// would be too large.
pub fn remainder_matrices_pointwise(
    medium: &MediumPair,
    rows: &[(f64, f64)],
    cols: &[(f64, f64)],
) -> Result<RemainderMatrices> {
    let mut r = Vec::with_capacity(rows.len() * cols.len());
    let mut rd = Vec::with_capacity(r.capacity());
    let mut rv = Vec::with_capacity(r.capacity());
    for &(s, f) in rows {
        for &(t, g) in cols {
            let val = remainder(medium, s - t, f + g)?;
            r.push(val.r);
            rd.push(val.r_delta);
            rv.push(val.r_v);
        }
    }
    Ok(RemainderMatrices { rows: rows.len(), cols: cols.len(), r, r_delta: rd, r_v: rv })
}
