//! Truncated-line Nyström discretization: equispaced nodes on [−A, A],
//! product weights for the periodic-log kernel, dense assembly and solve.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::bie::{log_split, periodic_split, split_entry, BoundaryProblem, NodeGeom, ProblemKind};
use crate::error::{Error, Result};
use crate::green::RemainderValue;
use crate::sommerfeld::{remainder_matrices_pointwise, ReflectionTable, RemainderMatrices};
use crate::specfun::C64;

const COND_LIMIT: f64 = 1e12;
const RESIDUAL_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Grid {
    pub half_width_a: f64,
    pub n: usize,
    pub h: f64,
    pub nodes: Vec<f64>,
}

impl Grid {
    /// Nodes t_j = −A + jh, h = π/N, j = 0..2A/h. A/h must be an integer.
    pub fn new(half_width_a: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("N must be at least 1".into()));
        }
        if !(half_width_a > 0.0 && half_width_a.is_finite()) {
            return Err(Error::Config(format!("truncation A must be positive, got {half_width_a}")));
        }
        let h = PI / n as f64;
        let steps = half_width_a / h;
        let k = steps.round();
        if (steps - k).abs() > 1e-9 * steps.max(1.0) || k < 1.0 {
            return Err(Error::Config(format!("A/h = {steps} is not an integer (A = {half_width_a}, N = {n})")));
        }
        let k = k as usize;
        let nodes = (0..=2 * k).map(|j| (j as f64 - k as f64) * h).collect();
        Ok(Grid { half_width_a, n, h, nodes })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// R_j^N(s) = −(1/N)[Σ_{m=1}^{N−1} cos(m(s−t_j))/m + cos(N(s−t_j))/(2N)].
pub fn log_weight(n: usize, s: f64, t_j: f64) -> f64 {
    let d = s - t_j;
    let nf = n as f64;
    let mut sum = 0.0;
    for m in 1..n {
        sum += (m as f64 * d).cos() / m as f64;
    }
    sum += (nf * d).cos() / (2.0 * nf);
    -sum / nf
}

/// Collocation system (I − α)ψ = rhs with α_ij = R_j^N(t_i)A(t_i,t_j) + hB(t_i,t_j).
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: DMatrix<C64>,
    pub rhs: DVector<C64>,
    pub kind: ProblemKind,
    pub grid: Grid,
}

fn remainder_matrices(p: &BoundaryProblem, pts: &[(f64, f64)], delta_max: f64) -> Result<RemainderMatrices> {
    let lo = pts.iter().map(|q| q.1).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|q| q.1).fold(f64::NEG_INFINITY, f64::max);
    match ReflectionTable::new(p.medium, delta_max, (2.0 * lo, 2.0 * hi)) {
        Ok(tab) => Ok(tab.matrices(pts, pts)),
        Err(Error::Accuracy { .. }) => remainder_matrices_pointwise(&p.medium, pts, pts),
        Err(e) => Err(e),
    }
}

pub fn assemble(p: &BoundaryProblem, grid: &Grid) -> Result<LinearSystem> {
    let m = grid.len();
    let geo: Vec<NodeGeom> = grid.nodes.iter().map(|&t| NodeGeom::new(p, t)).collect();
    if let Some(g) = geo.iter().find(|g| !(g.f < 0.0)) {
        return Err(Error::InvalidSurface(format!("surface not below the interface at t = {}", g.s)));
    }
    let pts: Vec<(f64, f64)> = geo.iter().map(|g| (g.s, g.f)).collect();
    let rem = remainder_matrices(p, &pts, 2.0 * grid.half_width_a)?;
    // R_j^N(t_i) depends on i − j only; A vanishes once |i − j| ≥ N.
    let wlog: Vec<f64> = (0..grid.n.min(m)).map(|d| log_weight(grid.n, d as f64 * grid.h, 0.0)).collect();
    let mut matrix = DMatrix::<C64>::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let idx = i * m + j;
            let rv = RemainderValue { r: rem.r[idx], r_delta: rem.r_delta[idx], r_v: rem.r_v[idx] };
            let (a, b) = log_split(p, &geo[i], &geo[j], &rv);
            let (aa, bb) = periodic_split(geo[i].s - geo[j].s, a, b);
            let mut alpha = grid.h * bb;
            let off = i.abs_diff(j);
            if off < wlog.len() {
                alpha += wlog[off] * aa;
            }
            matrix[(i, j)] = -alpha;
        }
        matrix[(i, i)] += C64::new(1.0, 0.0);
    }
    let rhs = grid.nodes.iter().map(|&t| p.rhs(t)).collect::<Result<Vec<_>>>()?;
    Ok(LinearSystem { matrix, rhs: DVector::from_vec(rhs), kind: p.kind, grid: grid.clone() })
}

#[derive(Debug, Clone)]
pub struct DensitySolution {
    pub grid: Grid,
    pub values: Vec<C64>,
    pub problem_kind: ProblemKind,
    pub residual_norm: f64,
    pub condition_estimate: f64,
}

fn one_norm(v: &DVector<C64>) -> f64 {
    v.iter().map(|z| z.norm()).sum()
}

/// Hager–Higham estimate of ‖A⁻¹‖₁ from the LU factors.
fn inverse_one_norm(lu: &nalgebra::LU<C64, nalgebra::Dyn, nalgebra::Dyn>, n: usize) -> f64 {
    let l = lu.l();
    let u = lu.u();
    let p = lu.p();
    let solve = |b: &DVector<C64>| lu.solve(b).unwrap_or_else(|| DVector::from_element(n, C64::new(f64::INFINITY, 0.0)));
    // A = PᵀLU, so A^H x = b is U^H L^H P x = b.
    let solve_adj = |b: &DVector<C64>| {
        let w = u.ad_solve_upper_triangular(b).unwrap_or_else(|| b.clone());
        let mut z = l.ad_solve_lower_triangular(&w).unwrap_or(w);
        p.inv_permute_rows(&mut z);
        z
    };
    let mut x = DVector::from_element(n, C64::new(1.0 / n as f64, 0.0));
    let mut est = 0.0f64;
    for it in 0..5 {
        let y = solve(&x);
        let ny = one_norm(&y);
        if it > 0 && ny <= est {
            break;
        }
        est = ny;
        let xi = y.map(|z| if z.norm() > 0.0 { z / z.norm() } else { C64::new(1.0, 0.0) });
        let z = solve_adj(&xi);
        let (jmax, zmax) = z.iter().enumerate().fold((0, 0.0f64), |acc, (j, v)| if v.norm() > acc.1 { (j, v.norm()) } else { acc });
        let ztx: C64 = z.iter().zip(x.iter()).map(|(a, b)| a.conj() * b).sum();
        if it > 0 && zmax <= ztx.re {
            break;
        }
        x.fill(C64::new(0.0, 0.0));
        x[jmax] = C64::new(1.0, 0.0);
    }
    // alternating test vector guards against the iteration stalling
    if n > 1 {
        let alt = DVector::from_fn(n, |i, _| {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            C64::new(s * (1.0 + i as f64 / (n - 1) as f64), 0.0)
        });
        let y = solve(&alt);
        est = est.max(2.0 * one_norm(&y) / (3.0 * n as f64));
    }
    est
}

fn matrix_one_norm(a: &DMatrix<C64>) -> f64 {
    a.column_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Dense LU solve with condition estimate and residual check.
pub fn solve(system: &LinearSystem) -> Result<DensitySolution> {
    let n = system.matrix.nrows();
    if n != system.matrix.ncols() || n != system.rhs.len() || n != system.grid.len() {
        return Err(Error::Solver(format!(
            "system dimensions disagree: {}x{} matrix, {} rhs, {} nodes",
            system.matrix.nrows(),
            system.matrix.ncols(),
            system.rhs.len(),
            system.grid.len()
        )));
    }
    let anorm = matrix_one_norm(&system.matrix);
    let lu = system.matrix.clone().lu();
    let psi = lu
        .solve(&system.rhs)
        .ok_or_else(|| Error::Solver("collocation matrix is singular".into()))?;
    let cond = anorm * inverse_one_norm(&lu, n);
    if !(cond <= COND_LIMIT) {
        return Err(Error::Solver(format!("collocation matrix ill-conditioned (estimate {cond:.3e})")));
    }
    let res = &system.matrix * &psi - &system.rhs;
    let residual_norm = res.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let scale = system.rhs.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if !(residual_norm <= RESIDUAL_LIMIT * scale) {
        return Err(Error::Solver(format!("residual {residual_norm:.3e} exceeds {RESIDUAL_LIMIT:e}")));
    }
    Ok(DensitySolution {
        grid: system.grid.clone(),
        values: psi.iter().copied().collect(),
        problem_kind: system.kind,
        residual_norm,
        condition_estimate: cond,
    })
}

/// Assemble and solve.
pub fn solve_problem(p: &BoundaryProblem, grid: &Grid) -> Result<DensitySolution> {
    solve(&assemble(p, grid)?)
}

/// (K_Nψ)(s) = Σ_j α_j(s)ψ_j at an arbitrary s, with the remainder
/// evaluated pointwise.
pub fn apply_kernel(p: &BoundaryProblem, sol: &DensitySolution, s: f64) -> Result<C64> {
    if sol.problem_kind != p.kind {
        return Err(Error::Config("density does not belong to this problem".into()));
    }
    let mut acc = C64::new(0.0, 0.0);
    for (&t, &psi) in sol.grid.nodes.iter().zip(&sol.values) {
        let (a, b) = split_entry(p, s, t)?;
        acc += (log_weight(sol.grid.n, s, t) * a + sol.grid.h * b) * psi;
    }
    Ok(acc)
}

/// Nyström interpolant ψ_N(s) = rhs(s) + (K_Nψ)(s); equals the nodal
/// values at the nodes.
pub fn interpolate_density(p: &BoundaryProblem, sol: &DensitySolution, s: f64) -> Result<C64> {
    Ok(p.rhs(s)? + apply_kernel(p, sol, s)?)
}

impl DensitySolution {
    /// CSV with columns j, t_j, re, im. `header` lines are written as
    /// `#` comments first.
    pub fn write_csv(&self, path: &Path, header: &[String]) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        for h in header {
            writeln!(w, "# {h}")?;
        }
        writeln!(w, "j,t_j,re,im")?;
        for (j, (t, v)) in self.grid.nodes.iter().zip(&self.values).enumerate() {
            writeln!(w, "{j},{t:.17e},{:.17e},{:.17e}", v.re, v.im)?;
        }
        w.flush()?;
        Ok(())
    }
}
