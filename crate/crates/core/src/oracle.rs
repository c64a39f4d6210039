//! Dense ground truth for small graphs.
//!
//! Two independent routes to the exact HPP matrix `Π = α·Σ_ℓ (1-α)^ℓ P^ℓ`:
//! a truncated series summed by repeated doubling, and a direct LU solve of
//! `Π·(I − (1−α)P) = αI`. Both materialize `P`, which is why they are capped.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;

pub const DEFAULT_ORACLE_CAP: usize = 2000;

/// Exact HPP matrix: `pi[(s, t)] = π(s, t)`.
#[derive(Debug, Clone)]
pub struct DenseHpp {
    pub pi: DMatrix<f64>,
    pub alpha: f64,
    /// Upper bound on the truncation error of any row sum.
    pub bound: f64,
}

/// Dense hidden transition matrix `P = U·V`.
pub fn hidden_transition_matrix(g: &BipartiteGraph) -> DMatrix<f64> {
    let n = g.u_count();
    let mut p = DMatrix::zeros(n, n);
    for ui in 0..n {
        for (v, w) in g.neighbors_u(ui) {
            let forward = w / g.ws_u(ui);
            for (uj, w2) in g.neighbors_v(v) {
                p[(ui, uj)] += forward * w2 / g.ws_v(v);
            }
        }
    }
    p
}

fn check_cap(g: &BipartiteGraph, cap: usize) -> Result<()> {
    if g.u_count() > cap {
        return Err(Error::OracleCapExceeded { cap, actual: g.u_count() });
    }
    Ok(())
}

/// Truncated series with the number of terms `L` chosen so that
/// `(1−α)^L ≤ tol`.
pub fn exact_hpp(g: &BipartiteGraph, alpha: f64, tol: f64) -> Result<DenseHpp> {
    exact_hpp_capped(g, alpha, tol, DEFAULT_ORACLE_CAP)
}

pub fn exact_hpp_capped(g: &BipartiteGraph, alpha: f64, tol: f64, cap: usize) -> Result<DenseHpp> {
    check_cap(g, cap)?;
    if !(alpha > 0.0 && alpha <= 1.0 && tol > 0.0) {
        return Err(Error::InvalidParameter(format!("alpha {alpha}, tol {tol}")));
    }
    let n = g.u_count();
    let a = hidden_transition_matrix(g) * (1.0 - alpha);
    // sum = Σ_{ℓ<terms} A^ℓ, power = A^terms; doubling: S_2k = S_k + A^k·S_k.
    let mut sum = DMatrix::<f64>::identity(n, n);
    let mut power = a;
    let mut terms: u64 = 1;
    let mut tail = 1.0 - alpha;
    while tail > tol {
        sum = &sum + &power * &sum;
        power = &power * &power;
        terms *= 2;
        tail = (1.0 - alpha).powf(terms as f64);
    }
    Ok(DenseHpp { pi: sum * alpha, alpha, bound: tail })
}

/// Solves `Π·(I − (1−α)P) = αI` directly.
pub fn exact_hpp_solve(g: &BipartiteGraph, alpha: f64) -> Result<DenseHpp> {
    check_cap(g, DEFAULT_ORACLE_CAP)?;
    let n = g.u_count();
    let p = hidden_transition_matrix(g);
    // Transpose so the unknown sits on the right: (I − (1−α)Pᵀ)·Πᵀ = αI.
    let m = DMatrix::<f64>::identity(n, n) - p.transpose() * (1.0 - alpha);
    let rhs = DMatrix::<f64>::identity(n, n) * alpha;
    let solved = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::InvalidParameter("singular system".into()))?;
    Ok(DenseHpp { pi: solved.transpose(), alpha, bound: 1e-12 })
}

/// `β(u, u_i) = π(u, u_i) + π(u_i, u)`.
pub fn exact_bhpp(d: &DenseHpp, u: usize) -> Vec<f64> {
    (0..d.pi.nrows()).map(|i| d.pi[(u, i)] + d.pi[(i, u)]).collect()
}

impl DenseHpp {
    pub fn get(&self, s: usize, t: usize) -> f64 {
        self.pi[(s, t)]
    }

    pub fn row(&self, s: usize) -> Vec<f64> {
        self.pi.row(s).iter().copied().collect()
    }

    /// `π(·, t)`.
    pub fn column(&self, t: usize) -> Vec<f64> {
        self.pi.column(t).iter().copied().collect()
    }

    /// `max_i Σ_j π(u_j, u_i)`.
    pub fn max_column_sum(&self) -> f64 {
        self.pi.row_sum().iter().copied().fold(0.0, f64::max)
    }

    /// Tab-separated dump, one row per line, for debugging.
    pub fn dump<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        for r in 0..self.pi.nrows() {
            let row: Vec<String> = self.pi.row(r).iter().map(|x| format!("{x:.17e}")).collect();
            writeln!(out, "{}", row.join("\t"))?;
        }
        Ok(())
    }
}
