//! Linear solvers for the condensed SPD systems: Jacobi-preconditioned
//! conjugate gradients and, below a size threshold, an envelope Cholesky
//! factorization.

use serde::Serialize;

use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverOptions {
    /// Relative residual target `‖b - A x‖ / ‖b‖`.
    pub rtol: f64,
    /// Iteration cap as a multiple of the system size.
    pub max_iter_factor: usize,
    /// Iterations without a new best residual before giving up.
    pub stagnation_window: usize,
    /// Systems with at most this many unknowns are factored densely.
    pub direct_threshold: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { rtol: 1e-10, max_iter_factor: 10, stagnation_window: 500, direct_threshold: 20_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Cholesky,
    Cg,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveStats {
    pub method: Method,
    pub unknowns: usize,
    pub iterations: usize,
    pub relative_residual: f64,
    /// Relative residual after every CG iteration (empty for direct solves).
    #[serde(skip)]
    pub history: Vec<f64>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn solve(a: &CsrMatrix, b: &[f64], opts: &SolverOptions) -> Result<(Vec<f64>, SolveStats)> {
    if a.dim() <= opts.direct_threshold {
        cholesky(a, b)
    } else {
        cg(a, b, opts)
    }
}

/// Reverse Cuthill-McKee ordering; `perm[new] = old`.
pub fn rcm_order(a: &CsrMatrix) -> Vec<usize> {
    let n = a.dim();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).count()).collect();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&i| (degree[i], i));
    for &start in &by_degree {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let head = order.len();
        order.push(start);
        let mut q = head;
        while q < order.len() {
            let v = order[q];
            q += 1;
            let mut next: Vec<usize> = a.row(v).map(|(j, _)| j).filter(|&j| !seen[j]).collect();
            next.sort_by_key(|&j| (degree[j], j));
            for j in next {
                seen[j] = true;
                order.push(j);
            }
        }
    }
    order.reverse();
    order
}

/// Envelope Cholesky after a bandwidth-reducing reordering.
pub fn cholesky(a: &CsrMatrix, b: &[f64]) -> Result<(Vec<f64>, SolveStats)> {
    let n = a.dim();
    let perm = rcm_order(a);
    let mut inv = vec![0usize; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    // first[i]: leftmost column of row i in the permuted lower triangle
    let mut first: Vec<usize> = (0..n).collect();
    for old in 0..n {
        let i = inv[old];
        for (j, _) in a.row(old) {
            first[i] = first[i].min(inv[j]);
        }
    }
    let mut start = vec![0usize; n + 1];
    for i in 0..n {
        start[i + 1] = start[i] + (i - first[i] + 1);
    }
    let mut env = vec![0.0; start[n]];
    for old in 0..n {
        let i = inv[old];
        for (jold, v) in a.row(old) {
            let j = inv[jold];
            if j <= i {
                env[start[i] + j - first[i]] = v;
            }
        }
    }
    for i in 0..n {
        let fi = first[i];
        for j in fi..=i {
            let fj = first[j];
            let k0 = fi.max(fj);
            let mut s = env[start[i] + j - fi];
            let ri = start[i] + k0 - fi;
            let rj = start[j] + k0 - fj;
            for k in 0..(j - k0) {
                s -= env[ri + k] * env[rj + k];
            }
            if j < i {
                s /= env[start[j + 1] - 1];
                env[start[i] + j - fi] = s;
            } else {
                if !(s > 0.0) {
                    return Err(Error::Indefinite { step: i, value: s });
                }
                env[start[i + 1] - 1] = s.sqrt();
            }
        }
    }
    let mut y: Vec<f64> = perm.iter().map(|&old| b[old]).collect();
    for i in 0..n {
        let fi = first[i];
        let mut s = y[i];
        for j in fi..i {
            s -= env[start[i] + j - fi] * y[j];
        }
        y[i] = s / env[start[i + 1] - 1];
    }
    for i in (0..n).rev() {
        y[i] /= env[start[i + 1] - 1];
        let yi = y[i];
        let fi = first[i];
        for j in fi..i {
            y[j] -= env[start[i] + j - fi] * yi;
        }
    }
    let mut x = vec![0.0; n];
    for (new, &old) in perm.iter().enumerate() {
        x[old] = y[new];
    }
    let r: Vec<f64> = a.mul(&x).iter().zip(b).map(|(ax, bi)| bi - ax).collect();
    let bn = norm(b);
    let rel = if bn > 0.0 { norm(&r) / bn } else { norm(&r) };
    Ok((x, SolveStats { method: Method::Cholesky, unknowns: n, iterations: 0, relative_residual: rel, history: vec![] }))
}

pub fn cg(a: &CsrMatrix, b: &[f64], opts: &SolverOptions) -> Result<(Vec<f64>, SolveStats)> {
    let n = a.dim();
    let mut x = vec![0.0; n];
    let bn = norm(b);
    if bn == 0.0 {
        return Ok((x, SolveStats { method: Method::Cg, unknowns: n, iterations: 0, relative_residual: 0.0, history: vec![] }));
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .into_iter()
        .enumerate()
        .map(|(i, d)| if d > 0.0 { Ok(1.0 / d) } else { Err(Error::Indefinite { step: i, value: d }) })
        .collect::<Result<_>>()?;
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut history = Vec::new();
    let (mut best, mut best_at) = (f64::INFINITY, 0usize);
    let max_iter = opts.max_iter_factor.saturating_mul(n).max(1);
    for it in 1..=max_iter {
        a.mul_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::Indefinite { step: it, value: pap });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rel = norm(&r) / bn;
        history.push(rel);
        if rel <= opts.rtol {
            return Ok((x, SolveStats { method: Method::Cg, unknowns: n, iterations: it, relative_residual: rel, history }));
        }
        if rel < best {
            best = rel;
            best_at = it;
        } else if it - best_at >= opts.stagnation_window {
            return Err(Error::SolverStagnation { iterations: it, history });
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let residual = history.last().copied().unwrap_or(1.0);
    Err(Error::SolverNotConverged { iterations: max_iter, rtol: opts.rtol, residual, history })
}
