//! Operator-norm estimation.
//!
//! `l2_opnorm_lower` runs power iteration on `adjoint ∘ op` from a seeded
//! start; the reported value is `‖op v‖₂/‖v‖₂` at the final iterate, a
//! certified lower bound on `‖op‖_{2→2}`. `lp_opnorm_sample` maximizes the
//! `L^p` ratio over a seeded probe family (random bumps, modulated bumps,
//! noise, and the lifted `L²` iterate) and is a heuristic lower bound only.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::grid::{GridFunction, C64};
use crate::operator::OperatorHandle;
use crate::testfns;

/// Power-iteration output.
#[derive(Debug, Clone, Copy)]
pub struct NormEstimate {
    /// `‖op v‖/‖v‖` at the final iterate: a lower bound on the norm.
    pub value: f64,
    /// Whether successive Rayleigh quotients met the tolerance.
    pub converged: bool,
    pub iterations: usize,
}

/// Certified lower bound on `‖op‖_{2→2}` by power iteration on
/// `adjoint ∘ op`.
pub fn l2_opnorm_lower(
    op: &OperatorHandle,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<NormEstimate> {
    let (estimate, _) = power_iterate(op, tol, max_iter, seed)?;
    Ok(estimate)
}

/// Power iteration that also returns the final (normalized) iterate.
pub fn power_iterate(
    op: &OperatorHandle,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<(NormEstimate, GridFunction)> {
    let grid = *op.grid();
    let adj = op.adjoint();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = testfns::noise_inner(grid, &mut rng);
    let norm = v.l2_norm();
    if norm == 0.0 {
        return Ok((NormEstimate { value: 0.0, converged: true, iterations: 0 }, v));
    }
    v = v.scale(C64::new(1.0 / norm, 0.0));

    let mut sigma_prev = f64::NAN;
    let mut sigma = 0.0;
    let mut iterations = 0;
    let mut converged = false;
    for it in 0..max_iter {
        iterations = it + 1;
        let av = op.apply(&v)?;
        sigma = av.l2_norm();
        if sigma == 0.0 {
            converged = true;
            break;
        }
        let g = adj.apply(&av)?;
        let gn = g.l2_norm();
        if gn == 0.0 {
            converged = true;
            break;
        }
        v = g.scale(C64::new(1.0 / gn, 0.0));
        if sigma_prev.is_finite() && (sigma - sigma_prev).abs() <= tol * sigma.max(1e-300) {
            converged = true;
            break;
        }
        sigma_prev = sigma;
    }
    Ok((NormEstimate { value: sigma, converged, iterations }, v))
}

/// Heuristic lower bound on `‖op‖_{p→p}`: max `L^p` ratio over the seeded
/// probe family plus the lifted `L²` power iterate.
pub fn lp_opnorm_sample(op: &OperatorHandle, p: f64, trials: usize, seed: u64) -> Result<f64> {
    let grid = *op.grid();
    let mut best = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..trials {
        let f = match t % 3 {
            0 => testfns::random_bump(grid, &mut rng),
            1 => testfns::modulated_bump(grid, &mut rng),
            _ => testfns::noise_inner(grid, &mut rng),
        };
        let denom = f.lp_norm(p)?;
        if denom == 0.0 {
            continue;
        }
        let ratio = op.apply(&f)?.lp_norm(p)? / denom;
        best = best.max(ratio);
    }
    // near-extremizer lifted from the L² iteration
    let (_, v) = power_iterate(op, 1e-6, 40, seed ^ 0x9e37_79b9)?;
    let denom = v.lp_norm(p)?;
    if denom > 0.0 {
        best = best.max(op.apply(&v)?.lp_norm(p)? / denom);
    }
    Ok(best)
}
