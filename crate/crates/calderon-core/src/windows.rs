//! The four smooth radial windows and their exact normalizations:
//!
//! * `plateau` — `φ(r) = 1` for `r ≤ 1`, `0` for `r ≥ 2`, monotone; its
//!   dyadic differences `φ(2^{-j}r) − φ(2^{-j+1}r)` tile `(0, ∞)`;
//! * `wavelet` — `ψ`, radial, mean zero, supported in the unit ball,
//!   normalized so `∫₀^∞ ψ̂(s)⁴ ds/s = 1` (reproducing normalization);
//! * `band` — `ϖ`, supported in the annulus `1/4 ≤ ρ ≤ 4`, pointwise
//!   normalized so `Σ_l ϖ³(2^{-l}ρ) = 1` for every `ρ > 0`;
//! * `mollifier` — `ω`, support radius `≤ 1/4`, unit mass, vanishing
//!   moments of orders `1..=k`. Nonnegative for `k = 1`; for `k ≥ 2`
//!   vanishing second moments force a signed profile (a nested-bump
//!   combination solving the radial moment system).
//!
//! Radial Fourier transforms of `ψ` and `ω` are assembled from the shared
//! unit-bump Hankel table, with a cancellation-free small-argument series
//! for the mollifier defect `1 − ω̂`.

use crate::error::{LabError, Result};
use crate::radial::{self, RadialFourier};

/// Largest moment order the nested-bump mollifier system is built for.
const MAX_MOMENT_ORDER: u32 = 8;

/// Smooth window family for moment order `k`.
#[derive(Debug, Clone)]
pub struct WindowFamily {
    k: u32,
    wavelet_norm: f64,
    /// (coefficient, radius) of each nested bump making up the mollifier.
    mollifier_parts: Vec<(f64, f64)>,
}

impl WindowFamily {
    pub fn new(k: u32) -> Result<Self> {
        if k < 1 {
            return Err(LabError::InvalidArgument("window family needs k >= 1".into()));
        }
        if k > MAX_MOMENT_ORDER {
            return Err(LabError::MomentSystem { k });
        }
        let wavelet_norm = solve_wavelet_norm();
        let mollifier_parts = solve_mollifier_parts(k)?;
        Ok(WindowFamily { k, wavelet_norm, mollifier_parts })
    }

    pub fn moment_order(&self) -> u32 {
        self.k
    }

    /// `φ(r)`: 1 on `[0, 1]`, 0 on `[2, ∞)`, smooth monotone transition.
    pub fn plateau(&self, r: f64) -> f64 {
        radial::plateau(r)
    }

    /// Dyadic annulus profile `φ(r) − φ(2r)`, supported in `[1/2, 2]`.
    pub fn annulus(&self, r: f64) -> f64 {
        radial::plateau(r) - radial::plateau(2.0 * r)
    }

    /// Mean-zero wavelet profile `ψ(r)`, supported in `r < 1`.
    pub fn wavelet(&self, r: f64) -> f64 {
        self.wavelet_norm * radial::laplacian_bump(r)
    }

    /// Radial transform `ψ̂(ρ)` (transform of the Laplacian picks up `−ρ²`).
    pub fn wavelet_hat(&self, rho: f64) -> f64 {
        -self.wavelet_norm * rho * rho * RadialFourier::unit_bump().hat(rho)
    }

    /// `max_ρ |ψ̂(ρ)|`, scanned on the transform table.
    pub fn wavelet_hat_max(&self) -> f64 {
        let mut best = 0.0f64;
        let mut rho = 0.0;
        while rho <= 320.0 {
            best = best.max(self.wavelet_hat(rho).abs());
            rho += 0.01;
        }
        best
    }

    /// `∫₀^∞ ψ̂(s)⁴ ds/s` recomputed on a log-spaced mesh with `refine`
    /// times the base panel count; equals 1 by the choice of normalization.
    pub fn reproducing_integral(&self, refine: usize) -> f64 {
        reproducing_integral_for(self.wavelet_norm, refine.max(1))
    }

    /// Frequency-annulus profile `ϖ(ρ)`, supported in `1/4 ≤ ρ ≤ 4`,
    /// with `Σ_l ϖ³(2^{-l}ρ) = 1` pointwise for `ρ > 0`.
    pub fn band(&self, rho: f64) -> f64 {
        if rho <= 0.0 {
            return 0.0;
        }
        let t = rho.log2();
        let raw = radial::bump(t / 2.0);
        if raw == 0.0 {
            return 0.0;
        }
        raw / band_norm(t).cbrt()
    }

    /// Mollifier profile `ω(r)`; support radius `mollifier_radius()`.
    pub fn mollifier(&self, r: f64) -> f64 {
        let mut acc = 0.0;
        for &(c, radius) in &self.mollifier_parts {
            acc += c * radial::bump(r / radius);
        }
        acc
    }

    pub fn mollifier_radius(&self) -> f64 {
        self.mollifier_parts[0].1
    }

    /// Radial transform `ω̂(ρ)`; `ω̂(0) = 1` exactly.
    pub fn mollifier_hat(&self, rho: f64) -> f64 {
        let rf = RadialFourier::unit_bump();
        let mut acc = 0.0;
        for &(c, radius) in &self.mollifier_parts {
            acc += c * radius * radius * rf.hat(radius * rho);
        }
        acc
    }

    /// `1 − ω̂(ρ)`, evaluated without cancellation; `O(ρ^{k+1})` at zero
    /// (even orders: `ρ²` for `k = 1`, `ρ⁴` for `k ∈ {2, 3}`, ...).
    pub fn mollifier_defect(&self, rho: f64) -> f64 {
        let rf = RadialFourier::unit_bump();
        let mut acc = 0.0;
        for &(c, radius) in &self.mollifier_parts {
            acc += c * radius * radius * rf.defect(radius * rho);
        }
        acc
    }

    /// Continuum radial moment `∫_{R²} |x|^{2m} ω(x) dx = 2π ∫ r^{2m+1} ω(r) dr`.
    pub fn mollifier_radial_moment(&self, m: usize) -> f64 {
        let rf = RadialFourier::unit_bump();
        let mut acc = 0.0;
        for &(c, radius) in &self.mollifier_parts {
            acc += c * radius.powi(2 * m as i32 + 2) * rf.moment(m);
        }
        acc
    }

    /// Multi-index moment `∫ x^γ ω dx` for `γ = (g1, g2)`; odd orders vanish
    /// by symmetry, even orders reduce to radial moments times an angular
    /// factor.
    pub fn mollifier_moment(&self, g1: u32, g2: u32) -> f64 {
        if g1 % 2 == 1 || g2 % 2 == 1 {
            return 0.0;
        }
        let angular = angular_even_moment(g1, g2);
        let m = ((g1 + g2) / 2) as usize;
        // ∫ r^{2m} ω r dr dθ with the angular factor split off
        let radial_part = self.mollifier_radial_moment(m) / (2.0 * std::f64::consts::PI);
        angular * radial_part
    }
}

/// `∫₀^{2π} cos^{g1}θ sin^{g2}θ dθ` for even `g1, g2`.
fn angular_even_moment(g1: u32, g2: u32) -> f64 {
    let mut acc = 0.0;
    let steps = 4096;
    let dt = 2.0 * std::f64::consts::PI / steps as f64;
    for i in 0..steps {
        let t = (i as f64 + 0.5) * dt;
        acc += t.cos().powi(g1 as i32) * t.sin().powi(g2 as i32);
    }
    acc * dt
}

/// `Σ_l bump³((t − l)/2)`: 1-periodic, smooth, bounded below on the reals.
fn band_norm(t: f64) -> f64 {
    let lo = (t - 2.0).ceil() as i64;
    let hi = (t + 2.0).floor() as i64;
    let mut acc = 0.0;
    for l in lo..=hi {
        let b = radial::bump((t - l as f64) / 2.0);
        acc += b * b * b;
    }
    acc
}

fn reproducing_integral_for(norm: f64, refine: usize) -> f64 {
    let rf = RadialFourier::unit_bump();
    // integrand (norm · s² B̂(s))⁴ / s on a log-spaced mesh
    let (s_min, s_max) = (1e-4f64, 320.0f64);
    let panels = 240 * refine;
    let ratio = (s_max / s_min).ln() / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let a = s_min * (ratio * p as f64).exp();
        let b = s_min * (ratio * (p + 1) as f64).exp();
        acc += radial::integrate_gl(
            &mut |s: f64| {
                let hat = norm * s * s * rf.hat(s);
                hat.powi(4) / s
            },
            a,
            b,
            16,
        );
    }
    acc
}

fn solve_wavelet_norm() -> f64 {
    let raw = reproducing_integral_for(1.0, 1);
    raw.powf(-0.25)
}

/// Coefficients of nested bumps with radii `R/2^i` killing the even radial
/// moments `2, 4, ..., 2⌊k/2⌋` while keeping unit mass.
fn solve_mollifier_parts(k: u32) -> Result<Vec<(f64, f64)>> {
    let rf = RadialFourier::unit_bump();
    let base = 0.25f64;
    let conditions = (k / 2) as usize; // moments of order 2m, m = 1..=conditions
    let parts = conditions + 1;
    let radii: Vec<f64> = (0..parts).map(|i| base / 2f64.powi(i as i32)).collect();

    // rows: mass = 1, then each even moment = 0
    let mut a = vec![vec![0.0; parts]; parts];
    let mut rhs = vec![0.0; parts];
    rhs[0] = 1.0;
    for (row, m) in (0..=conditions).enumerate() {
        for (col, &r) in radii.iter().enumerate() {
            a[row][col] = r.powi(2 * m as i32 + 2) * rf.moment(m);
        }
    }
    let coeffs = solve_dense(&mut a, &mut rhs).ok_or(LabError::MomentSystem { k })?;
    Ok(coeffs.into_iter().zip(radii).collect())
}

/// Gaussian elimination with partial pivoting for the tiny moment systems.
fn solve_dense(a: &mut [Vec<f64>], rhs: &mut [f64]) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()
        })?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for c in (row + 1)..n {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}
