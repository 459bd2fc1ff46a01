//! Seeded probe-function families used by the norm estimators, the
//! checkers, and the test suites. Everything is a pure function of the
//! supplied RNG state, so sweeps are reproducible bit-for-bit.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::grid::{BoxGrid, GridFunction, SpectralFunction, C64};
use crate::windows::WindowFamily;

/// Smooth complex bump with random center (inner quarter box), radius, and
/// amplitude.
pub fn random_bump(grid: BoxGrid, rng: &mut ChaCha8Rng) -> GridFunction {
    let l = grid.half_width();
    let cx = rng.gen_range(-l / 4.0..l / 4.0);
    let cy = rng.gen_range(-l / 4.0..l / 4.0);
    let radius = rng.gen_range(l / 8.0..l / 4.0);
    let amp = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    GridFunction::from_fn(grid, |x, y| {
        let r = ((x - cx).powi(2) + (y - cy).powi(2)).sqrt() / radius;
        amp * crate::radial::bump(r)
    })
}

/// Bump carried to a random lattice frequency below half Nyquist.
pub fn modulated_bump(grid: BoxGrid, rng: &mut ChaCha8Rng) -> GridFunction {
    let base = random_bump(grid, rng);
    let kmax = (grid.n() / 4) as i64;
    let step = grid.freq_step();
    let fx = rng.gen_range(-kmax..=kmax) as f64 * step;
    let fy = rng.gen_range(-kmax..=kmax) as f64 * step;
    let n = grid.n();
    let h = grid.spacing();
    let l = grid.half_width();
    let mut out = base;
    for iy in 0..n {
        let y = -l + iy as f64 * h;
        for ix in 0..n {
            let x = -l + ix as f64 * h;
            let phase = C64::new(0.0, x * fx + y * fy).exp();
            out.values_mut()[iy * n + ix] *= phase;
        }
    }
    out
}

/// Independent complex noise on the inner half box, zero outside.
pub fn noise_inner(grid: BoxGrid, rng: &mut ChaCha8Rng) -> GridFunction {
    let l = grid.half_width();
    let n = grid.n();
    let h = grid.spacing();
    let mut out = GridFunction::zeros(grid);
    for iy in 0..n {
        let y = -l + iy as f64 * h;
        for ix in 0..n {
            let x = -l + ix as f64 * h;
            if x.abs() < l / 2.0 && y.abs() < l / 2.0 {
                out.values_mut()[iy * n + ix] =
                    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
    }
    out
}

/// Noise restricted to the dyadic frequency bands `l ∈ band_range` using
/// the cubed band windows (a partition of unity there), so the spectrum is
/// supported where those bands live and the zero frequency is absent.
pub fn band_limited(
    grid: BoxGrid,
    rng: &mut ChaCha8Rng,
    w: &WindowFamily,
    band_range: std::ops::RangeInclusive<i32>,
) -> GridFunction {
    let noise = noise_inner(grid, rng);
    let mut mask = SpectralFunction::from_symbol(grid, |_, _| C64::default());
    for l in band_range {
        let scale = 2f64.powi(-l);
        let m = SpectralFunction::from_radial_symbol(grid, |rho| {
            let b = w.band(scale * rho);
            b * b * b
        });
        for (slot, c) in mask.coeffs_mut().iter_mut().zip(m.coeffs()) {
            *slot += c;
        }
    }
    crate::grid::apply_multiplier(&noise, &mask).expect("same grid")
}

/// Deterministic mixed probe family.
pub fn probe_family(grid: BoxGrid, seed: u64, count: usize) -> Vec<GridFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| match i % 3 {
            0 => random_bump(grid, &mut rng),
            1 => modulated_bump(grid, &mut rng),
            _ => noise_inner(grid, &mut rng),
        })
        .collect()
}
