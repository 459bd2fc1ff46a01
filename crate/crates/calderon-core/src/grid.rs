//! Uniform box grids, Fourier transforms, padded linear convolution,
//! spectral multipliers, and `L^p` quadrature.
//!
//! The box is `[-L, L)^2` sampled at `n` nodes per axis, `x_i = -L + i h`
//! with `h = 2L/n`. The transform pair is calibrated to the continuum:
//! [`GridFunction::forward`] approximates `∫ f(x) e^{-i x·ξ} dx` by the
//! `h²`-weighted lattice sum, evaluated on the dual lattice
//! `ξ ∈ (π/L)·Z²` up to the Nyquist band, and [`SpectralFunction::inverse`]
//! undoes it exactly. Plancherel then holds to rounding with the natural
//! quadrature weights on each side.
//!
//! Multipliers act on this invertible transform, so multiplier algebra
//! (composition, idempotence) is exact. Convolution instead zero-pads to
//! `pad_factor·n` per axis, which makes it *linear* (never circular) for
//! kernels and data supported in the box: supports of total width `2n`
//! cannot wrap on a `2n`-periodic torus.
//!
//! All reductions (sums, sups, norms) run in fixed index order; results do
//! not depend on caller thread counts.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{LabError, Result};

/// Complex scalar used throughout.
pub type C64 = Complex64;

/// A uniform square grid on the box `[-L, L)^dim`.
///
/// `n` is a power of two and `pad_factor·n` is the FFT length per axis used
/// for linear convolution. Only `dim = 2` is implemented.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxGrid {
    dim: usize,
    n: usize,
    half_width: f64,
    pad_factor: usize,
}

impl BoxGrid {
    /// Two-dimensional grid with `n` nodes per axis on `[-half_width, half_width)`.
    pub fn new(n: usize, half_width: f64, pad_factor: usize) -> Result<Self> {
        Self::with_dim(2, n, half_width, pad_factor)
    }

    /// General constructor; rejects every `dim` except 2 (the only one built).
    pub fn with_dim(dim: usize, n: usize, half_width: f64, pad_factor: usize) -> Result<Self> {
        if dim != 2 {
            return Err(LabError::InvalidArgument(format!(
                "only dim = 2 is implemented, got {dim}"
            )));
        }
        if !n.is_power_of_two() || n < 4 {
            return Err(LabError::InvalidArgument(format!(
                "n must be a power of two >= 4, got {n}"
            )));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(LabError::InvalidArgument(format!(
                "half_width must be positive and finite, got {half_width}"
            )));
        }
        if pad_factor < 2 {
            return Err(LabError::InvalidArgument(format!(
                "pad_factor must be >= 2, got {pad_factor}"
            )));
        }
        Ok(BoxGrid { dim, n, half_width, pad_factor })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn pad_factor(&self) -> usize {
        self.pad_factor
    }

    /// Node spacing `h = 2L/n`; `spacing() * n == 2 * half_width` exactly.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Total number of nodes `n^dim`.
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// FFT length per axis for padded linear convolution.
    pub fn padded_n(&self) -> usize {
        self.pad_factor * self.n
    }

    /// Dual-lattice spacing `π/L`.
    pub fn freq_step(&self) -> f64 {
        std::f64::consts::PI / self.half_width
    }

    /// Largest dual-lattice frequency per axis (Nyquist), `π/h`.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI / self.spacing()
    }

    /// Node position for flat index `idx`.
    pub fn position(&self, idx: usize) -> (f64, f64) {
        let (ix, iy) = (idx % self.n, idx / self.n);
        let h = self.spacing();
        (-self.half_width + ix as f64 * h, -self.half_width + iy as f64 * h)
    }

    /// Flat index from per-axis indices.
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.n + ix
    }

    /// Signed per-axis frequency index for DFT bin `k`.
    pub fn signed_index(&self, k: usize) -> i64 {
        if k < self.n / 2 {
            k as i64
        } else {
            k as i64 - self.n as i64
        }
    }

    /// Dual-lattice frequency for flat spectral index `idx`.
    pub fn frequency(&self, idx: usize) -> (f64, f64) {
        let (kx, ky) = (idx % self.n, idx / self.n);
        let step = self.freq_step();
        (self.signed_index(kx) as f64 * step, self.signed_index(ky) as f64 * step)
    }

    fn check_same(&self, other: &BoxGrid, what: &str) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(LabError::GridMismatch(format!(
                "{what}: {:?} vs {:?}",
                self, other
            )))
        }
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, dir: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(len, dir))
}

/// In-place 2-D FFT of a row-major `len x len` array.
fn fft2(data: &mut [C64], len: usize, dir: FftDirection) {
    debug_assert_eq!(data.len(), len * len);
    let fft = plan(len, dir);
    let mut scratch = vec![C64::default(); fft.get_inplace_scratch_len()];
    for row in data.chunks_exact_mut(len) {
        fft.process_with_scratch(row, &mut scratch);
    }
    // columns: transpose, transform rows, transpose back
    transpose(data, len);
    for row in data.chunks_exact_mut(len) {
        fft.process_with_scratch(row, &mut scratch);
    }
    transpose(data, len);
}

fn transpose(data: &mut [C64], len: usize) {
    for iy in 0..len {
        for ix in (iy + 1)..len {
            data.swap(iy * len + ix, ix * len + iy);
        }
    }
}

/// Complex samples of a function on the nodes of a [`BoxGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: BoxGrid,
    values: Vec<C64>,
}

impl GridFunction {
    pub fn zeros(grid: BoxGrid) -> Self {
        GridFunction { grid, values: vec![C64::default(); grid.len()] }
    }

    /// Sample `f(x, y)` at every node.
    pub fn from_fn(grid: BoxGrid, mut f: impl FnMut(f64, f64) -> C64) -> Self {
        let n = grid.n();
        let h = grid.spacing();
        let l = grid.half_width();
        let mut values = Vec::with_capacity(grid.len());
        for iy in 0..n {
            let y = -l + iy as f64 * h;
            for ix in 0..n {
                let x = -l + ix as f64 * h;
                values.push(f(x, y));
            }
        }
        GridFunction { grid, values }
    }

    /// Real-valued sampling convenience.
    pub fn from_real_fn(grid: BoxGrid, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        Self::from_fn(grid, |x, y| C64::new(f(x, y), 0.0))
    }

    /// Wrap existing values; rejects non-finite entries and length mismatch.
    pub fn from_values(grid: BoxGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(LabError::InvalidArgument(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        let f = GridFunction { grid, values };
        f.validate_finite("from_values")?;
        Ok(f)
    }

    /// Discrete delta: mass 1 concentrated at the origin node (value `1/h²`).
    pub fn delta(grid: BoxGrid) -> Self {
        let mut f = Self::zeros(grid);
        let h = grid.spacing();
        let mid = grid.index(grid.n() / 2, grid.n() / 2);
        f.values[mid] = C64::new(1.0 / (h * h), 0.0);
        f
    }

    pub fn grid(&self) -> &BoxGrid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn validate_finite(&self, context: &'static str) -> Result<()> {
        for (i, v) in self.values.iter().enumerate() {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(LabError::NonFinite { context, index: i });
            }
        }
        Ok(())
    }

    pub fn scale(&self, c: C64) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        self.grid.check_same(&other.grid, "add")?;
        Ok(GridFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.grid.check_same(&other.grid, "sub")?;
        Ok(GridFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Pointwise product with another grid function (used for symbols).
    pub fn mul_pointwise(&self, other: &GridFunction) -> Result<GridFunction> {
        self.grid.check_same(&other.grid, "mul_pointwise")?;
        Ok(GridFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    /// Quadrature inner product `h² Σ f(x) conj(g(x))`.
    pub fn inner(&self, other: &GridFunction) -> Result<C64> {
        self.grid.check_same(&other.grid, "inner")?;
        let h2 = self.grid.spacing() * self.grid.spacing();
        let mut acc = C64::default();
        for (a, b) in self.values.iter().zip(&other.values) {
            acc += a * b.conj();
        }
        Ok(acc * h2)
    }

    /// Riemann-sum mass `h² Σ f(x)`.
    pub fn mass(&self) -> C64 {
        let h2 = self.grid.spacing() * self.grid.spacing();
        let mut acc = C64::default();
        for v in &self.values {
            acc += v;
        }
        acc * h2
    }

    /// Riemann-sum `L^p` norm `(Σ |f|^p h²)^{1/p}`; `p = ∞` gives the max norm.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(LabError::InvalidArgument(format!(
                "lp_norm requires p >= 1 or p = inf, got {p}"
            )));
        }
        if p.is_infinite() {
            return Ok(self.max_abs());
        }
        let h2 = self.grid.spacing() * self.grid.spacing();
        if (p - 2.0).abs() < 1e-14 {
            let mut acc = 0.0;
            for v in &self.values {
                acc += v.norm_sqr();
            }
            return Ok((acc * h2).sqrt());
        }
        let mut acc = 0.0;
        for v in &self.values {
            acc += v.norm().powf(p);
        }
        Ok((acc * h2).powf(1.0 / p))
    }

    pub fn l2_norm(&self) -> f64 {
        self.lp_norm(2.0).expect("p = 2 is valid")
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for v in &self.values {
            let a = v.norm();
            if a > m {
                m = a;
            }
        }
        m
    }

    /// Forward transform: `f̂(ξ) = h² Σ_x f(x) e^{-i x·ξ}` on the dual lattice.
    pub fn forward(&self) -> Result<SpectralFunction> {
        self.validate_finite("fft_forward input")?;
        let n = self.grid.n();
        let h2 = self.grid.spacing() * self.grid.spacing();
        let mut data = self.values.clone();
        fft2(&mut data, n, FftDirection::Forward);
        // e^{-i x_j ξ_k} = (-1)^{k1+k2} e^{-2πi jk/n} since x_j = -L + jh
        for ky in 0..n {
            for kx in 0..n {
                let sign = if (kx + ky) % 2 == 0 { 1.0 } else { -1.0 };
                data[ky * n + kx] *= sign * h2;
            }
        }
        Ok(SpectralFunction { grid: self.grid, coeffs: data })
    }
}

/// Fourier coefficients on the dual lattice `ξ ∈ (π/L)·Z²` of a [`BoxGrid`],
/// restricted to the Nyquist band, stored in DFT bin order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    grid: BoxGrid,
    coeffs: Vec<C64>,
}

impl SpectralFunction {
    pub fn grid(&self) -> &BoxGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [C64] {
        &mut self.coeffs
    }

    /// Build a multiplier symbol by sampling `m(ξ)` on the dual lattice.
    pub fn from_symbol(grid: BoxGrid, mut m: impl FnMut(f64, f64) -> C64) -> Self {
        let n = grid.n();
        let mut coeffs = Vec::with_capacity(grid.len());
        for ky in 0..n {
            for kx in 0..n {
                let (fx, fy) = grid.frequency(ky * n + kx);
                coeffs.push(m(fx, fy));
            }
        }
        SpectralFunction { grid, coeffs }
    }

    /// Radial multiplier `m(|ξ|)`.
    pub fn from_radial_symbol(grid: BoxGrid, mut m: impl FnMut(f64) -> f64) -> Self {
        Self::from_symbol(grid, |fx, fy| C64::new(m((fx * fx + fy * fy).sqrt()), 0.0))
    }

    /// `L²` norm with dual quadrature weights; equals the spatial `L²` norm.
    pub fn l2_norm(&self) -> f64 {
        let mut acc = 0.0;
        for c in &self.coeffs {
            acc += c.norm_sqr();
        }
        let nh = self.grid.n() as f64 * self.grid.spacing();
        acc.sqrt() / nh
    }

    /// Largest coefficient modulus over the dual lattice.
    pub fn sup_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for c in &self.coeffs {
            let a = c.norm();
            if a > m {
                m = a;
            }
        }
        m
    }

    pub fn mul_pointwise(&self, other: &SpectralFunction) -> Result<SpectralFunction> {
        self.grid.check_same(&other.grid, "spectral mul")?;
        Ok(SpectralFunction {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    /// Inverse transform; exact round trip of [`GridFunction::forward`].
    pub fn inverse(&self) -> Result<GridFunction> {
        let n = self.grid.n();
        let h2 = self.grid.spacing() * self.grid.spacing();
        let mut data = self.coeffs.clone();
        for ky in 0..n {
            for kx in 0..n {
                let sign = if (kx + ky) % 2 == 0 { 1.0 } else { -1.0 };
                data[ky * n + kx] *= sign;
            }
        }
        fft2(&mut data, n, FftDirection::Inverse);
        let scale = 1.0 / (h2 * (n * n) as f64);
        for v in data.iter_mut() {
            *v *= scale;
        }
        Ok(GridFunction { grid: self.grid, values: data })
    }
}

/// Linear (non-circular) convolution `(f ∗ ker)(x) ≈ ∫ ker(x−y) f(y) dy`,
/// computed on the zero-padded `pad_factor·n` lattice and restricted back to
/// the box. The kernel is read as a function of displacement; with
/// `pad_factor >= 2` the padded torus is wide enough that no wrap-around can
/// occur for box-supported inputs.
pub fn convolve(f: &GridFunction, ker: &GridFunction) -> Result<GridFunction> {
    f.grid.check_same(&ker.grid, "convolve")?;
    let n = f.grid.n();
    let np = f.grid.padded_n();
    let h2 = f.grid.spacing() * f.grid.spacing();

    let mut fp = vec![C64::default(); np * np];
    for iy in 0..n {
        for ix in 0..n {
            fp[iy * np + ix] = f.values[iy * n + ix];
        }
    }
    let mut kp = vec![C64::default(); np * np];
    let half = (n / 2) as isize;
    for iy in 0..n {
        let dy = (iy as isize - half).rem_euclid(np as isize) as usize;
        for ix in 0..n {
            let dx = (ix as isize - half).rem_euclid(np as isize) as usize;
            kp[dy * np + dx] = ker.values[iy * n + ix];
        }
    }

    fft2(&mut fp, np, FftDirection::Forward);
    fft2(&mut kp, np, FftDirection::Forward);
    for (a, b) in fp.iter_mut().zip(&kp) {
        *a *= b;
    }
    fft2(&mut fp, np, FftDirection::Inverse);

    let scale = h2 / ((np * np) as f64);
    let mut out = Vec::with_capacity(n * n);
    for iy in 0..n {
        for ix in 0..n {
            out.push(fp[iy * np + ix] * scale);
        }
    }
    Ok(GridFunction { grid: f.grid, values: out })
}

/// Apply a spectral multiplier: inverse transform of `m · f̂`.
///
/// Exactly diagonal on the dual lattice, so composition satisfies
/// `apply(m₁) ∘ apply(m₂) = apply(m₁·m₂)` to rounding.
pub fn apply_multiplier(f: &GridFunction, m: &SpectralFunction) -> Result<GridFunction> {
    f.grid.check_same(&m.grid, "apply_multiplier")?;
    let fhat = f.forward()?;
    let prod = fhat.mul_pointwise(m)?;
    prod.inverse()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_function(grid: BoxGrid, rng: &mut ChaCha8Rng) -> GridFunction {
        let values = (0..grid.len())
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        GridFunction { grid, values }
    }

    #[test]
    fn delta_has_constant_modulus_spectrum() {
        let grid = BoxGrid::new(64, 1.0, 2).unwrap();
        let spec = GridFunction::delta(grid).forward().unwrap();
        for c in spec.coeffs() {
            assert!((c.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_matches_closed_form_transform() {
        let grid = BoxGrid::new(256, 1.0, 2).unwrap();
        let sigma = grid.half_width() / 8.0;
        let f = GridFunction::from_real_fn(grid, |x, y| {
            (-(x * x + y * y) / (2.0 * sigma * sigma)).exp()
        });
        let spec = f.forward().unwrap();
        let mut worst = 0.0f64;
        for (idx, c) in spec.coeffs().iter().enumerate() {
            let (fx, fy) = grid.frequency(idx);
            let exact = 2.0 * PI * sigma * sigma
                * (-(sigma * sigma) * (fx * fx + fy * fy) / 2.0).exp();
            worst = worst.max((c - C64::new(exact, 0.0)).norm());
        }
        assert!(worst <= 1e-8, "max pointwise transform error {worst}");
    }

    #[test]
    fn forward_is_linear() {
        let grid = BoxGrid::new(32, 1.0, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = random_function(grid, &mut rng);
        let g = random_function(grid, &mut rng);
        let (alpha, beta) = (C64::new(0.7, -0.2), C64::new(-1.3, 0.4));
        let combo = f.scale(alpha).add(&g.scale(beta)).unwrap().forward().unwrap();
        let fs = f.forward().unwrap();
        let gs = g.forward().unwrap();
        let mut worst = 0.0f64;
        for (i, c) in combo.coeffs().iter().enumerate() {
            worst = worst.max((c - (fs.coeffs()[i] * alpha + gs.coeffs()[i] * beta)).norm());
        }
        let scale = combo.sup_abs().max(1e-300);
        assert!(worst / scale <= 1e-12);
    }

    #[test]
    fn round_trip_is_exact() {
        let grid = BoxGrid::new(64, 2.0, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = random_function(grid, &mut rng);
        let back = f.forward().unwrap().inverse().unwrap();
        let err = f.sub(&back).unwrap().l2_norm() / f.l2_norm();
        assert!(err <= 1e-12);
    }

    #[test]
    fn plancherel_holds_for_random_functions() {
        let grid = BoxGrid::new(32, 1.5, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let f = random_function(grid, &mut rng);
            let spatial = f.l2_norm();
            let spectral = f.forward().unwrap().l2_norm();
            assert!((spatial - spectral).abs() / spatial <= 1e-12);
        }
    }

    #[test]
    fn forward_rejects_non_finite() {
        let grid = BoxGrid::new(16, 1.0, 2).unwrap();
        let mut f = GridFunction::zeros(grid);
        f.values_mut()[3] = C64::new(f64::NAN, 0.0);
        assert!(f.forward().is_err());
    }

    #[test]
    fn convolve_with_delta_is_identity() {
        let grid = BoxGrid::new(64, 1.0, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_function(grid, &mut rng);
        let d = GridFunction::delta(grid);
        let g = convolve(&f, &d).unwrap();
        let err = f.sub(&g).unwrap().l2_norm() / f.l2_norm();
        assert!(err <= 1e-12);
    }

    #[test]
    fn convolve_commutes() {
        let grid = BoxGrid::new(32, 1.0, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        // supported away from the box edge so both orders see the same window
        let f = GridFunction::from_real_fn(grid, |x, y| {
            if x.abs() < 0.4 && y.abs() < 0.4 {
                (x * 3.0).sin() + y
            } else {
                0.0
            }
        });
        let mut g = GridFunction::zeros(grid);
        for iy in 12..20 {
            for ix in 12..20 {
                g.values_mut()[grid.index(ix, iy)] =
                    C64::new(rng.gen_range(-1.0..1.0), 0.0);
            }
        }
        let fg = convolve(&f, &g).unwrap();
        let gf = convolve(&g, &f).unwrap();
        let err = fg.sub(&gf).unwrap().l2_norm() / fg.l2_norm().max(1e-300);
        assert!(err <= 1e-12);
    }

    #[test]
    fn box_convolved_with_itself_is_tent() {
        let grid = BoxGrid::new(128, 1.0, 2).unwrap();
        let h = grid.spacing();
        let m = 16usize;
        let a = (m as f64 + 0.5) * h;
        let ind = GridFunction::from_real_fn(grid, |x, y| {
            if x.abs() <= m as f64 * h + 0.25 * h && y.abs() <= m as f64 * h + 0.25 * h {
                1.0
            } else {
                0.0
            }
        });
        let tent = convolve(&ind, &ind).unwrap();
        let mid = grid.index(grid.n() / 2, grid.n() / 2);
        let peak = tent.values()[mid].re;
        assert!((peak - (2.0 * a) * (2.0 * a)).abs() <= 1e-12);
        // off-peak lattice value matches the product tent exactly
        let off = grid.index(grid.n() / 2 + 5, grid.n() / 2 + 3);
        let expect = (2.0 * a - 5.0 * h) * (2.0 * a - 3.0 * h);
        assert!((tent.values()[off].re - expect).abs() <= 1e-12);
    }

    #[test]
    fn convolution_has_no_wraparound() {
        let grid = BoxGrid::new(64, 1.0, 2).unwrap();
        // both supported in [-L/2, L/2)^2
        let f = GridFunction::from_real_fn(grid, |x, y| {
            if x.abs() < 0.25 && y.abs() < 0.25 {
                1.0
            } else {
                0.0
            }
        });
        let conv = convolve(&f, &f).unwrap();
        let mut leak = 0.0f64;
        for (idx, v) in conv.values().iter().enumerate() {
            let (x, y) = grid.position(idx);
            if x.abs() > 0.5 + grid.spacing() || y.abs() > 0.5 + grid.spacing() {
                leak = leak.max(v.norm());
            }
        }
        assert!(leak <= 1e-12);
    }

    #[test]
    fn convolve_rejects_grid_mismatch() {
        let g1 = BoxGrid::new(32, 1.0, 2).unwrap();
        let g2 = BoxGrid::new(64, 1.0, 2).unwrap();
        let f = GridFunction::zeros(g1);
        let k = GridFunction::zeros(g2);
        assert!(convolve(&f, &k).is_err());
    }

    #[test]
    fn multiplier_identity_and_idempotence() {
        let grid = BoxGrid::new(32, 1.0, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let f = random_function(grid, &mut rng);

        let one = SpectralFunction::from_symbol(grid, |_, _| C64::new(1.0, 0.0));
        let same = apply_multiplier(&f, &one).unwrap();
        assert!(f.sub(&same).unwrap().l2_norm() / f.l2_norm() <= 1e-12);

        // characteristic of a dual half-space: projection, applied twice = once
        let half = SpectralFunction::from_symbol(grid, |fx, _| {
            C64::new(if fx >= 0.0 { 1.0 } else { 0.0 }, 0.0)
        });
        let once = apply_multiplier(&f, &half).unwrap();
        let twice = apply_multiplier(&once, &half).unwrap();
        assert!(once.sub(&twice).unwrap().l2_norm() / once.l2_norm() <= 1e-12);
    }

    #[test]
    fn multiplier_composition_law() {
        let grid = BoxGrid::new(32, 1.0, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let f = random_function(grid, &mut rng);
        let m1 = SpectralFunction::from_symbol(grid, |fx, fy| {
            C64::new((-0.01 * (fx * fx + fy * fy)).exp(), 0.2 * (fx * 0.1).sin())
        });
        let m2 = SpectralFunction::from_symbol(grid, |fx, fy| {
            C64::new(1.0 / (1.0 + 0.05 * (fx * fx + fy * fy)), 0.0)
        });
        let chained = apply_multiplier(&apply_multiplier(&f, &m2).unwrap(), &m1).unwrap();
        let product = apply_multiplier(&f, &m1.mul_pointwise(&m2).unwrap()).unwrap();
        let err = chained.sub(&product).unwrap().l2_norm() / product.l2_norm();
        assert!(err <= 1e-12);
    }

    #[test]
    fn multiplier_agrees_with_convolution_by_its_inverse_transform() {
        // convolution-theorem cross-check: m(ξ) = e^{-|ξ|²} against its
        // real-space kernel (1/4π) e^{-|x|²/4}, on a box wide enough that
        // truncation is negligible.
        let grid = BoxGrid::new(128, 12.0, 2).unwrap();
        let f = GridFunction::from_real_fn(grid, |x, y| {
            (-((x - 0.5) * (x - 0.5) + y * y)).exp()
        });
        let m = SpectralFunction::from_radial_symbol(grid, |rho| (-(rho * rho)).exp());
        let via_multiplier = apply_multiplier(&f, &m).unwrap();
        let ker = GridFunction::from_real_fn(grid, |x, y| {
            (1.0 / (4.0 * PI)) * (-(x * x + y * y) / 4.0).exp()
        });
        let via_convolution = convolve(&f, &ker).unwrap();
        let err = via_multiplier.sub(&via_convolution).unwrap().l2_norm()
            / via_convolution.l2_norm();
        assert!(err <= 1e-8, "cross-check error {err}");
    }

    #[test]
    fn lp_norm_of_single_cell() {
        let grid = BoxGrid::new(32, 1.0, 2).unwrap();
        let mut f = GridFunction::zeros(grid);
        f.values_mut()[5] = C64::new(1.0, 0.0);
        let h = grid.spacing();
        for p in [1.0, 2.0, 3.0, 7.5] {
            let norm = f.lp_norm(p).unwrap();
            assert!((norm - h.powf(2.0 / p)).abs() <= 1e-14);
        }
        assert!((f.lp_norm(f64::INFINITY).unwrap() - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn lp_norm_is_homogeneous() {
        let grid = BoxGrid::new(32, 1.0, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let f = random_function(grid, &mut rng);
        let alpha = C64::new(-2.5, 1.25);
        for p in [1.0, 2.0, 4.0, f64::INFINITY] {
            let lhs = f.scale(alpha).lp_norm(p).unwrap();
            let rhs = alpha.norm() * f.lp_norm(p).unwrap();
            assert!((lhs - rhs).abs() / rhs <= 1e-12);
        }
    }

    #[test]
    fn lp_norm_rejects_p_below_one() {
        let grid = BoxGrid::new(16, 1.0, 2).unwrap();
        let f = GridFunction::zeros(grid);
        assert!(f.lp_norm(0.5).is_err());
    }

    #[test]
    fn gaussian_l2_norm_matches_closed_form() {
        let grid = BoxGrid::new(256, 1.0, 2).unwrap();
        let sigma = grid.half_width() / 8.0;
        let f = GridFunction::from_real_fn(grid, |x, y| {
            (-(x * x + y * y) / (2.0 * sigma * sigma)).exp()
        });
        let exact = (PI * sigma * sigma).sqrt();
        let norm = f.l2_norm();
        assert!((norm - exact).abs() / exact <= 1e-6);
    }

    #[test]
    fn hoelder_inequality_on_random_pairs() {
        let grid = BoxGrid::new(32, 1.0, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for p in [2.0, 3.0, 4.0] {
            let q = p / (p - 1.0);
            for _ in 0..10 {
                let f = random_function(grid, &mut rng);
                let g = random_function(grid, &mut rng);
                let pairing = f.inner(&g).unwrap().norm();
                let bound = f.lp_norm(p).unwrap() * g.lp_norm(q).unwrap();
                assert!(pairing <= bound * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn grid_constructor_validation() {
        assert!(BoxGrid::new(48, 1.0, 2).is_err()); // not a power of two
        assert!(BoxGrid::new(64, -1.0, 2).is_err());
        assert!(BoxGrid::new(64, 1.0, 1).is_err());
        assert!(BoxGrid::with_dim(3, 64, 1.0, 2).is_err());
        let g = BoxGrid::new(64, 1.0, 2).unwrap();
        assert_eq!(g.spacing() * g.n() as f64, 2.0 * g.half_width());
    }
}
