//! Every operator of the laboratory behind one composable interface:
//! smooth-scale convolutions `Q_s`, dyadic frequency filters `S_l`, rough
//! dyadic convolutions `W_{Ω,j}`, the commutator itself by direct
//! principal-value summation and by dyadic FFT assembly, mollified kernels
//! `H_l` with their defect pieces, iterated commutators `[a, U]^k`, and
//! adjoints for all of them.
//!
//! Conventions:
//!
//! * The direct summation path is the oracle for every faster path. It
//!   shares its displacement kernel table with the convolution paths, so
//!   oracle comparisons test the assembly (dense sum vs FFT), while the
//!   kernel tables themselves are validated against radial quadrature in
//!   [`crate::dyadic`].
//! * Mollification acts spectrally: `K_j ∗ ω_{j-l}` is the multiplier
//!   `K̂_j(ξ) · ω̂(2^{j-l}ξ)` with the mollifier's tabulated radial
//!   transform. A sampled mollifier collapses to the discrete delta once
//!   its support drops under the grid scale, which would freeze the
//!   approximation ladder; the spectral form keeps every stage active and
//!   preserves kernel mass exactly (`ω̂(0) = 1`).

use rayon::prelude::*;

use crate::angular::AngularKernel;
use crate::dyadic::{self, CutoffFlavor, DyadicKernel};
use crate::error::{LabError, Result};
use crate::grid::{apply_multiplier, convolve, BoxGrid, GridFunction, SpectralFunction, C64};
use crate::symbol::LipschitzSymbol;
use crate::windows::WindowFamily;

/// Largest grid the `O(n⁴)` direct summation accepts.
pub const DIRECT_MAX_N: usize = 96;

fn binomial(k: u32, i: u32) -> f64 {
    let mut acc = 1.0f64;
    for t in 0..i {
        acc = acc * (k - t) as f64 / (t + 1) as f64;
    }
    acc
}

// ---------------------------------------------------------------------------
// Q_s: convolution with the rescaled mean-zero wavelet
// ---------------------------------------------------------------------------

/// Sampled kernel of `Q_s`: `ψ_s(x) = s^{-2} ψ(|x|/s)`, discretely
/// mean-corrected (a multiple of the unit bump on the same support is
/// subtracted) so the lattice sum is exactly zero.
pub fn wavelet_kernel(grid: BoxGrid, s: f64, w: &WindowFamily) -> Result<GridFunction> {
    check_wavelet_scale(&grid, s)?;
    let inv = 1.0 / (s * s);
    let mut ker = GridFunction::from_real_fn(grid, |x, y| {
        let r = (x * x + y * y).sqrt() / s;
        inv * w.wavelet(r)
    });
    let carrier = GridFunction::from_real_fn(grid, |x, y| {
        let r = (x * x + y * y).sqrt() / s;
        crate::radial::bump(r)
    });
    let ker_sum: C64 = ker.values().iter().sum();
    let carrier_sum: C64 = carrier.values().iter().sum();
    if carrier_sum.norm() > 0.0 {
        let alpha = ker_sum / carrier_sum;
        for (v, c) in ker.values_mut().iter_mut().zip(carrier.values()) {
            *v -= alpha * c;
        }
    }
    Ok(ker)
}

fn check_wavelet_scale(grid: &BoxGrid, s: f64) -> Result<()> {
    let h = grid.spacing();
    if !(s >= 2.0 * h * (1.0 - 1e-12) && s <= grid.half_width() / 4.0 + 1e-12) {
        return Err(LabError::InvalidArgument(format!(
            "smoothing scale s = {s} outside the resolvable range [{}, {}]",
            2.0 * h,
            grid.half_width() / 4.0
        )));
    }
    Ok(())
}

/// `Q_s f = ψ_s ∗ f`; output has exactly zero lattice mean.
pub fn wavelet_smooth(f: &GridFunction, s: f64, w: &WindowFamily) -> Result<GridFunction> {
    let ker = wavelet_kernel(*f.grid(), s, w)?;
    convolve(f, &ker)
}

// ---------------------------------------------------------------------------
// S_l: dyadic frequency-annulus filter
// ---------------------------------------------------------------------------

/// Result of a band filter, flagging bands that miss the dual lattice.
#[derive(Debug, Clone)]
pub struct BandFiltered {
    pub value: GridFunction,
    pub band_empty: bool,
}

/// Multiplier `ϖ(2^{-l}|ξ|)` on the dual lattice.
pub fn band_multiplier(grid: BoxGrid, l: i32, w: &WindowFamily) -> SpectralFunction {
    let scale = 2f64.powi(-l);
    SpectralFunction::from_radial_symbol(grid, |rho| w.band(scale * rho))
}

/// `S_l f`: spectral application of the band window; empty bands return
/// zero with the flag set.
pub fn dyadic_band_filter(f: &GridFunction, l: i32, w: &WindowFamily) -> Result<BandFiltered> {
    let m = band_multiplier(*f.grid(), l, w);
    let band_empty = m.sup_abs() == 0.0;
    let value = if band_empty {
        GridFunction::zeros(*f.grid())
    } else {
        apply_multiplier(f, &m)?
    };
    Ok(BandFiltered { value, band_empty })
}

/// Range of `l` whose band window meets the nonzero dual lattice.
pub fn resolvable_bands(grid: &BoxGrid, w: &WindowFamily) -> (i32, i32) {
    let lo_guess = (grid.freq_step().log2() - 3.0).floor() as i32;
    let hi_guess = ((grid.nyquist() * std::f64::consts::SQRT_2).log2() + 3.0).ceil() as i32;
    let mut l_min = None;
    let mut l_max = None;
    for l in lo_guess..=hi_guess {
        if band_multiplier(*grid, l, w).sup_abs() > 0.0 {
            if l_min.is_none() {
                l_min = Some(l);
            }
            l_max = Some(l);
        }
    }
    (l_min.unwrap_or(0), l_max.unwrap_or(-1))
}

// ---------------------------------------------------------------------------
// W_{Ω,j}: rough dyadic convolution (smooth flavor, first-order context)
// ---------------------------------------------------------------------------

/// Convolution with `Ω(x/|x|) |x|^{-d-1} φ_j(x)` (smooth dyadic cutoff).
pub fn rough_band_apply(
    f: &GridFunction,
    j: i32,
    omega: &AngularKernel,
) -> Result<GridFunction> {
    let piece = DyadicKernel::build(omega, j, CutoffFlavor::Smooth, *f.grid(), 1)?;
    convolve(f, piece.grid_function())
}

// ---------------------------------------------------------------------------
// Sharp kernel windows and the commutator paths
// ---------------------------------------------------------------------------

/// Union of the sharp dyadic pieces over `j ∈ [j_min, j_max]`, assembled by
/// summation so that disjoint subranges add exactly.
pub fn sharp_window_kernel(
    omega: &AngularKernel,
    k: u32,
    j_min: i32,
    j_max: i32,
    grid: BoxGrid,
) -> Result<GridFunction> {
    if j_min > j_max {
        return Err(LabError::EmptyParameters(format!(
            "empty dyadic range [{j_min}, {j_max}]"
        )));
    }
    let mut acc = GridFunction::zeros(grid);
    for j in j_min..=j_max {
        let piece = DyadicKernel::build(omega, j, CutoffFlavor::Sharp, grid, k)?;
        acc = acc.add(piece.grid_function())?;
    }
    Ok(acc)
}

/// Dense commutator summation with a displacement kernel table:
/// `out(x) = h² Σ_y κ(x−y) (a(x)−a(y))^k f(y)`, the `(a(x)−a(y))^k` factor
/// evaluated directly (no binomial splitting), one row per parallel task.
pub fn dense_commutator_sum(
    table: &GridFunction,
    a: &LipschitzSymbol,
    k: u32,
    f: &GridFunction,
) -> Result<GridFunction> {
    let grid = *f.grid();
    if table.grid() != &grid || a.grid() != &grid {
        return Err(LabError::GridMismatch("dense sum inputs on different grids".into()));
    }
    let n = grid.n();
    if n > DIRECT_MAX_N {
        return Err(LabError::GridTooLarge { n, max_n: DIRECT_MAX_N });
    }
    let h2 = grid.spacing() * grid.spacing();
    let kernel: Vec<f64> = table.values().iter().map(|v| v.re).collect();
    let sym = a.values();
    let fv = f.values();
    let half = (n / 2) as isize;
    let ki = k as i32;

    let mut out = vec![C64::default(); n * n];
    out.par_chunks_mut(n).enumerate().for_each(|(xy, row)| {
        for (xx, slot) in row.iter_mut().enumerate() {
            let ax = sym[xy * n + xx];
            let mut acc = C64::default();
            for yy in 0..n {
                let dy = xy as isize - yy as isize;
                let kyi = dy + half;
                if kyi < 0 || kyi >= n as isize {
                    continue;
                }
                let krow = (kyi as usize) * n;
                let frow = yy * n;
                for yx in 0..n {
                    let dx = xx as isize - yx as isize;
                    let kxi = dx + half;
                    if kxi < 0 || kxi >= n as isize {
                        continue;
                    }
                    let kv = kernel[krow + kxi as usize];
                    if kv == 0.0 {
                        continue;
                    }
                    let diff = ax - sym[frow + yx];
                    acc += fv[frow + yx] * (kv * diff.powi(ki));
                }
            }
            *slot = acc * h2;
        }
    });
    GridFunction::from_values(grid, out)
}

/// Direct principal-value summation of the commutator (the oracle path):
/// symmetric lattice truncation at radius `2^{j_min-1}`, optional upper
/// window edge `2^{j_max}` to match a dyadic assembly exactly.
pub fn commutator_direct(
    omega: &AngularKernel,
    a: &LipschitzSymbol,
    k: u32,
    f: &GridFunction,
    j_min: i32,
    j_max: Option<i32>,
) -> Result<GridFunction> {
    let grid = *f.grid();
    let n = grid.n();
    if n > DIRECT_MAX_N {
        return Err(LabError::GridTooLarge { n, max_n: DIRECT_MAX_N });
    }
    let (lo, _) = dyadic::resolvable_range(&grid);
    if j_min < lo {
        return Err(LabError::UnresolvableScale { j: j_min, j_min: lo, j_max: i32::MAX });
    }
    let r_lo = 2f64.powi(j_min - 1);
    let r_hi = j_max.map_or(f64::INFINITY, |j| 2f64.powi(j));
    let table = dyadic::sharp_window(omega, k, r_lo, r_hi, grid);
    dense_commutator_sum(&table, a, k, f)
}

/// Dyadic FFT assembly of the commutator over `j ∈ [j_min, j_max]`:
/// binomial expansion turns the window kernel into `k+1` convolutions.
pub fn commutator_dyadic(
    omega: &AngularKernel,
    a: &LipschitzSymbol,
    k: u32,
    f: &GridFunction,
    j_min: i32,
    j_max: i32,
) -> Result<GridFunction> {
    let kernel = sharp_window_kernel(omega, k, j_min, j_max, *f.grid())?;
    binomial_commutator_conv(&kernel, a, k, f)
}

/// `[a, conv(κ)]^k`-style sum `Σ_i C(k,i) a^i · (κ ∗ ((-a)^{k-i} f))`.
pub fn binomial_commutator_conv(
    kernel: &GridFunction,
    a: &LipschitzSymbol,
    k: u32,
    f: &GridFunction,
) -> Result<GridFunction> {
    let grid = *f.grid();
    let mut out = GridFunction::zeros(grid);
    for i in 0..=k {
        let weighted = a.pow_times(f, k - i, true)?;
        let conv = convolve(&weighted, kernel)?;
        let outer = a.pow_times(&conv, i, false)?;
        out = out.add(&outer.scale(C64::new(binomial(k, i), 0.0)))?;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Mollified kernels (spectral mollifier)
// ---------------------------------------------------------------------------

/// Spectra of the sharp dyadic pieces over `j ∈ [j_min, j_max]`, for reuse
/// across mollification stages.
pub fn sharp_piece_spectra(
    omega: &AngularKernel,
    k: u32,
    j_min: i32,
    j_max: i32,
    grid: BoxGrid,
) -> Result<Vec<(i32, SpectralFunction)>> {
    let mut out = Vec::new();
    for j in j_min..=j_max {
        let piece = DyadicKernel::build(omega, j, CutoffFlavor::Sharp, grid, k)?;
        out.push((j, piece.grid_function().forward()?));
    }
    Ok(out)
}

/// `H_l` assembled from precomputed dyadic spectra.
pub fn mollified_kernel_from_spectra(
    spectra: &[(i32, SpectralFunction)],
    l: u32,
    w: &WindowFamily,
    grid: BoxGrid,
) -> Result<GridFunction> {
    if l < 1 {
        return Err(LabError::InvalidArgument("mollification stage l must be >= 1".into()));
    }
    if spectra.is_empty() {
        return Err(LabError::EmptyParameters("no dyadic spectra supplied".into()));
    }
    let mut acc = SpectralFunction::from_symbol(grid, |_, _| C64::default());
    for (j, khat) in spectra {
        let scale = 2f64.powi(j - l as i32);
        let m = SpectralFunction::from_radial_symbol(grid, |rho| w.mollifier_hat(scale * rho));
        let prod = khat.mul_pointwise(&m)?;
        for (slot, v) in acc.coeffs_mut().iter_mut().zip(prod.coeffs()) {
            *slot += v;
        }
    }
    acc.inverse()
}

/// `H_l = Σ_j K_j ∗ ω_{j-l}` realized as `Σ_j K̂_j(ξ) ω̂(2^{j-l}ξ)` on the
/// dual lattice and transformed back; kernel mass is preserved exactly.
pub fn mollified_kernel(
    omega: &AngularKernel,
    k: u32,
    l: u32,
    j_min: i32,
    j_max: i32,
    w: &WindowFamily,
    grid: BoxGrid,
) -> Result<GridFunction> {
    let spectra = sharp_piece_spectra(omega, k, j_min, j_max, grid)?;
    mollified_kernel_from_spectra(&spectra, l, w, grid)
}

/// Spectrum of the mollification defect `μ_{j,l} = K_j − K_j ∗ ω_{j-l}`:
/// `μ̂(ξ) = K̂_j(ξ) · (1 − ω̂(2^{j-l}ξ))`, the defect factor evaluated by
/// its cancellation-free series.
pub fn defect_spectrum(
    omega: &AngularKernel,
    k: u32,
    j: i32,
    l: u32,
    w: &WindowFamily,
    grid: BoxGrid,
) -> Result<SpectralFunction> {
    if l < 1 {
        return Err(LabError::InvalidArgument("defect stage l must be >= 1".into()));
    }
    let piece = DyadicKernel::build(omega, j, CutoffFlavor::Sharp, grid, k)?;
    let khat = piece.grid_function().forward()?;
    let scale = 2f64.powi(j - l as i32);
    let m = SpectralFunction::from_radial_symbol(grid, |rho| w.mollifier_defect(scale * rho));
    khat.mul_pointwise(&m)
}

/// Real-space defect kernel `μ_{j,l}`.
pub fn defect_kernel(
    omega: &AngularKernel,
    k: u32,
    j: i32,
    l: u32,
    w: &WindowFamily,
    grid: BoxGrid,
) -> Result<GridFunction> {
    defect_spectrum(omega, k, j, l, w, grid)?.inverse()
}

// ---------------------------------------------------------------------------
// Composable operator handles
// ---------------------------------------------------------------------------

/// A composable linear operator on one grid, with an adjoint.
#[derive(Debug, Clone)]
pub enum OperatorHandle {
    /// Convolution with a displacement kernel.
    Convolution { kernel: GridFunction },
    /// Spectral multiplier.
    Multiplier { symbol: SpectralFunction },
    /// Iterated commutator `[a, base]^k`.
    Commutator { base: Box<OperatorHandle>, symbol: LipschitzSymbol, order: u32 },
    /// Scalar multiple of another operator.
    Scaled(C64, Box<OperatorHandle>),
    /// Pointwise sum.
    Sum(Vec<OperatorHandle>),
    /// Composition; the last entry is applied first.
    Composition(Vec<OperatorHandle>),
    /// Dense principal-value commutator with a fixed kernel table.
    DirectPv { table: GridFunction, symbol: LipschitzSymbol, order: u32 },
}

impl OperatorHandle {
    pub fn convolution(kernel: GridFunction) -> Self {
        OperatorHandle::Convolution { kernel }
    }

    pub fn multiplier(symbol: SpectralFunction) -> Self {
        OperatorHandle::Multiplier { symbol }
    }

    pub fn commutator(base: OperatorHandle, symbol: LipschitzSymbol, order: u32) -> Self {
        OperatorHandle::Commutator { base: Box::new(base), symbol, order }
    }

    pub fn identity(grid: BoxGrid) -> Self {
        OperatorHandle::Multiplier {
            symbol: SpectralFunction::from_symbol(grid, |_, _| C64::new(1.0, 0.0)),
        }
    }

    pub fn grid(&self) -> &BoxGrid {
        match self {
            OperatorHandle::Convolution { kernel } => kernel.grid(),
            OperatorHandle::Multiplier { symbol } => symbol.grid(),
            OperatorHandle::Commutator { base, .. } => base.grid(),
            OperatorHandle::Scaled(_, op) => op.grid(),
            OperatorHandle::Sum(ops) | OperatorHandle::Composition(ops) => ops[0].grid(),
            OperatorHandle::DirectPv { table, .. } => table.grid(),
        }
    }

    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        match self {
            OperatorHandle::Convolution { kernel } => convolve(f, kernel),
            OperatorHandle::Multiplier { symbol } => apply_multiplier(f, symbol),
            OperatorHandle::Commutator { base, symbol, order } => {
                iterated_commutator(base, symbol, *order, f)
            }
            OperatorHandle::Scaled(c, op) => Ok(op.apply(f)?.scale(*c)),
            OperatorHandle::Sum(ops) => {
                let mut acc = GridFunction::zeros(*f.grid());
                for op in ops {
                    acc = acc.add(&op.apply(f)?)?;
                }
                Ok(acc)
            }
            OperatorHandle::Composition(ops) => {
                let mut cur = f.clone();
                for op in ops.iter().rev() {
                    cur = op.apply(&cur)?;
                }
                Ok(cur)
            }
            OperatorHandle::DirectPv { table, symbol, order } => {
                dense_commutator_sum(table, symbol, *order, f)
            }
        }
    }

    pub fn adjoint(&self) -> OperatorHandle {
        match self {
            OperatorHandle::Convolution { kernel } => OperatorHandle::Convolution {
                kernel: flip_conj(kernel),
            },
            OperatorHandle::Multiplier { symbol } => {
                let mut conj = symbol.clone();
                for c in conj.coeffs_mut() {
                    *c = c.conj();
                }
                OperatorHandle::Multiplier { symbol: conj }
            }
            OperatorHandle::Commutator { base, symbol, order } => {
                let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
                OperatorHandle::Scaled(
                    C64::new(sign, 0.0),
                    Box::new(OperatorHandle::Commutator {
                        base: Box::new(base.adjoint()),
                        symbol: symbol.clone(),
                        order: *order,
                    }),
                )
            }
            OperatorHandle::Scaled(c, op) => {
                OperatorHandle::Scaled(c.conj(), Box::new(op.adjoint()))
            }
            OperatorHandle::Sum(ops) => {
                OperatorHandle::Sum(ops.iter().map(|o| o.adjoint()).collect())
            }
            OperatorHandle::Composition(ops) => {
                OperatorHandle::Composition(ops.iter().rev().map(|o| o.adjoint()).collect())
            }
            OperatorHandle::DirectPv { table, symbol, order } => {
                let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
                OperatorHandle::Scaled(
                    C64::new(sign, 0.0),
                    Box::new(OperatorHandle::DirectPv {
                        table: flip_conj(table),
                        symbol: symbol.clone(),
                        order: *order,
                    }),
                )
            }
        }
    }
}

/// Kernel of the adjoint convolution: `κ̃(x) = conj(κ(-x))`.
///
/// The displacement table covers `[-L, L-h]`; the flip is exact when the
/// kernel vanishes on the extreme `δ = -L` row and column, which holds for
/// every laboratory kernel (all are supported in `|x| ≤ L/2`).
fn flip_conj(kernel: &GridFunction) -> GridFunction {
    let grid = *kernel.grid();
    let n = grid.n();
    let mut out = GridFunction::zeros(grid);
    for iy in 0..n {
        let my = (n - iy) % n;
        for ix in 0..n {
            let mx = (n - ix) % n;
            out.values_mut()[my * n + mx] = kernel.values()[iy * n + ix].conj();
        }
    }
    out
}

/// Iterated commutator `[a, U]^k f = Σ_i C(k,i) a^i U((-a)^{k-i} f)`,
/// an operator identity valid for any linear `U`.
pub fn iterated_commutator(
    base: &OperatorHandle,
    a: &LipschitzSymbol,
    k: u32,
    f: &GridFunction,
) -> Result<GridFunction> {
    let grid = *f.grid();
    let mut out = GridFunction::zeros(grid);
    for i in 0..=k {
        let weighted = a.pow_times(f, k - i, true)?;
        let applied = base.apply(&weighted)?;
        let outer = a.pow_times(&applied, i, false)?;
        out = out.add(&outer.scale(C64::new(binomial(k, i), 0.0)))?;
    }
    Ok(out)
}
