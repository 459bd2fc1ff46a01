//! One-dimensional radial machinery shared by the window and kernel
//! builders: compactly supported `C^∞` profiles, Gauss–Legendre panels,
//! and the tabulated 2-D radial Fourier (Hankel) transform of the unit
//! bump, with a moment series for small arguments where the transform is
//! needed to absolute accuracy near 1.

use std::sync::OnceLock;

/// The standard bump `exp(-1/(1-t²))` on `(-1, 1)`, zero outside.
pub fn bump(t: f64) -> f64 {
    let u = 1.0 - t * t;
    if u <= 1e-12 {
        0.0
    } else {
        (-1.0 / u).exp()
    }
}

/// `C^∞` step: 0 for `t <= 0`, 1 for `t >= 1`, monotone in between.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// Radial plateau: 1 for `r <= 1`, 0 for `r >= 2`, smooth and monotone.
pub fn plateau(r: f64) -> f64 {
    smooth_step(2.0 - r)
}

/// 2-D Laplacian of the unit bump profile, `Δ e^{-1/(1-r²)}`, evaluated at
/// radius `r`. Supported in `r < 1`; used as the mean-zero wavelet profile.
pub fn laplacian_bump(r: f64) -> f64 {
    let u = 1.0 - r * r;
    if u <= 1e-4 {
        // e^{-1/u} underflows long before the rational prefactor matters
        return 0.0;
    }
    let eta = (-1.0 / u).exp();
    let u2 = u * u;
    let r2 = r * r;
    (-4.0 / u2 - 8.0 * r2 / (u2 * u) + 4.0 * r2 / (u2 * u2)) * eta
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // Legendre P_n and its derivative by the Bonnet recurrence
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0, x);
        for k in 2..=n {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static GL: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    GL.get_or_init(|| gauss_legendre(16))
}

fn gl64() -> &'static (Vec<f64>, Vec<f64>) {
    static GL: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    GL.get_or_init(|| gauss_legendre(64))
}

/// Integrate `f` over `[a, b]` with a single Gauss–Legendre rule.
pub fn integrate_gl(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64, order: usize) -> f64 {
    let (nodes, weights) = match order {
        16 => gl16().clone(),
        64 => gl64().clone(),
        _ => gauss_legendre(order),
    };
    let mid = 0.5 * (a + b);
    let rad = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(&weights) {
        acc += w * f(mid + rad * x);
    }
    acc * rad
}

/// Integrate `f` over `[a, b]` split into `panels` equal Gauss–Legendre panels.
pub fn integrate_panels(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    panels: usize,
    order: usize,
) -> f64 {
    let mut acc = 0.0;
    let width = (b - a) / panels as f64;
    for p in 0..panels {
        let lo = a + p as f64 * width;
        acc += integrate_gl(f, lo, lo + width, order);
    }
    acc
}

/// Uniformly tabulated function of one nonnegative variable with cubic
/// (Catmull–Rom) interpolation; reads past the table clamp to `tail`.
#[derive(Debug, Clone)]
pub struct RadialTable {
    step: f64,
    values: Vec<f64>,
    tail: f64,
}

impl RadialTable {
    pub fn build(step: f64, max: f64, mut f: impl FnMut(f64) -> f64) -> Self {
        let count = (max / step).ceil() as usize + 1;
        let values = (0..count).map(|i| f(i as f64 * step)).collect();
        RadialTable { step, values, tail: 0.0 }
    }

    pub fn eval(&self, rho: f64) -> f64 {
        debug_assert!(rho >= 0.0);
        let t = rho / self.step;
        let i = t.floor() as usize;
        if i + 2 >= self.values.len() {
            return self.tail;
        }
        let frac = t - i as f64;
        let pm1 = if i == 0 { self.values[1] } else { self.values[i - 1] };
        let p0 = self.values[i];
        let p1 = self.values[i + 1];
        let p2 = self.values[i + 2];
        let a = 2.0 * p0;
        let b = p1 - pm1;
        let c = 2.0 * pm1 - 5.0 * p0 + 4.0 * p1 - p2;
        let d = -pm1 + 3.0 * p0 - 3.0 * p1 + p2;
        0.5 * (a + b * frac + c * frac * frac + d * frac * frac * frac)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Radial Fourier data of the unit bump on `[0, 1)`:
///
/// `hat(ρ) = 2π ∫₀¹ bump(t) J₀(tρ) t dt`
///
/// together with the even moments `M_{2m} = 2π ∫₀¹ bump(t) t^{2m+1} dt`
/// feeding the alternating small-argument series, which evaluates the
/// defect `hat(0) − hat(ρ)` without cancellation.
#[derive(Debug)]
pub struct RadialFourier {
    moments: Vec<f64>,
    table: RadialTable,
}

const SERIES_CUT: f64 = 1.0;

impl RadialFourier {
    fn build() -> Self {
        let moments: Vec<f64> = (0..10)
            .map(|m| {
                2.0 * std::f64::consts::PI
                    * integrate_gl(&mut |t: f64| bump(t) * t.powi(2 * m + 1), 0.0, 1.0, 64)
            })
            .collect();
        let table = RadialTable::build(0.02, 320.0, |rho| {
            if rho == 0.0 {
                return moments[0];
            }
            // enough panels to resolve the J₀ oscillation at frequency rho
            let panels = 8.max((rho / std::f64::consts::PI).ceil() as usize);
            2.0 * std::f64::consts::PI
                * integrate_panels(
                    &mut |t: f64| bump(t) * libm::j0(t * rho) * t,
                    0.0,
                    1.0,
                    panels,
                    16,
                )
        });
        RadialFourier { moments, table }
    }

    /// Shared instance; the table is built once per process.
    pub fn unit_bump() -> &'static RadialFourier {
        static INSTANCE: OnceLock<RadialFourier> = OnceLock::new();
        INSTANCE.get_or_init(RadialFourier::build)
    }

    /// `2π ∫ bump(t) t^{2m+1} dt`.
    pub fn moment(&self, m: usize) -> f64 {
        self.moments[m]
    }

    /// Transform value `hat(ρ)`.
    pub fn hat(&self, rho: f64) -> f64 {
        let rho = rho.abs();
        if rho <= SERIES_CUT {
            self.moments[0] - self.defect(rho)
        } else {
            self.table.eval(rho)
        }
    }

    /// `hat(0) − hat(ρ)`, stable for small `ρ` where it is `O(ρ²)`.
    pub fn defect(&self, rho: f64) -> f64 {
        let rho = rho.abs();
        if rho <= SERIES_CUT {
            // Σ_{m>=1} (-1)^{m+1} ρ^{2m} M_{2m} / (4^m (m!)²)
            let z = rho * rho / 4.0;
            let mut term = 1.0;
            let mut acc = 0.0;
            for m in 1..self.moments.len() {
                term *= z / ((m * m) as f64);
                let contrib = term * self.moments[m];
                if m % 2 == 1 {
                    acc += contrib;
                } else {
                    acc -= contrib;
                }
            }
            acc
        } else {
            self.moments[0] - self.table.eval(rho)
        }
    }
}
