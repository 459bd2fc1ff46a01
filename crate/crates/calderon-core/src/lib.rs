//! Numerical laboratory for rough-kernel singular integral commutators
//! in two dimensions.
//!
//! The crate builds the commutator
//!
//! ```text
//! T f(x) = p.v. ∫ Ω((x−y)/|x−y|) |x−y|^{−d−k} (a(x)−a(y))^k f(y) dy
//! ```
//!
//! on a uniform box grid, where `Ω` is a rough (merely integrable) kernel
//! on the circle with vanishing moments of order `k` and `a` is Lipschitz,
//! together with the dyadic decomposition, smooth-window, and mollified
//! approximation machinery needed to measure the quantitative inequalities
//! that control it: Fourier decay of dyadic pieces, Hörmander-type kernel
//! smoothness, approximation-error decay, square-function bounds, and
//! uniform operator norms.
//!
//! Layering:
//!
//! * [`grid`] — box grids, FFTs, padded linear convolution, `L^p` quadrature;
//! * [`radial`] — 1-D profile machinery (bumps, Hankel transforms);
//! * [`angular`] — rough kernels on the circle, moment projection, the
//!   directional log-integrability functional;
//! * [`windows`] — the four smooth windows and their exact normalizations;
//! * [`dyadic`] — dyadic kernel pieces on the grid;
//! * [`symbol`] — Lipschitz symbols;
//! * [`operator`] — composable operators, commutators, mollified kernels;
//! * [`opnorm`] — operator-norm estimation;
//! * [`harness`] — measured-inequality checkers producing [`BoundReport`]s;
//! * [`testfns`] — seeded probe-function families.
//!
//! Everything is deterministic given (inputs, seed): reductions run in a
//! fixed index order and parallel sweeps write into pre-sized slots, so
//! results are bit-identical for any thread count.

pub mod angular;
pub mod dyadic;
pub mod error;
pub mod grid;
pub mod harness;
pub mod operator;
pub mod opnorm;
pub mod radial;
pub mod symbol;
pub mod testfns;
pub mod windows;

pub use angular::AngularKernel;
pub use dyadic::{CutoffFlavor, DyadicKernel};
pub use error::{LabError, Result};
pub use grid::{BoxGrid, GridFunction, SpectralFunction, C64};
pub use harness::{BoundReport, ReportRow};
pub use operator::OperatorHandle;
pub use symbol::LipschitzSymbol;
pub use windows::WindowFamily;
