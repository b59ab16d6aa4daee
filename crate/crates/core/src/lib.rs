//! Exact pseudodifferential symbol calculus on the circle.
//!
//! The crate works entirely at the symbol level: a classical symbol is a
//! truncated one-step expansion of homogeneous components, each component
//! stored by its values on the two-point co-sphere {ξ = +1, ξ = −1} with
//! matrix-valued trigonometric polynomials as coefficient functions.
//! Arithmetic is exact over Gaussian rationals or approximate over
//! complex doubles, selected through the [`scalar::Scalar`] trait.
//!
//! Main pieces:
//!
//! * [`trig`] — matrix-valued truncated Fourier series on S¹.
//! * [`symbol`] — homogeneous components, classical symbols, composition,
//!   adjoint, left-symbol reduction and change of frame.
//! * [`residue`] — the noncommutative residue density and trace.
//! * [`projection`] — parametrices, idempotent lifting (Newton and contour
//!   quadrature), self-adjointization, spectral projections of first-order
//!   systems.
//! * [`jet`] — matrix jet rings `Mat(k) ⊗ C[t]/(t^N)` with residue traces,
//!   the concrete playground for the projection/trace theorems.
//! * [`cocycle`] — decomposition of sampled transition automorphisms into
//!   scalar and SU(k) parts and extraction of the root-of-unity 2-cocycle.
//! * [`sampling`] — seeded random generators for the experiment batteries.
//! * [`json`] — the JSON schemas used by the CLI and the file formats.

pub mod cocycle;
pub mod config;
pub mod error;
pub mod jet;
pub mod json;
pub mod mat;
pub mod projection;
pub mod residue;
pub mod sampling;
pub mod scalar;
pub mod symbol;
pub mod trig;

pub use error::CoreError;
pub use jet::{MatrixJet, ResidueTraceSpec};
pub use mat::Mat;
pub use scalar::{ExactScalar, FloatScalar, Scalar, C64};
pub use symbol::{ClassicalSymbol, Floor, HomComponent, TwoPointSymbol};
pub use trig::TrigPoly;
