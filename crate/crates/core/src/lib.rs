//! Transfer operators, period functions and parabolic cocycles for the Hecke
//! congruence subgroups `Γ₀(p)`, `p` prime.
//!
//! The pieces build on each other:
//!
//! - [`group`]: exact `PSL(2, ℤ)` arithmetic and the generators `T`, `h_k` of `Γ₀(p)`;
//! - [`boundary`]: Möbius action on `P¹(ℝ)`, the weight-`2s` action `τ_s`, intervals;
//! - [`dynamics`]: the boundary map `F` built from `p + 1` sheets;
//! - [`transfer`]: the symbolic `(p+1)×(p+1)` transfer operator `L_s`;
//! - [`function_space`]: Chebyshev-sampled vectors on the sheets and the matrix of `L_s`;
//! - [`spectral`]: scanning for `s` with `L_s f = f` and extracting period functions;
//! - [`cohomology`]: period functions as parabolic cocycles and back;
//! - [`green`]: cocycles from a Maass cusp form via the Green form.

pub mod boundary;
pub mod cheb;
pub mod cohomology;
pub mod dynamics;
pub mod error;
pub mod function_space;
pub mod green;
pub mod group;
pub mod io;
pub mod quad;
pub mod spectral;
pub mod transfer;

pub use boundary::{BoundaryPoint, ExactPoint, FunctionEvaluator, Interval};
pub use dynamics::{build_system, DynamicalSystem};
pub use error::{Error, Result};
pub use function_space::SampledFunctionVector;
pub use group::{GeneratorSet, GroupElement};
pub use transfer::{build_transfer, SymbolicTransferOperator};
