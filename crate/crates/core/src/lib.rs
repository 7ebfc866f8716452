//! Normalized critical points of the Kirchhoff energy
//!
//! ```text
//! E(u) = (a/2)∫|∇u|² + (b/4)(∫|∇u|²)² - (1/(p+2))∫|u|^{p+2}   on   S_c = {∫u² = c²}
//! ```
//!
//! Every minimizer and mountain pass critical point is a scaling of the
//! radial ground state Q, so the problem reduces to the scalar function
//! f_p(t). This crate solves for Q, builds f_p, classifies the regime for any
//! (N, p, a, b, c), and cross-checks every closed form against direct
//! numerics on radial fields.

pub mod classifier;
pub mod error;
pub mod fields;
pub mod ground_state;
pub mod oracle;
pub mod quadrature;
pub mod scalar_reduction;

pub use classifier::{classify, multiplier, Flag, Regime, Verdict};
pub use error::{Error, Result};
pub use fields::{rescale_ground_state, RadialField};
pub use ground_state::{
    compute_norms, solve_ground_state, GroundStateProfile, QNorms, SolverConfig,
};
pub use scalar_reduction::{build_reduction, thresholds, CriticalPoint, Params, ScalarReduction, Thresholds};
