//! Numerical tolerances shared by every computation.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

/// Every threshold used by the library. Unset fields in a config file keep
/// their defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Minimum relative gap `1 − |μ₂|/|μ₁|` for a dominant eigenvalue.
    pub gap_tol: f64,
    /// Smallest admissible overlap modulus between neighboring pure states.
    pub overlap_tol: f64,
    /// Largest admissible lifted flux through a single simplex.
    pub flux_guard: f64,
    /// Distance from the nearest quantized value accepted for an invariant.
    pub quantization_tol: f64,
    pub canon_tol: f64,
    /// Schmidt values below this are dropped.
    pub trunc_tol: f64,
    /// Accuracy required of the unit transfer eigenvalue of a canonical tensor.
    pub eig_tol: f64,
    pub wilson_tol: f64,
    /// Allowed defect `1 − |μ|` when matching `g·A(τ)` with `A(gτ)`.
    pub equiv_tol: f64,
    /// Allowed deviation of `V_g(hτ)V_h(τ)^φ V_gh(τ)†` from a multiple of 1.
    pub prop_tol: f64,
    pub coc_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            gap_tol: 1e-6,
            overlap_tol: 1e-8,
            flux_guard: FRAC_PI_2,
            quantization_tol: 1e-3,
            canon_tol: 1e-10,
            trunc_tol: 1e-12,
            eig_tol: 1e-10,
            wilson_tol: 1e-10,
            equiv_tol: 1e-8,
            prop_tol: 1e-6,
            coc_tol: 1e-8,
        }
    }
}
