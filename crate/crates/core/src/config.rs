use serde::{Deserialize, Serialize};

/// All numeric guards and tolerances used by the evaluation and solving
/// pipeline, collected in one place so runs are reproducible from a config.
///
/// Factors marked `*_factor` are relative to the shortest lattice vector;
/// the rest are relative tolerances against a context-dependent scale.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceConfig {
    /// Laurent series trust radius, as a fraction of the shortest lattice
    /// vector. Arguments outside it are halved and doubled back.
    pub series_radius_factor: f64,
    /// Pole guard radius as a fraction of the shortest lattice vector.
    pub pole_guard_factor: f64,
    /// Target relative accuracy of Weierstrass evaluation away from poles.
    pub wp_accuracy: f64,
    /// Relative tolerance on |wp(z) - x| when inverting wp.
    pub invert_tol: f64,
    /// Relative bound a lifted solution's transcendental residual must meet.
    pub residual_bound: f64,
    /// Cluster radius factor for de-duplicating solutions
    /// (scaled by max(1, |e|_inf)).
    pub dedupe_factor: f64,
    /// Relative threshold below which a float polynomial coefficient is
    /// treated as zero.
    pub coeff_zero: f64,
    /// Relative tolerance for float-mode geometric certificates
    /// (tangency, multiplicity counting).
    pub certificate_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            series_radius_factor: 0.45,
            pole_guard_factor: 1e-6,
            wp_accuracy: 1e-10,
            invert_tol: 1e-9,
            residual_bound: 1e-8,
            dedupe_factor: 1e-6,
            coeff_zero: 1e-10,
            certificate_tol: 1e-9,
        }
    }
}
