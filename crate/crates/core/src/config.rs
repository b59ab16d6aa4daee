//! Global knobs.

use std::sync::OnceLock;

/// Default cap on the Fourier cutoff of products.
pub const DEFAULT_CAP_J: i64 = 64;

static CAP_J: OnceLock<i64> = OnceLock::new();

/// Cap on the Fourier cutoff `J` of trigonometric-polynomial products.
///
/// Products grow `J` additively; coefficients beyond the cap are dropped
/// and the result is flagged as truncated. Override with the environment
/// variable `WRESLAB_CAP_J` (read once per process).
pub fn cap_j() -> i64 {
    *CAP_J.get_or_init(|| {
        std::env::var("WRESLAB_CAP_J")
            .ok()
            .and_then(|v| v.parse::<i64>().ok())
            .filter(|&v| v > 0)
            .unwrap_or(DEFAULT_CAP_J)
    })
}

/// Per-operation tolerance used by float-mode structural checks.
pub const FLOAT_OP_TOL: f64 = 1e-12;
