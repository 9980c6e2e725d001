//! Standard normal log-CDF and inverse Mills ratio that stay finite deep in
//! the lower tail.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use statrs::function::erf::erfc;

/// Below this argument the continued fraction replaces `erfc`.
const TAIL: f64 = -6.0;

fn log_pdf(t: f64) -> f64 {
    -0.5 * t * t - 0.5 * (2.0 * PI).ln()
}

/// Mills ratio `Φ(-x)/φ(x)` for `x ≥ 6` by a backward continued fraction.
fn mills_ratio(x: f64) -> f64 {
    let mut acc = x;
    for k in (1..=80).rev() {
        acc = x + k as f64 / acc;
    }
    1.0 / acc
}

/// ln Φ(t).
pub fn log_cdf(t: f64) -> f64 {
    if t < TAIL {
        log_pdf(t) + mills_ratio(-t).ln()
    } else if t < 0.0 {
        (0.5 * erfc(-t * FRAC_1_SQRT_2)).ln()
    } else {
        (-0.5 * erfc(t * FRAC_1_SQRT_2)).ln_1p()
    }
}

/// φ(t)/Φ(t), the derivative of ln Φ(t).
pub fn inverse_mills(t: f64) -> f64 {
    if t < TAIL {
        1.0 / mills_ratio(-t)
    } else {
        (log_pdf(t) - log_cdf(t)).exp()
    }
}
