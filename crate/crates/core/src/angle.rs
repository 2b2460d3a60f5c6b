//! Helpers for angles on the circle.

use std::f64::consts::{PI, TAU};

/// Reduces `theta` into `[0, 2π)`.
pub fn wrap_tau(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    // rem_euclid can return TAU itself for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Reduces `theta` into `(-π, π]`.
pub fn wrap_pi(theta: f64) -> f64 {
    let r = wrap_tau(theta);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Distance between two angles along the circle.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    wrap_pi(a - b).abs()
}

/// Maps an angle on the circle to its mirror image in `[0, π]`.
///
/// Valid whenever only `cos θ` enters the probabilities.
pub fn fold_to_half_turn(theta: f64) -> f64 {
    let r = wrap_tau(theta);
    if r > PI {
        TAU - r
    } else {
        r
    }
}
