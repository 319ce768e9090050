//! The semicircular measure, the O(3) ("Batman") measure with density
//! `f(t)/4π` on `[-3, 3]`, and the ear-height parameters.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Value of the density `f`, which has poles at `t = ±1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Density {
    Finite(f64),
    Infinite,
}

impl Density {
    pub fn finite(self) -> Option<f64> {
        match self {
            Density::Finite(v) => Some(v),
            Density::Infinite => None,
        }
    }
}

pub fn density_f(t: f64) -> Density {
    let a = t.abs();
    if a == 1.0 {
        Density::Infinite
    } else if a < 1.0 {
        Density::Finite(((3.0 - t) / (1.0 + t)).sqrt() + ((3.0 + t) / (1.0 - t)).sqrt())
    } else if a < 3.0 {
        Density::Finite(((3.0 - a) / (1.0 + a)).sqrt())
    } else {
        Density::Finite(0.0)
    }
}

fn st_cdf(x: f64) -> f64 {
    (x.asin() + x * (1.0 - x * x).max(0.0).sqrt()) / PI
}

/// `μ_ST([a, b]) = (2/π)∫_a^b √(1-x²) dx` for `0 <= a < b <= 1`.
pub fn mu_st(a: f64, b: f64) -> Result<f64> {
    if !(0.0 <= a && a < b && b <= 1.0) {
        return Err(Error::Interval { lo: a, hi: b, reason: "need 0 <= a < b <= 1" });
    }
    Ok(st_cdf(b) - st_cdf(a))
}

/// `μ_ST` on a sub-interval of `[0, 1]`, allowing empty pieces.
fn st_piece(a: f64, b: f64) -> f64 {
    let (a, b) = (a.clamp(0.0, 1.0), b.clamp(0.0, 1.0));
    if b <= a {
        0.0
    } else {
        st_cdf(b) - st_cdf(a)
    }
}

/// `μ_Bat` on `[a, b] ⊆ [0, 3]`, via the semicircle pieces.
fn bat_nonneg(a: f64, b: f64) -> f64 {
    let outer = st_piece((1.0 + a).sqrt() / 2.0, (1.0 + b.min(3.0)).sqrt() / 2.0);
    let inner = if a < 1.0 {
        st_piece((1.0 - b.min(1.0)).sqrt() / 2.0, (1.0 - a).sqrt() / 2.0)
    } else {
        0.0
    };
    outer + inner
}

/// `μ_Bat([a, b]) = (1/4π)∫_a^b f(t) dt` for `-3 <= a < b <= 3`.
pub fn mu_bat(a: f64, b: f64) -> Result<f64> {
    if !(-3.0 <= a && a < b && b <= 3.0) {
        return Err(Error::Interval { lo: a, hi: b, reason: "need -3 <= a < b <= 3" });
    }
    // f is even: reflect the negative part onto [0, 3].
    let mut total = 0.0;
    if a < 0.0 {
        total += bat_nonneg((-b).max(0.0), -a);
    }
    if b > 0.0 {
        total += bat_nonneg(a.max(0.0), b);
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EarParameters {
    pub t: f64,
    pub delta: f64,
    pub x: f64,
    pub p_min: f64,
}

/// Threshold below which no ear height `T` is guaranteed.
pub fn min_ear_height() -> f64 {
    3f64.sqrt() / (4.0 * PI)
}

/// `δ*(T) = √(16π²T² + 1)/(4π)`, minimizing the prime threshold.
pub fn optimal_delta(t: f64) -> f64 {
    (16.0 * PI * PI * t * t + 1.0).sqrt() / (4.0 * PI)
}

pub fn ear_width(t: f64, delta: f64) -> f64 {
    4.0 / (1.0 + 16.0 * PI * PI * (t + delta).powi(2))
}

/// Constant of the sign-definite discrepancy bound.
pub const SIGN_DEFINITE_CONSTANT: f64 = 55.42;

/// Constant of the general discrepancy bound.
pub const GENERAL_CONSTANT: f64 = 110.84;

pub fn ear_parameters(t: f64, delta: Option<f64>) -> Result<EarParameters> {
    if !(t > min_ear_height()) || !t.is_finite() {
        return Err(Error::Argument(format!("T must exceed √3/(4π) ≈ {:.6}, got {t}", min_ear_height())));
    }
    let delta = delta.unwrap_or_else(|| optimal_delta(t));
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::Argument(format!("delta must be positive, got {delta}")));
    }
    let x = ear_width(t, delta);
    let p_min = (SIGN_DEFINITE_CONSTANT / (x * delta)).powi(4);
    Ok(EarParameters { t, delta, x, p_min })
}
