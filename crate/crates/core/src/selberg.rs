//! Beurling-Selberg majorants and minorants of interval indicators on
//! `R/Z`, and the explicit-constant inequality chains built on them.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Real trigonometric polynomial `S(x) = Σ_{|m|<=M} c_m e(mx)` with
/// `c_{-m} = conj(c_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    degree: usize,
    coeffs: Vec<Complex64>,
}

impl TrigPolynomial {
    /// `coeffs[k]` is the coefficient of `e((k - M) x)`.
    pub fn new(degree: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * degree + 1 {
            return Err(Error::Argument(format!(
                "degree {degree} needs {} coefficients, got {}",
                2 * degree + 1,
                coeffs.len()
            )));
        }
        Ok(Self { degree, coeffs })
    }

    pub fn zero(degree: usize) -> Self {
        Self { degree, coeffs: vec![Complex64::new(0.0, 0.0); 2 * degree + 1] }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, m: i64) -> Complex64 {
        let k = m + self.degree as i64;
        if k < 0 || k as usize >= self.coeffs.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[k as usize]
        }
    }

    fn set(&mut self, m: i64, c: Complex64) {
        let k = (m + self.degree as i64) as usize;
        self.coeffs[k] = c;
    }
}

fn e(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * x)
}

const RESIDUE_TOL: f64 = 1e-12;

/// Evaluates a conjugate-symmetric polynomial at real `x`.
pub fn eval_trig(poly: &TrigPolynomial, x: f64) -> Result<f64> {
    let m_max = poly.degree as i64;
    let scale = poly.coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max);
    for m in 0..=m_max {
        if (poly.coeff(-m) - poly.coeff(m).conj()).norm() > RESIDUE_TOL * scale {
            return Err(Error::Argument(format!("coefficient {m} breaks conjugate symmetry")));
        }
    }
    let mut value = poly.coeff(0).re;
    for m in 1..=m_max {
        // c_m e(mx) + conj(c_m e(mx))
        value += 2.0 * (poly.coeff(m) * e(m as f64 * x)).re;
    }
    Ok(value)
}

/// Vaaler's weight `J(u) = πu(1-|u|)cot(πu) + |u|` on `0 < |u| < 1`.
fn vaaler_weight(u: f64) -> f64 {
    let a = u.abs();
    PI * a * (1.0 - a) / (PI * a).tan() + a
}

/// Fourier coefficient `∫_a^b e(-mx) dx` of the indicator of `[a, b]`.
pub fn indicator_coeff(a: f64, b: f64, m: i64) -> Complex64 {
    if m == 0 {
        return Complex64::new(b - a, 0.0);
    }
    (e(-(m as f64) * a) - e(-(m as f64) * b)) / Complex64::new(0.0, 2.0 * PI * m as f64)
}

/// Degree-`M` majorant and minorant of `χ_[a,b]`, `0 <= a < b <= 1`.
///
/// Writes `χ = (b-a) + ψ(x-b) - ψ(x-a)` with the sawtooth `ψ`, replaces
/// `ψ` by Vaaler's polynomial and adds `±` half a Fejér kernel at each
/// endpoint to absorb the error.
pub fn selberg_pair(a: f64, b: f64, degree: usize) -> Result<(TrigPolynomial, TrigPolynomial)> {
    if !(0.0 <= a && a < b && b <= 1.0) {
        return Err(Error::Interval { lo: a, hi: b, reason: "need 0 <= a < b <= 1" });
    }
    if degree == 0 {
        return Err(Error::Argument("Selberg degree must be at least 1".into()));
    }
    let n1 = (degree + 1) as f64;
    let mut plus = TrigPolynomial::zero(degree);
    let mut minus = TrigPolynomial::zero(degree);
    plus.set(0, Complex64::new(b - a + 1.0 / n1, 0.0));
    minus.set(0, Complex64::new(b - a - 1.0 / n1, 0.0));
    for m in 1..=degree as i64 {
        for m in [m, -m] {
            let u = m as f64 / n1;
            let main = indicator_coeff(a, b, m) * vaaler_weight(u);
            let fejer = (e(-(m as f64) * a) + e(-(m as f64) * b)) * ((1.0 - u.abs()) / (2.0 * n1));
            plus.set(m, main + fejer);
            minus.set(m, main - fejer);
        }
    }
    Ok((plus, minus))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainVariant {
    /// `N(a,b;p)` chain, constant 26.52.
    Untwisted,
    /// `M(a,b;p)` chain, constant 28.89.
    Twisted,
}

impl ChainVariant {
    pub fn constant(self) -> f64 {
        match self {
            ChainVariant::Untwisted => 26.52,
            ChainVariant::Twisted => 28.89,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    pub p: u64,
    pub variant: ChainVariant,
    pub degree: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl ChainReport {
    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }
}

/// `⌊p^{1/4}⌋`, exactly.
pub fn fourth_root_floor(p: u64) -> u64 {
    let mut m = (p as f64).powf(0.25) as u64;
    while m.pow(4) > p {
        m -= 1;
    }
    while (m + 1).pow(4) <= p {
        m += 1;
    }
    m
}

/// The bound `4p/(M+1) + Σ_{m<=M} (8/m)(c(m-1)√p + (2m+1) + k/p^m)` with
/// `M = ⌊p^{1/4}⌋` and `(c, k) = (4/3, 2)` untwisted or `(2, 3)` twisted,
/// compared against `C·p^{3/4}`.
pub fn proof_bound_audit(p: u64, variant: ChainVariant) -> ChainReport {
    let degree = fourth_root_floor(p);
    let pf = p as f64;
    let (slope, tail) = match variant {
        ChainVariant::Untwisted => (4.0 / 3.0, 2.0),
        ChainVariant::Twisted => (2.0, 3.0),
    };
    let mut lhs = 4.0 * pf / (degree as f64 + 1.0);
    for m in 1..=degree {
        let mf = m as f64;
        lhs += 8.0 / mf * (slope * (mf - 1.0) * pf.sqrt() + (2.0 * mf + 1.0) + tail / pf.powi(m as i32));
    }
    let rhs = variant.constant() * pf.powf(0.75);
    ChainReport { p, variant, degree, lhs, rhs, pass: lhs <= rhs }
}

/// The untwisted chain after bounding `H_M <= log M + 1` and substituting
/// `M = p^{1/4}`: `4p^{3/4} + (8/3)(6p^{1/4} + 4p^{3/4} + 1.05 log p + 4.2)`.
pub fn simplified_chain(p: u64) -> ChainReport {
    let pf = p as f64;
    let lhs = 4.0 * pf.powf(0.75)
        + 8.0 / 3.0 * (6.0 * pf.powf(0.25) + 4.0 * pf.powf(0.75) + 1.05 * pf.ln() + 4.2);
    let rhs = ChainVariant::Untwisted.constant() * pf.powf(0.75);
    ChainReport {
        p,
        variant: ChainVariant::Untwisted,
        degree: fourth_root_floor(p),
        lhs,
        rhs,
        pass: lhs <= rhs,
    }
}
