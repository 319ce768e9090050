//! Hurwitz class numbers `H*(D)` and the class-number side of the trace
//! moment identities.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{isqrt, two_squares};

/// Whether `-D` is the discriminant of an imaginary quadratic order.
pub fn is_discriminant(d: u64) -> bool {
    d > 0 && (d.is_multiple_of(4) || d % 4 == 3)
}

/// Half the number of roots of unity in the order of discriminant `-D`.
pub fn unit_weight(d: u64) -> u64 {
    match d {
        3 => 3,
        4 => 2,
        _ => 1,
    }
}

/// Reduced forms `(a, b, c)` satisfy `|b| <= a <= c`, with `b >= 0`
/// whenever `|b| = a` or `a = c`.
fn is_reduced(a: i64, b: i64, c: i64) -> bool {
    b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
}

/// Class number `h(D)` of primitive forms of discriminant `-D`, and `ω(D)`.
pub fn class_number(d: u64) -> Result<(u64, u64)> {
    if !is_discriminant(d) {
        return Err(Error::NotDiscriminant(d));
    }
    let d = d as i64;
    let mut h = 0;
    let mut a = 1i64;
    while 3 * a * a <= d {
        for b in -a..=a {
            let num = b * b + d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if is_reduced(a, b, c) && a.gcd(&b).gcd(&c) == 1 {
                h += 1;
            }
        }
        a += 1;
    }
    Ok((h, unit_weight(d as u64)))
}

/// `12·H*(D)` for `0 <= D <= d_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HurwitzTable {
    twelve_h: Vec<i64>,
}

impl HurwitzTable {
    pub fn from_twelve_h(twelve_h: Vec<i64>) -> Self {
        assert!(!twelve_h.is_empty());
        Self { twelve_h }
    }

    pub fn d_max(&self) -> u64 {
        self.twelve_h.len() as u64 - 1
    }

    pub fn twelve_h(&self) -> &[i64] {
        &self.twelve_h
    }

    /// `12·H*(D)`; zero for negative `D`.
    pub fn twelve_h_at(&self, d: i64) -> Result<i64> {
        if d < 0 {
            return Ok(0);
        }
        self.twelve_h
            .get(d as usize)
            .copied()
            .ok_or(Error::TableRange { d: d as u64, d_max: self.d_max() })
    }

    /// `H*(D)` as an exact rational.
    pub fn hurwitz_star(&self, d: i64) -> Result<BigRational> {
        Ok(BigRational::new(self.twelve_h_at(d)?.into(), 12.into()))
    }

    pub fn require(&self, d: u64) -> Result<()> {
        if d > self.d_max() {
            return Err(Error::TableRange { d, d_max: self.d_max() });
        }
        Ok(())
    }
}

/// Batch construction: one sweep over reduced primitive forms counts
/// `h(D)` for every `D <= d_max`, then the `f^2 | D` sum folds in the
/// imprimitive levels.
pub fn build_hurwitz_table(d_max: u64) -> HurwitzTable {
    let n = d_max as usize + 1;
    let dm = d_max as i64;
    let a_max = isqrt(d_max / 3) as i64;

    let h = (1..=a_max)
        .into_par_iter()
        .fold(
            || vec![0u32; n],
            |mut h, a| {
                for b in -a..=a {
                    let mut c = a;
                    loop {
                        let d = 4 * a * c - b * b;
                        if d > dm {
                            break;
                        }
                        if is_reduced(a, b, c) && a.gcd(&b).gcd(&c) == 1 {
                            h[d as usize] += 1;
                        }
                        c += 1;
                    }
                }
                h
            },
        )
        .reduce(
            || vec![0u32; n],
            |mut x, y| {
                x.iter_mut().zip(&y).for_each(|(u, v)| *u += v);
                x
            },
        );

    let mut twelve_h = vec![0i64; n];
    twelve_h[0] = -1;
    for f in 1..=isqrt(d_max) {
        let f2 = f * f;
        for k in 1..=d_max / f2 {
            if is_discriminant(k) && h[k as usize] > 0 {
                twelve_h[(k * f2) as usize] += 12 * h[k as usize] as i64 / unit_weight(k) as i64;
            }
        }
    }
    HurwitzTable { twelve_h }
}

/// `½((2a)^{2n} ± (2b)^{2n})` for `p = a^2 + b^2` (a odd), or zero when
/// `p ≡ 3 (mod 4)`.
pub fn c_pm(p: u64, n: u32, plus: bool) -> BigInt {
    let Some((a, b)) = two_squares(p) else {
        return BigInt::zero();
    };
    let pa = num_traits::pow(BigInt::from(2 * a), 2 * n as usize);
    let pb = num_traits::pow(BigInt::from(2 * b), 2 * n as usize);
    let total = if plus { pa + pb } else { pa - pb };
    total / 2
}

/// Class-number side of the power-moment identities:
/// `Σ_{s even, 0<s<2√p} (w1·H*((4p-s²)/4) + w2·H*(4p-s²)) s^{2n} - c^±(p,n)`
/// with weights `(2, 1)` untwisted and `(4, -1)` twisted.
pub fn moment_rhs(table: &HurwitzTable, p: u64, n: u32, twisted: bool) -> Result<BigRational> {
    table.require(4 * p)?;
    let (w_quarter, w_full) = if twisted { (4, -1) } else { (2, 1) };
    let mut twelve_sum = BigInt::zero();
    let mut s = 2u64;
    while s * s < 4 * p {
        let d = (4 * p - s * s) as i64;
        let weight = w_quarter * table.twelve_h_at(d / 4)? + w_full * table.twelve_h_at(d)?;
        twelve_sum += BigInt::from(weight) * num_traits::pow(BigInt::from(s), 2 * n as usize);
        s += 2;
    }
    let c = c_pm(p, n, !twisted);
    Ok(BigRational::new(twelve_sum, 12.into()) - BigRational::from_integer(c))
}

/// `H*(D)` for a single `D` straight from the definition, via
/// [`class_number`] on each `D/f^2`.
pub fn hurwitz_star_direct(d: u64) -> BigRational {
    if d == 0 {
        return BigRational::new((-1).into(), 12.into());
    }
    let mut total = BigRational::zero();
    for f in 1..=isqrt(d) {
        if d.is_multiple_of(f * f) {
            if let Ok((h, w)) = class_number(d / (f * f)) {
                total += BigRational::new(h.into(), w.into());
            }
        }
    }
    debug_assert!(!total.is_negative());
    total
}
