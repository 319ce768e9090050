//! Frobenius traces of the Clausen curves `y^2 = (x-1)(x^2 + λ)` and the
//! K3 values `A_μ(p)` they determine.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::FieldContext;

/// Clausen traces and signs `φ(-λ)` for every `λ ∈ F_p \ {0, -1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceTable {
    p: u64,
    traces: Vec<i64>,
    signs: Vec<i8>,
}

/// One row of a [`TraceTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceEntry {
    pub lambda: u64,
    pub trace: i64,
    pub sign: i8,
}

impl TraceTable {
    /// Rebuilds a table from stored traces, recomputing the signs.
    pub fn from_traces(ctx: &FieldContext, traces: Vec<i64>) -> Result<Self> {
        let p = ctx.p();
        if traces.len() as u64 != p - 2 {
            return Err(Error::Argument(format!(
                "expected {} traces for p = {p}, got {}",
                p - 2,
                traces.len()
            )));
        }
        let signs = (1..=p - 2).map(|lambda| ctx.chi(p - lambda)).collect();
        Ok(Self { p, traces, signs })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn traces(&self) -> &[i64] {
        &self.traces
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Trace at `λ`, for `1 <= λ <= p-2`.
    pub fn trace(&self, lambda: u64) -> i64 {
        self.traces[(lambda - 1) as usize]
    }

    pub fn sign(&self, lambda: u64) -> i8 {
        self.signs[(lambda - 1) as usize]
    }

    pub fn entries(&self) -> impl Iterator<Item = TraceEntry> + '_ {
        self.traces
            .iter()
            .zip(&self.signs)
            .enumerate()
            .map(|(i, (&trace, &sign))| TraceEntry { lambda: i as u64 + 1, trace, sign })
    }

    /// Multiplicities of `(a_λ^2, φ(-λ))`, ordered by square.
    pub fn square_histogram(&self) -> BTreeMap<(u64, i8), u64> {
        let mut hist = BTreeMap::new();
        for (&a, &s) in self.traces.iter().zip(&self.signs) {
            *hist.entry(((a * a) as u64, s)).or_insert(0) += 1;
        }
        hist
    }

    /// `A_μ(p)` for every `μ ∈ F_p \ {0, -1}`, in `μ` order.
    pub fn a_values(&self, ctx: &FieldContext) -> Vec<AValue> {
        let p = self.p;
        (1..=p - 2)
            .map(|mu| {
                let lambda = lambda_for_mu(ctx, mu);
                AValue::from_trace(p, mu, self.trace(lambda), self.sign(lambda))
            })
            .collect()
    }
}

fn check_parameter(ctx: &FieldContext, x: u64) -> Result<()> {
    let p = ctx.p();
    if x >= p {
        return Err(Error::ElementOutOfRange { p, x });
    }
    if x == 0 || x == p - 1 {
        return Err(Error::SingularParameter { p, lambda: x });
    }
    Ok(())
}

/// `a_λ(p) = -Σ_x φ((x-1)(x^2+λ))`, by direct summation.
pub fn clausen_trace(ctx: &FieldContext, lambda: u64) -> Result<i64> {
    check_parameter(ctx, lambda)?;
    let p = ctx.p();
    let sum: i64 = (0..p)
        .map(|x| {
            let lhs = (x + p - 1) % p;
            let rhs = (ctx.mul(x, x) + lambda) % p;
            ctx.chi(ctx.mul(lhs, rhs)) as i64
        })
        .sum();
    Ok(-sum)
}

/// Builds the full trace table.
///
/// For fixed `x` the cubic `(x-1)(x^2+λ)` is affine in `λ` with slope
/// `x-1`, so each row is walked with one modular addition per step and
/// the per-`λ` sums are accumulated column-wise. Rows are split across
/// the current rayon pool; the reduction is integer addition, so the
/// result does not depend on the thread count.
pub fn build_trace_table(ctx: &FieldContext) -> TraceTable {
    let p = ctx.p();
    assert!(p < 1 << 31, "trace table limited to p < 2^31");
    let n = (p - 2) as usize;
    let chi = ctx.chi_table();
    let p32 = p as u32;

    let row = |acc: &mut [i32], x: u64| {
        let slope = ((x + p - 1) % p) as u32;
        if slope == 0 {
            return;
        }
        let sq_plus_one = (ctx.mul(x, x) + 1) % p;
        let mut v = ctx.mul(slope as u64, sq_plus_one) as u32;
        for slot in acc.iter_mut() {
            *slot += chi[v as usize] as i32;
            v += slope;
            if v >= p32 {
                v -= p32;
            }
        }
    };

    let sums = (0..p as usize)
        .into_par_iter()
        .with_min_len(64)
        .fold(
            || vec![0i32; n],
            |mut acc: Vec<i32>, x| {
                row(&mut acc, x as u64);
                acc
            },
        )
        .reduce(
            || vec![0i32; n],
            |mut a: Vec<i32>, b: Vec<i32>| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                a
            },
        );

    let traces = sums.into_iter().map(|s| -(s as i64)).collect();
    TraceTable::from_traces(ctx, traces).expect("length is p - 2 by construction")
}

/// `λ = -(μ+1)^{-1}`, the Clausen parameter attached to the K3 parameter `μ`.
pub fn lambda_for_mu(ctx: &FieldContext, mu: u64) -> u64 {
    let p = ctx.p();
    (p - ctx.inv((mu + 1) % p)) % p
}

/// `A_μ(p)` held exactly as `num / p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AValue {
    pub mu: u64,
    pub num: i64,
    pub p: u64,
}

impl AValue {
    fn from_trace(p: u64, mu: u64, trace: i64, sign: i8) -> Self {
        let num = sign as i64 * (trace * trace - p as i64);
        debug_assert!(num.unsigned_abs() <= 3 * p);
        Self { mu, num, p }
    }

    pub fn value(&self) -> BigRational {
        BigRational::new(self.num.into(), self.p.into())
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.p as f64
    }
}

/// `A_μ(p) = φ(-λ)(a_λ^2 - p)/p` with `λ = -(μ+1)^{-1}`.
pub fn a_value(ctx: &FieldContext, mu: u64) -> Result<AValue> {
    check_parameter(ctx, mu)?;
    let lambda = lambda_for_mu(ctx, mu);
    let trace = clausen_trace(ctx, lambda)?;
    Ok(AValue::from_trace(ctx.p(), mu, trace, ctx.chi(ctx.p() - lambda)))
}

/// `Σ a_λ^{2n}`, or `Σ φ(-λ) a_λ^{2n}` when `twisted`.
pub fn moment(table: &TraceTable, n: u32, twisted: bool) -> BigInt {
    table
        .square_histogram()
        .into_iter()
        .map(|((sq, sign), count)| {
            let weight = if twisted { sign as i64 * count as i64 } else { count as i64 };
            BigInt::from(weight) * num_traits::pow(BigInt::from(sq), n as usize)
        })
        .sum()
}

/// `Σ U_{2m}(a_λ / 2√p)` (optionally twisted by `φ(-λ)`), exactly.
///
/// Evaluated by the three-term recurrence on `U_k = r_k x^{k mod 2}` with
/// `x^2 = a^2/4p`, so only rationals appear.
pub fn chebyshev_sum(table: &TraceTable, m: u32, twisted: bool) -> BigRational {
    let four_p = BigInt::from(4 * table.p());
    let mut grouped: BTreeMap<u64, i64> = BTreeMap::new();
    for ((sq, sign), count) in table.square_histogram() {
        let w = if twisted { sign as i64 * count as i64 } else { count as i64 };
        *grouped.entry(sq).or_insert(0) += w;
    }
    grouped
        .into_iter()
        .filter(|&(_, w)| w != 0)
        .map(|(sq, w)| {
            let x2 = BigRational::new(BigInt::from(sq), four_p.clone());
            let mut prev = BigRational::zero(); // r_{-1}: unused for k = 1
            let mut cur = BigRational::one(); // r_0
            for k in 1..=2 * m {
                let next = if k % 2 == 0 {
                    BigRational::from_integer(2.into()) * &x2 * &cur - &prev
                } else if k == 1 {
                    BigRational::from_integer(2.into())
                } else {
                    BigRational::from_integer(2.into()) * &cur - &prev
                };
                prev = std::mem::replace(&mut cur, next);
            }
            cur * BigInt::from(w)
        })
        .sum()
}
