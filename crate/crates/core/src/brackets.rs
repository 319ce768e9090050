//! Chebyshev coefficients, Rankin-Cohen bracket coefficients of the Hurwitz
//! generating series against `θ(tτ)`, the lattice-point correction that
//! turns them into holomorphic projections, and the coefficient bounds.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::isqrt;
use crate::hurwitz::HurwitzTable;

/// Integer coefficients of `U_m(x) = Σ_l b[l] x^l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChebyshevCoeffs {
    pub m: usize,
    pub b: Vec<BigInt>,
}

/// `U_m` by the recurrence `U_m = 2x U_{m-1} - U_{m-2}`.
pub fn chebyshev_coeffs(m: usize) -> ChebyshevCoeffs {
    let mut prev: Vec<BigInt> = vec![BigInt::one()];
    if m == 0 {
        return ChebyshevCoeffs { m, b: prev };
    }
    let mut cur: Vec<BigInt> = vec![BigInt::zero(), BigInt::from(2)];
    for k in 2..=m {
        let mut next = vec![BigInt::zero(); k + 1];
        for (l, c) in cur.iter().enumerate() {
            next[l + 1] += c * 2;
        }
        for (l, c) in prev.iter().enumerate() {
            next[l] -= c;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    ChebyshevCoeffs { m, b: cur }
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `b(2l; 2m) = (-1)^{m-l} 2^{2l-1} (l+m)! / (l (m-l)! (2l-1)!)`, `1 <= l <= m`.
pub fn chebyshev_closed(l: u64, m: u64) -> Result<BigInt> {
    if l == 0 || l > m {
        return Err(Error::Argument(format!("closed form needs 1 <= l <= m, got l={l}, m={m}")));
    }
    let num = (BigInt::one() << (2 * l - 1)) * factorial(l + m);
    let den = BigInt::from(l) * factorial(m - l) * factorial(2 * l - 1);
    let v = num / den;
    Ok(if (m - l) % 2 == 1 { -v } else { v })
}

/// `U_m(x)` evaluated in floating point by the recurrence.
pub fn chebyshev_u(m: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if m == 0 {
        return prev;
    }
    for _ in 2..=m {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `binom(2m, m)`.
pub fn central_binomial(m: u32) -> BigInt {
    (1..=m as u64).fold(BigInt::one(), |acc, k| acc * (m as u64 + k) / k)
}

fn check_theta_index(t: u64) -> Result<()> {
    if t == 1 || t == 4 {
        Ok(())
    } else {
        Err(Error::Argument(format!("theta index must be 1 or 4, got {t}")))
    }
}

/// Coefficient of `q^n` in `[H⁺(τ), θ(tτ)]_m` (weights 3/2 and 1/2).
///
/// `c_m(n) = binom(2m,m)/4^m · Σ_l b(2l;2m) Σ_{s∈Z} H*(n-ts²) (ts²)^l n^{m-l}`,
/// with `0^0 = 1` on the `s = 0` term.
pub fn bracket_coeff(m: u32, t: u64, n: u64, table: &HurwitzTable) -> Result<BigRational> {
    check_theta_index(t)?;
    if n == 0 {
        return Err(Error::Argument("bracket coefficient index must be >= 1".into()));
    }
    table.require(n)?;
    let u = chebyshev_coeffs(2 * m as usize);
    let n_big = BigInt::from(n);
    let s_max = isqrt(n / t);
    // Each s ≠ 0 appears as ±s.
    let terms: Vec<(BigInt, BigInt)> = (0..=s_max)
        .filter_map(|s| {
            let ts2 = t * s * s;
            let h = table.twelve_h_at((n - ts2) as i64).ok()?;
            let mult = if s == 0 { 1 } else { 2 };
            (h != 0).then(|| (BigInt::from(h * mult), BigInt::from(ts2)))
        })
        .collect();
    let mut twelve_sum = BigInt::zero();
    for l in 0..=m as usize {
        let b = &u.b[2 * l];
        let inner: BigInt = terms
            .iter()
            .map(|(h, ts2)| h * num_traits::pow(ts2.clone(), l))
            .sum();
        twelve_sum += b * inner * num_traits::pow(n_big.clone(), m as usize - l);
    }
    let den = BigInt::from(12) * num_traits::pow(BigInt::from(4), m as usize);
    Ok(BigRational::new(central_binomial(m) * twelve_sum, den))
}

/// Coefficient of `q^n` in the lattice-point series
/// `Λ_s(τ;m) = 2 Σ_n Σ_{st²-r²=n, t,r>=1} (√s t - r)^{2m+1} q^n + Σ_{k>=1} (√s k)^{2m+1} q^{sk²}`.
pub fn mertens_coeff(s: u64, m: u32, n: u64) -> Result<BigInt> {
    check_theta_index(s)?;
    let root = isqrt(s);
    let e = 2 * m as usize + 1;
    let mut total = BigInt::zero();
    // s t² - r² = (√s t - r)(√s t + r) = d·(n/d) with 0 < d < n/d.
    let mut d = 1u64;
    while d * d < n {
        if n.is_multiple_of(d) {
            let e2 = n / d;
            if (d + e2).is_multiple_of(2) && ((d + e2) / 2).is_multiple_of(root) {
                total += num_traits::pow(BigInt::from(d), e) * 2;
            }
        }
        d += 1;
    }
    if n.is_multiple_of(s) {
        let k2 = n / s;
        let k = isqrt(k2);
        if k >= 1 && k * k == k2 {
            total += num_traits::pow(BigInt::from(root * k), e);
        }
    }
    Ok(total)
}

/// Coefficient of `q^n` in the holomorphic projection of `[H(τ), θ(tτ)]_m`:
/// `a_m(n)` for `t = 1`, `b_m(n)` for `t = 4`.
pub fn pihol_coeff(m: u32, t: u64, n: u64, table: &HurwitzTable) -> Result<BigRational> {
    let bracket = bracket_coeff(m, t, n, table)?;
    let correction = BigRational::new(
        central_binomial(m) * mertens_coeff(t, m, n)?,
        BigInt::from(2) * num_traits::pow(BigInt::from(4), m as usize),
    );
    Ok(bracket + correction)
}

#[derive(Debug, Clone, Serialize)]
pub struct DeligneReport {
    pub m: u32,
    pub p: u64,
    /// `a_m(p)`
    pub a_value: f64,
    pub a_bound: f64,
    pub a_pass: bool,
    /// `b_m(4p)`
    pub b_value: f64,
    pub b_bound: f64,
    pub b_pass: bool,
}

impl DeligneReport {
    pub fn pass(&self) -> bool {
        self.a_pass && self.b_pass
    }
}

fn within(value: &BigRational, bound: f64) -> bool {
    let bound = BigRational::from_float(bound.next_up()).expect("finite bound");
    value.abs() <= bound
}

/// Checks `|a_m(p)| <= (2/3)·binom(2m,m)/4^m·(m-1)·p^{m+1/2}` and
/// `|b_m(4p)| <= (4/3)(m-1)·binom(2m,m)·p^{m+1/2}`. Values are exact; the
/// floating bounds are nudged up one ulp before the exact comparison.
pub fn deligne_audit(m: u32, p: u64, table: &HurwitzTable) -> Result<DeligneReport> {
    if m == 0 || p < 5 {
        return Err(Error::Argument(format!("audit needs m >= 1 and p >= 5, got m={m}, p={p}")));
    }
    let a = pihol_coeff(m, 1, p, table)?;
    let b = pihol_coeff(m, 4, 4 * p, table)?;
    let binom = central_binomial(m).to_f64().expect("binomial fits f64");
    let growth = (p as f64).powf(m as f64 + 0.5);
    let a_bound = 2.0 / 3.0 * binom / 4f64.powi(m as i32) * (m - 1) as f64 * growth;
    let b_bound = 4.0 / 3.0 * (m - 1) as f64 * binom * growth;
    Ok(DeligneReport {
        m,
        p,
        a_value: a.to_f64().unwrap_or(f64::NAN),
        a_bound,
        a_pass: within(&a, a_bound),
        b_value: b.to_f64().unwrap_or(f64::NAN),
        b_bound,
        b_pass: within(&b, b_bound),
    })
}

/// Both sides of one of the sum-to-coefficient identities, plus the
/// right-hand side without the `H*` boundary term.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub rhs_without_boundary: BigRational,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// `Σ_l b(2l;2m) Σ_{s even, 0<s<2√p} H*(D_s) (s²/4p)^l`, with `D_s`
/// supplied by `disc`.
fn weighted_chebyshev_sum(
    p: u64,
    m: u32,
    table: &HurwitzTable,
    disc: impl Fn(u64) -> i64,
) -> Result<BigRational> {
    let u = chebyshev_coeffs(2 * m as usize);
    let four_p = BigRational::from_integer(BigInt::from(4 * p));
    let mut total = BigRational::zero();
    let mut s = 2u64;
    while s * s < 4 * p {
        let h = table.hurwitz_star(disc(s))?;
        let x2 = BigRational::from_integer(BigInt::from(s * s)) / &four_p;
        let mut pow = BigRational::one();
        let mut poly = BigRational::zero();
        for l in 0..=m as usize {
            poly += &pow * &u.b[2 * l];
            pow *= &x2;
        }
        total += h * poly;
        s += 2;
    }
    Ok(total)
}

fn sign_pow(m: u32) -> BigRational {
    if m.is_multiple_of(2) {
        BigRational::one()
    } else {
        -BigRational::one()
    }
}

/// `Σ_l b(2l;2m) Σ_s 2H*((4p-s²)/4)(s/2√p)^{2l}` against
/// `(4^m/binom(2m,m))·a_m(p)/p^m - 1/p^m - (-1)^m H*(p)`.
pub fn identity_a_side(p: u64, m: u32, table: &HurwitzTable) -> Result<IdentityCheck> {
    table.require(p)?;
    let lhs = weighted_chebyshev_sum(p, m, table, |s| (p - s * s / 4) as i64)? * BigInt::from(2);
    let p_m = BigRational::from_integer(num_traits::pow(BigInt::from(p), m as usize));
    let a = pihol_coeff(m, 1, p, table)?;
    let scale = BigRational::new(num_traits::pow(BigInt::from(4), m as usize), central_binomial(m));
    let base = (scale * a - BigRational::one()) / &p_m;
    let rhs = &base - sign_pow(m) * table.hurwitz_star(p as i64)?;
    Ok(IdentityCheck { lhs, rhs, rhs_without_boundary: base })
}

/// `Σ_l b(2l;2m) Σ_s H*(4p-s²)(s/2√p)^{2l}` against
/// `b_m(4p)/(2 binom(2m,m) p^m) - 1/p^m - ½(-1)^m H*(4p)`.
pub fn identity_b_side(p: u64, m: u32, table: &HurwitzTable) -> Result<IdentityCheck> {
    table.require(4 * p)?;
    let lhs = weighted_chebyshev_sum(p, m, table, |s| (4 * p - s * s) as i64)?;
    let p_m = BigRational::from_integer(num_traits::pow(BigInt::from(p), m as usize));
    let b = pihol_coeff(m, 4, 4 * p, table)?;
    let base = (b / (central_binomial(m) * BigInt::from(2)) - BigRational::one()) / &p_m;
    let rhs = &base
        - sign_pow(m) * table.hurwitz_star(4 * p as i64)? / BigRational::from_integer(2.into());
    Ok(IdentityCheck { lhs, rhs, rhs_without_boundary: base })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::primes_between;
    use crate::hurwitz::build_hurwitz_table;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Generalized binomial `binom(top, k)` for rational `top`.
    fn gbinom(top: &BigRational, k: u32) -> BigRational {
        (0..k).fold(BigRational::one(), |acc, j| {
            acc * (top - BigRational::from_integer(j.into())) / BigRational::from_integer((j + 1).into())
        })
    }

    /// The bracket straight from its definition:
    /// `Σ_{r+u=m} (-1)^r binom(m+1/2, u) binom(m-1/2, r) Σ_{j+ts²=n} H*(j) j^r (ts²)^u`.
    fn bracket_by_definition(m: u32, t: u64, n: u64, table: &HurwitzTable) -> BigRational {
        let half = q(1, 2);
        let mm = BigRational::from_integer(m.into());
        let mut total = BigRational::zero();
        for r in 0..=m {
            let u = m - r;
            let coef = gbinom(&(&mm + &half), u) * gbinom(&(&mm - &half), r);
            let coef = if r % 2 == 1 { -coef } else { coef };
            let mut inner = BigRational::zero();
            let mut s: i64 = -(isqrt(n / t) as i64);
            while s * s * t as i64 <= n as i64 {
                let ts2 = t as i64 * s * s;
                let j = n as i64 - ts2;
                let h = table.hurwitz_star(j).unwrap();
                inner += h
                    * num_traits::pow(BigRational::from_integer(j.into()), r as usize)
                    * num_traits::pow(BigRational::from_integer(ts2.into()), u as usize);
                s += 1;
            }
            total += coef * inner;
        }
        total
    }

    fn mertens_by_scan(s: u64, m: u32, n: u64) -> BigInt {
        let root = isqrt(s) as i64;
        let e = 2 * m as usize + 1;
        let mut total = BigInt::zero();
        for t in 1..=n as i64 {
            for r in 1..root * t {
                if s as i64 * t * t - r * r == n as i64 {
                    total += num_traits::pow(BigInt::from(root * t - r), e) * 2;
                }
            }
        }
        for k in 1..=n as i64 {
            if s as i64 * k * k == n as i64 {
                total += num_traits::pow(BigInt::from(root * k), e);
            }
        }
        total
    }

    #[test]
    fn chebyshev_small() {
        assert_eq!(chebyshev_coeffs(0).b, ints(&[1]));
        assert_eq!(chebyshev_coeffs(1).b, ints(&[0, 2]));
        assert_eq!(chebyshev_coeffs(2).b, ints(&[-1, 0, 4]));
        assert_eq!(chebyshev_coeffs(4).b, ints(&[1, 0, -12, 0, 16]));
    }

    #[test]
    fn chebyshev_structure() {
        for m in 0..40usize {
            let c = chebyshev_coeffs(m);
            assert_eq!(c.b.len(), m + 1);
            assert_eq!(c.b[m], BigInt::one() << m);
            for (l, v) in c.b.iter().enumerate() {
                if (l + m) % 2 == 1 {
                    assert!(v.is_zero());
                }
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(chebyshev_closed(1, 1).unwrap(), BigInt::from(4));
        assert_eq!(chebyshev_closed(1, 2).unwrap(), BigInt::from(-12));
        assert_eq!(chebyshev_closed(2, 2).unwrap(), BigInt::from(16));
        assert!(chebyshev_closed(0, 3).is_err());
        assert!(chebyshev_closed(4, 3).is_err());
    }

    #[test]
    fn constant_term_alternates() {
        for m in 0..=50 {
            let expected = if m % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            assert_eq!(chebyshev_coeffs(2 * m).b[0], expected);
        }
    }

    #[test]
    fn cosine_identity() {
        for m in 2..30usize {
            for k in 0..200 {
                let theta = 0.001 + k as f64 * (std::f64::consts::PI - 0.002) / 199.0;
                let lhs = chebyshev_u(m, theta.cos()) - chebyshev_u(m - 2, theta.cos());
                assert!((lhs - 2.0 * (m as f64 * theta).cos()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn bracket_examples() {
        let t = build_hurwitz_table(100);
        assert_eq!(bracket_coeff(1, 1, 5, &t).unwrap(), q(-1, 2));
        assert_eq!(bracket_coeff(1, 4, 20, &t).unwrap(), q(-4, 1));
        assert_eq!(bracket_coeff(1, 1, 7, &t).unwrap(), q(-1, 2));
        assert!(bracket_coeff(1, 2, 5, &t).is_err());
        assert!(bracket_coeff(1, 1, 0, &t).is_err());
        assert!(matches!(bracket_coeff(1, 1, 101, &t), Err(Error::TableRange { .. })));
    }

    #[test]
    fn bracket_matches_definition() {
        let t = build_hurwitz_table(400);
        for m in 0..=5 {
            for theta in [1, 4] {
                for n in 1..=400 {
                    if n % 7 != 0 && n > 60 {
                        continue;
                    }
                    assert_eq!(
                        bracket_coeff(m, theta, n, &t).unwrap(),
                        bracket_by_definition(m, theta, n, &t),
                        "m={m} t={theta} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn mertens_examples_and_scan() {
        assert_eq!(mertens_coeff(1, 1, 5).unwrap(), BigInt::from(2));
        assert_eq!(mertens_coeff(4, 1, 20).unwrap(), BigInt::from(16));
        assert_eq!(mertens_coeff(1, 1, 4).unwrap(), BigInt::from(8));
        assert!(mertens_coeff(2, 1, 4).is_err());
        for s in [1, 4] {
            for m in 0..4 {
                for n in 1..150 {
                    assert_eq!(mertens_coeff(s, m, n).unwrap(), mertens_by_scan(s, m, n), "s={s} m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn projection_examples() {
        let t = build_hurwitz_table(100);
        assert!(pihol_coeff(1, 1, 5, &t).unwrap().is_zero());
        assert!(pihol_coeff(1, 1, 7, &t).unwrap().is_zero());
        assert!(pihol_coeff(1, 4, 20, &t).unwrap().is_zero());
    }

    #[test]
    fn weight_four_projection_vanishes_everywhere() {
        // S_4(Γ0(4)) = 0, so the m = 1 projections vanish at every index.
        let t = build_hurwitz_table(800);
        for n in 1..=200 {
            assert!(pihol_coeff(1, 1, n, &t).unwrap().is_zero(), "a_1({n})");
            assert!(pihol_coeff(1, 4, 4 * n, &t).unwrap().is_zero(), "b_1({})", 4 * n);
        }
    }

    #[test]
    fn deligne_examples() {
        let t = build_hurwitz_table(2000);
        let r = deligne_audit(1, 5, &t).unwrap();
        assert!(r.pass());
        assert_eq!((r.a_value, r.b_value, r.a_bound, r.b_bound), (0.0, 0.0, 0.0, 0.0));
        let r = deligne_audit(2, 5, &t).unwrap();
        assert!(r.pass());
        assert!((r.a_bound - 13.975).abs() < 1e-2, "{}", r.a_bound);
        assert!(deligne_audit(6, 11, &t).unwrap().pass());
        assert!(deligne_audit(0, 11, &t).is_err());
    }

    #[test]
    fn corrected_identities_small() {
        let t = build_hurwitz_table(4 * 200);
        for p in primes_between(5, 60) {
            for m in 1..=4 {
                let a = identity_a_side(p, m, &t).unwrap();
                let b = identity_b_side(p, m, &t).unwrap();
                assert!(a.holds(), "a-side p={p} m={m}");
                assert!(b.holds(), "b-side p={p} m={m}");
            }
        }
        // The uncorrected forms miss exactly the boundary term.
        let a = identity_a_side(7, 1, &t).unwrap();
        assert_ne!(a.lhs, a.rhs_without_boundary);
        let b = identity_b_side(5, 1, &t).unwrap();
        assert_ne!(b.lhs, b.rhs_without_boundary);
        assert_eq!(b.lhs, q(4, 5));
    }
}
