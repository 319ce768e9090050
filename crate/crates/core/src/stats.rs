//! Empirical interval counts for traces and `A`-values, and their
//! discrepancies against the limiting measures and explicit bounds.
//!
//! Membership is decided on integers: every rational endpoint is turned
//! into an integer threshold on `a_λ²` or on the numerator of `A_μ`, so a
//! boundary value lands the same way in every statistic.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use serde::{Serialize, Serializer};

use crate::clausen::{AValue, TraceTable};
use crate::error::{Error, Result};
use crate::measures::{mu_bat, mu_st, GENERAL_CONSTANT, SIGN_DEFINITE_CONSTANT};

/// A rational number that displays as `n` or `n/d`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Rational(pub BigRational);

impl Rational {
    pub fn new(n: i64, d: i64) -> Self {
        Self(BigRational::new(n.into(), d.into()))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Parses `3`, `-0.25`, `1e-3` or `2/7` exactly.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Argument(format!("not a rational number: {s:?}"));
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            return Ok(Self(BigRational::new(n, d)));
        }
        let (mantissa, exp) = match s.split_once(['e', 'E']) {
            Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
            None => (s, 0),
        };
        let (neg, digits) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let n: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        let scale = exp - frac.len() as i32;
        let ten = BigInt::from(10);
        let mut v = if scale >= 0 {
            BigRational::from_integer(n * num_traits::pow(ten, scale as usize))
        } else {
            BigRational::new(n, num_traits::pow(ten, (-scale) as usize))
        };
        if neg {
            v = -v;
        }
        Ok(Self(v))
    }
}

/// Closed interval with rational endpoints, `lo < hi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo >= hi {
            return Err(Error::Interval { lo: lo.to_f64(), hi: hi.to_f64(), reason: "need lo < hi" });
        }
        Ok(Self { lo, hi })
    }

    pub fn from_ratios(lo: (i64, i64), hi: (i64, i64)) -> Result<Self> {
        Self::new(Rational::new(lo.0, lo.1), Rational::new(hi.0, hi.1))
    }

    fn within(&self, lo: i64, hi: i64) -> bool {
        self.lo.0 >= BigRational::from_integer(lo.into()) && self.hi.0 <= BigRational::from_integer(hi.into())
    }

    fn check_within(&self, lo: i64, hi: i64, reason: &'static str) -> Result<()> {
        if self.within(lo, hi) {
            Ok(())
        } else {
            Err(Error::Interval { lo: self.lo.to_f64(), hi: self.hi.to_f64(), reason })
        }
    }
}

/// Band of normalized traces `|a_λ|/2√p ∈ [√lo_sq, √hi_sq]`, stored by
/// its squared endpoints so that irrational endpoints such as
/// `√(1+a)/2` stay exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceBand {
    pub lo_sq: BigRational,
    pub hi_sq: BigRational,
}

impl TraceBand {
    /// Band for `|a_λ|/2√p ∈ [a, b]`.
    pub fn from_interval(iv: &Interval) -> Result<Self> {
        iv.check_within(0, 1, "trace band needs 0 <= a < b <= 1")?;
        Ok(Self { lo_sq: &iv.lo.0 * &iv.lo.0, hi_sq: &iv.hi.0 * &iv.hi.0 })
    }

    /// Integer thresholds on `a_λ²`: `ceil(4p·lo_sq) <= a² <= floor(4p·hi_sq)`.
    fn square_thresholds(&self, p: u64) -> (BigInt, BigInt) {
        let four_p = BigRational::from_integer(BigInt::from(4 * p));
        ((&four_p * &self.lo_sq).ceil().to_integer(), (&four_p * &self.hi_sq).floor().to_integer())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IntervalCounts {
    /// All `λ` in the band.
    pub n: i64,
    /// `Σ φ(-λ)` over the band.
    pub m: i64,
    pub h_plus: i64,
    pub h_minus: i64,
}

pub fn band_counts(table: &TraceTable, band: &TraceBand) -> IntervalCounts {
    let (lo, hi) = band.square_thresholds(table.p());
    let lo = lo.to_i64().unwrap_or(if lo.is_negative() { i64::MIN } else { i64::MAX });
    let hi = hi.to_i64().unwrap_or(if hi.is_negative() { i64::MIN } else { i64::MAX });
    let (mut h_plus, mut h_minus) = (0, 0);
    for (&a, &s) in table.traces().iter().zip(table.signs()) {
        let sq = a * a;
        if lo <= sq && sq <= hi {
            if s > 0 {
                h_plus += 1;
            } else {
                h_minus += 1;
            }
        }
    }
    IntervalCounts { n: h_plus + h_minus, m: h_plus - h_minus, h_plus, h_minus }
}

/// Counts of `λ` with `|a_λ|/2√p ∈ [a, b]`, split by `φ(-λ)`.
pub fn interval_counts(table: &TraceTable, iv: &Interval) -> Result<IntervalCounts> {
    Ok(band_counts(table, &TraceBand::from_interval(iv)?))
}

/// Number of `μ` with `A_μ(p) ∈ [a, b]`, for `-3 <= a < b <= 3`.
pub fn empirical_a_count(values: &[AValue], iv: &Interval) -> Result<i64> {
    iv.check_within(-3, 3, "A-values need -3 <= a < b <= 3")?;
    let Some(first) = values.first() else {
        return Ok(0);
    };
    let p = BigRational::from_integer(first.p.into());
    let lo = (&p * &iv.lo.0).ceil().to_integer().to_i64().expect("bounded by 3p");
    let hi = (&p * &iv.hi.0).floor().to_integer().to_i64().expect("bounded by 3p");
    Ok(values.iter().filter(|v| lo <= v.num && v.num <= hi).count() as i64)
}

/// The two sides of the decomposition of an `A`-value count for
/// `0 <= a < b <= 1`: `H⁺` over `[√(1+a)/2, √(1+b)/2]` and `H⁻` over
/// `[√(1-b)/2, √(1-a)/2]`.
pub fn split_counts(table: &TraceTable, iv: &Interval) -> Result<(i64, i64)> {
    iv.check_within(0, 1, "split needs 0 <= a < b <= 1")?;
    let quarter = BigRational::new(1.into(), 4.into());
    let one = BigRational::one();
    let upper = TraceBand {
        lo_sq: (&one + &iv.lo.0) * &quarter,
        hi_sq: (&one + &iv.hi.0) * &quarter,
    };
    let lower = TraceBand {
        lo_sq: (&one - &iv.hi.0) * &quarter,
        hi_sq: (&one - &iv.lo.0) * &quarter,
    };
    Ok((band_counts(table, &upper).h_plus, band_counts(table, &lower).h_minus))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// `N/p` against `2μ_ST`.
    ClausenN,
    /// `H⁺/p` and `H⁻/p` against `μ_ST`, one row each.
    ClausenHpm,
    /// `M/p` against 0.
    ClausenM,
    /// `#{A_μ ∈ [a,b]}/p` against `μ_Bat`.
    Batman,
}

impl Statistic {
    pub const ALL: [Statistic; 4] =
        [Statistic::ClausenN, Statistic::ClausenHpm, Statistic::ClausenM, Statistic::Batman];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::ClausenN => "clausen_N",
            Statistic::ClausenHpm => "clausen_Hpm",
            Statistic::ClausenM => "clausen_M",
            Statistic::Batman => "batman",
        }
    }

    /// Range the statistic's intervals must lie in.
    pub fn domain(self) -> (i64, i64) {
        match self {
            Statistic::Batman => (-3, 3),
            _ => (0, 1),
        }
    }

    /// Bound constant `C` in `C/p^{1/4}` for the given interval.
    pub fn constant(self, iv: &Interval) -> f64 {
        match self {
            Statistic::ClausenN => 26.52,
            Statistic::ClausenHpm => 27.71,
            Statistic::ClausenM => 28.89,
            Statistic::Batman => {
                let zero = BigRational::zero();
                let three = BigRational::from_integer(3.into());
                let (lo, hi) = (&iv.lo.0, &iv.hi.0);
                let positive = &zero < lo && hi < &three;
                let negative = -&three < *lo && hi < &zero;
                if positive || negative {
                    SIGN_DEFINITE_CONSTANT
                } else {
                    GENERAL_CONSTANT
                }
            }
        }
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Statistic::ALL
            .into_iter()
            .find(|st| st.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Argument(format!("unknown statistic {s:?}")))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyRow {
    pub lo: Rational,
    pub hi: Rational,
    pub empirical: Rational,
    pub target: f64,
    pub gap: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyReport {
    pub p: u64,
    pub statistic: Statistic,
    pub rows: Vec<DiscrepancyRow>,
    pub max_gap: f64,
}

impl DiscrepancyReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

const PASS_SLACK: f64 = 1e-12;

/// Per-interval discrepancy of one statistic at the table's prime.
pub fn discrepancy_report(
    table: &TraceTable,
    values: &[AValue],
    grid: &[Interval],
    which: Statistic,
) -> Result<DiscrepancyReport> {
    let p = table.p();
    let pf = p as f64;
    let (dlo, dhi) = which.domain();
    let mut rows = Vec::with_capacity(grid.len());
    for iv in grid {
        iv.check_within(dlo, dhi, "interval outside the statistic's domain")?;
        let (lo, hi) = (iv.lo.to_f64(), iv.hi.to_f64());
        let bound = which.constant(iv) / pf.powf(0.25);
        let mut push = |count: i64, target: f64| {
            let empirical = Rational::new(count, p as i64);
            let gap = (empirical.to_f64() - target).abs();
            rows.push(DiscrepancyRow {
                lo: iv.lo.clone(),
                hi: iv.hi.clone(),
                empirical,
                target,
                gap,
                bound,
                pass: gap <= bound + PASS_SLACK,
            });
        };
        match which {
            Statistic::ClausenN => {
                let c = interval_counts(table, iv)?;
                push(c.n, 2.0 * mu_st(lo, hi)?);
            }
            Statistic::ClausenHpm => {
                let c = interval_counts(table, iv)?;
                let st = mu_st(lo, hi)?;
                push(c.h_plus, st);
                push(c.h_minus, st);
            }
            Statistic::ClausenM => {
                let c = interval_counts(table, iv)?;
                push(c.m, 0.0);
            }
            Statistic::Batman => {
                push(empirical_a_count(values, iv)?, mu_bat(lo, hi)?);
            }
        }
    }
    let max_gap = rows.iter().map(|r| r.gap).fold(0.0, f64::max);
    Ok(DiscrepancyReport { p, statistic: which, rows, max_gap })
}

/// `n` equal-width intervals partitioning `[lo, hi]`.
pub fn uniform_grid(lo: i64, hi: i64, n: usize) -> Vec<Interval> {
    let n = n as i64;
    let width = hi - lo;
    (0..n)
        .map(|k| Interval {
            lo: Rational::new(lo * n + width * k, n),
            hi: Rational::new(lo * n + width * (k + 1), n),
        })
        .collect()
}

/// `count` random intervals in `[lo, hi]` with endpoints on the lattice
/// `(1/denominator)Z`.
pub fn random_grid(seed: u64, count: usize, lo: i64, hi: i64, denominator: i64) -> Vec<Interval> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let (a_min, a_max) = (lo * denominator, hi * denominator);
    (0..count)
        .map(|_| {
            let x = rng.gen_range(a_min..a_max);
            let y = rng.gen_range(x + 1..=a_max);
            Interval { lo: Rational::new(x, denominator), hi: Rational::new(y, denominator) }
        })
        .collect()
}

/// Default grid for a statistic: a uniform partition of its domain.
pub fn default_grid(which: Statistic, n: usize) -> Vec<Interval> {
    let (lo, hi) = which.domain();
    uniform_grid(lo, hi, n)
}
