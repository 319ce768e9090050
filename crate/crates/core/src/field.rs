//! Prime fields: the quadratic character table and the two-squares split
//! of primes congruent to 1 mod 4.

use crate::error::{Error, Result};

/// Deterministic Miller-Rabin bases covering every 64-bit input.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Returns `None` if `n` is prime, otherwise a witness of compositeness
/// (a small factor or a Miller-Rabin base).
pub fn compositeness_witness(n: u64) -> Option<u64> {
    if n < 2 {
        return Some(n);
    }
    for &q in &MR_BASES {
        if n == q {
            return None;
        }
        if n.is_multiple_of(q) {
            return Some(q);
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'base: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'base;
            }
        }
        return Some(a);
    }
    None
}

pub fn is_prime(n: u64) -> bool {
    compositeness_witness(n).is_none()
}

/// All primes in `[lo, hi]`.
pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

/// A prime `p >= 5` together with its Legendre-symbol table.
#[derive(Debug, Clone)]
pub struct FieldContext {
    p: u64,
    chi_table: Vec<i8>,
}

impl FieldContext {
    pub fn new(p: u64) -> Result<Self> {
        if let Some(witness) = compositeness_witness(p) {
            return Err(Error::Composite { p, witness });
        }
        if p < 5 {
            return Err(Error::PrimeTooSmall(p));
        }
        let len = usize::try_from(p).map_err(|_| Error::Argument(format!("p = {p} too large")))?;
        let mut chi_table = vec![-1i8; len];
        chi_table[0] = 0;
        for x in 1..=(p - 1) / 2 {
            chi_table[mul_mod(x, x, p) as usize] = 1;
        }
        Ok(Self { p, chi_table })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn chi_table(&self) -> &[i8] {
        &self.chi_table
    }

    /// Legendre symbol of `x` (reduced mod p).
    #[inline]
    pub fn chi(&self, x: u64) -> i8 {
        self.chi_table[(x % self.p) as usize]
    }

    /// Multiplicative inverse of a nonzero element.
    pub fn inv(&self, x: u64) -> u64 {
        debug_assert!(!x.is_multiple_of(self.p));
        pow_mod(x, self.p - 2, self.p)
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.p)
    }
}

/// Writes `p = a^2 + b^2` with `a` odd and both positive; `None` when
/// `p ≡ 3 (mod 4)`.
pub fn two_squares(p: u64) -> Option<(u64, u64)> {
    if p % 4 != 1 {
        return None;
    }
    // Cornacchia: start from a square root of -1 mod p.
    let mut z = 2;
    let r = loop {
        let c = pow_mod(z, (p - 1) / 4, p);
        if mul_mod(c, c, p) == p - 1 {
            break c;
        }
        z += 1;
    };
    let (mut x, mut y) = (p, r.max(p - r));
    while y * y > p {
        let t = x % y;
        x = y;
        y = t;
    }
    let a = y;
    let b = isqrt(p - a * a);
    debug_assert_eq!(a * a + b * b, p);
    Some(if a % 2 == 1 { (a, b) } else { (b, a) })
}

pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}
