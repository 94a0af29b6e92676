//! Exact rational arithmetic, integer sequences and dense rational polynomials.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Mutex;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;

use crate::error::{Error, Result};

/// Largest `n` served by the memoised Stirling table.
pub const STIRLING_TABLE_CAP: usize = 512;

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

pub fn rat_ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// `Σ_{k=0}^{n} (−1)^k / k!`.
pub fn d_seq(n: u64) -> BigRational {
    // n! · d_n = Σ (−1)^k n!/k!, accumulated from the top term down.
    let mut sum = BigInt::zero();
    let mut falling = BigInt::one();
    for k in (0..=n).rev() {
        if k % 2 == 0 {
            sum += &falling;
        } else {
            sum -= &falling;
        }
        falling *= BigInt::from(k.max(1));
    }
    BigRational::new(sum, BigInt::from(factorial(n)))
}

/// `e_0 = 1`, and `(−1)^{n−1} (n−1) / n!` for `n ≥ 1`.
pub fn e_seq(n: u64) -> BigRational {
    if n == 0 {
        return BigRational::one();
    }
    let magnitude = BigRational::new(BigInt::from(n - 1), BigInt::from(factorial(n)));
    if (n - 1) % 2 == 0 {
        magnitude
    } else {
        -magnitude
    }
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Prime factorisation by trial division, as `(prime, exponent)` pairs in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == [(n, 1)]
}

/// Returns `(p, e)` with `n = p^e`, or `None` if `n` is not a prime power.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    match factorize(n).as_slice() {
        [(p, e)] => Some((*p, *e)),
        _ => None,
    }
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n + 1;
    while !is_prime(c) {
        c += 1;
    }
    c
}

pub fn euler_phi(n: u64) -> u64 {
    assert!(n >= 1, "euler_phi is defined for n >= 1");
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// All positive divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factorize(n) {
        let current = divs.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            divs.extend(current.iter().map(|d| d * pk));
        }
    }
    divs.sort_unstable();
    divs
}

static STIRLING_ROWS: Mutex<Vec<Vec<BigUint>>> = Mutex::new(Vec::new());

/// Unsigned Stirling number of the first kind: permutations of `[n]` with exactly `l` cycles.
///
/// Rows are built once by the triangular recurrence and kept for later calls. Values of `l`
/// outside `1..=n` give zero.
pub fn stirling_first_unsigned(n: usize, l: i64) -> Result<BigUint> {
    if n > STIRLING_TABLE_CAP {
        return Err(Error::InvalidArgument(format!(
            "Stirling table is capped at n = {STIRLING_TABLE_CAP}, got {n}"
        )));
    }
    if l < 0 || l as usize > n || (l == 0 && n > 0) {
        return Ok(BigUint::zero());
    }
    let mut rows = STIRLING_ROWS.lock().unwrap_or_else(|e| e.into_inner());
    if rows.is_empty() {
        rows.push(vec![BigUint::one()]);
    }
    while rows.len() <= n {
        let m = rows.len() - 1;
        let prev = &rows[m];
        let mut next = vec![BigUint::zero(); m + 2];
        for (j, slot) in next.iter_mut().enumerate().skip(1) {
            let left = &prev[j - 1];
            let right = prev.get(j).map(|v| v * m).unwrap_or_default();
            *slot = left + right;
        }
        rows.push(next);
    }
    Ok(rows[n][l as usize].clone())
}

/// All of `stir(n, 0..=n)`.
pub fn stirling_row(n: usize) -> Result<Vec<BigUint>> {
    (0..=n as i64).map(|l| stirling_first_unsigned(n, l)).collect()
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exact `x^e` for rational `x` and nonnegative `e`.
pub fn pow_rational(x: &BigRational, e: u64) -> BigRational {
    let e32 = u32::try_from(e).expect("exponent fits in u32");
    BigRational::new(
        num_traits::pow::Pow::pow(x.numer(), e32),
        num_traits::pow::Pow::pow(x.denom(), e32),
    )
}

/// Parses `p/q` or an integer. Decimal literals are rejected.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let err = || Error::InvalidArgument(format!("expected a rational literal p/q, got {text:?}"));
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err())?;
    let den: BigInt = den.parse().map_err(|_| err())?;
    if den.is_zero() {
        return Err(Error::InvalidArgument("zero denominator".into()));
    }
    Ok(BigRational::new(num, den))
}

/// Correctly rounded decimal with `sig` significant digits (ties away from zero).
///
/// Positional notation is used for magnitudes in `[1e-6, 1e15)`, scientific otherwise.
pub fn format_decimal(x: &BigRational, sig: usize) -> String {
    assert!(sig >= 1);
    if x.is_zero() {
        return "0".to_string();
    }
    let negative = x.is_negative();
    let a = x.abs();
    let pow10 = |e: i64| -> BigRational {
        let p = num_traits::pow::Pow::pow(BigInt::from(10), e.unsigned_abs() as u32);
        if e >= 0 {
            BigRational::from_integer(p)
        } else {
            BigRational::new(BigInt::one(), p)
        }
    };
    // exponent e with 10^e <= a < 10^(e+1)
    let bits = a.numer().bits() as i64 - a.denom().bits() as i64;
    let mut e = (bits as f64 * std::f64::consts::LOG10_2).floor() as i64;
    while pow10(e) > a {
        e -= 1;
    }
    while pow10(e + 1) <= a {
        e += 1;
    }
    let scaled = &a * pow10(sig as i64 - 1 - e);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut digits_int = (scaled + half).floor().to_integer();
    let limit = num_traits::pow::Pow::pow(BigInt::from(10), sig as u32);
    if digits_int >= limit {
        digits_int /= 10;
        e += 1;
    }
    let digits = digits_int.to_string();
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if (-6..15).contains(&e) {
        if e >= 0 {
            let int_len = (e + 1) as usize;
            if int_len >= digits.len() {
                out.push_str(&digits);
                out.extend(std::iter::repeat('0').take(int_len - digits.len()));
            } else {
                out.push_str(&digits[..int_len]);
                out.push('.');
                out.push_str(&digits[int_len..]);
            }
        } else {
            out.push_str("0.");
            out.extend(std::iter::repeat('0').take((-e - 1) as usize));
            out.push_str(&digits);
        }
    } else {
        out.push_str(&digits[..1]);
        if digits.len() > 1 {
            out.push('.');
            out.push_str(&digits[1..]);
        }
        out.push_str(&format!("e{e}"));
    }
    out
}

/// Dense univariate polynomial with exact rational coefficients, lowest degree first.
///
/// Trailing zero coefficients are always trimmed, so the zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
}

impl RationalPoly {
    pub fn zero() -> Self {
        RationalPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn x() -> Self {
        Self::monomial(BigRational::one(), 1)
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn monomial(c: BigRational, degree: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); degree + 1];
        coeffs[degree] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RationalPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    /// `self(inner(x))`.
    pub fn compose(&self, inner: &RationalPoly) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, c| &(&acc * inner) + &Self::constant(c.clone()))
    }

    /// Drops the constant term and divides by `x`. Returns `None` if the constant term is nonzero.
    pub fn div_x(&self) -> Option<Self> {
        match self.coeffs.first() {
            None => Some(Self::zero()),
            Some(c) if c.is_zero() => Some(Self::from_coeffs(self.coeffs[1..].to_vec())),
            Some(_) => None,
        }
    }

    pub fn mul_x(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(BigRational::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        Self::from_coeffs(coeffs)
    }
}

impl Add for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RationalPoly::from_coeffs((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RationalPoly::from_coeffs((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        RationalPoly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        if self.is_zero() || rhs.is_zero() {
            return RationalPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPoly::from_coeffs(out)
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}*")?;
                    }
                    if i == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}
