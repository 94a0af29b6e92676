//! Parameterised families whose derangement proportions fill intervals, and searches for
//! a member within `ε` of a target.
//!
//! Chain values are exact rationals while they stay small. Past that they are carried as
//! enclosures `[lo, hi]` with 256-bit fixed-point endpoints rounded outward, and every
//! decision is taken on the enclosure, so a reported witness is always within `ε`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{
    d_seq, divisors, e_seq, euler_phi, is_prime, next_prime, prime_power, rat, rat_int, rat_ratio, BigRational,
    RationalPoly,
};
use crate::formulas::power_delta_cyclic;
use crate::groupstats::cycle_count_vector;
use crate::permcore::PermGroup;

/// Largest prime (or prime power) and chain length a search will try.
pub const SEARCH_CAP: u64 = 1_000_000;

/// Exact chain values are abandoned for enclosures once numerator plus denominator exceed
/// this many bits.
const EXACT_BITS: u64 = 1 << 14;

/// Exact cyclic values are computed for `n` up to this bound.
const EXACT_CYCLIC_DEGREE: u64 = 2_000_000;

const PREC: usize = 256;

/// `P_C(x)` for `C = AGL_1(q)` acting on the `q` affine points.
pub fn agl1_fix_pgf(q: u64) -> Result<RationalPoly> {
    if q < 2 || prime_power(q).is_none() {
        return Err(Error::NotPrimePower(q));
    }
    let mut coeffs = vec![BigRational::zero(); q as usize + 1];
    coeffs[0] = rat_ratio(1, q);
    coeffs[1] += rat_ratio(q - 2, q - 1);
    coeffs[q as usize] += rat_ratio(1, q * (q - 1));
    Ok(RationalPoly::from_coeffs(coeffs))
}

/// `c_0 = δ(A)`, `c_i = P_C(c_{i−1})` for `i = 1..=r`, exactly.
///
/// The bit length of `c_i` grows like `q^i`; keep `r` small or use the searches, which switch
/// to enclosures.
pub fn imprimitive_chain(delta_a: &BigRational, q: u64, r: usize) -> Result<Vec<BigRational>> {
    let p = agl1_fix_pgf(q)?;
    let mut chain = vec![delta_a.clone()];
    for _ in 0..r {
        let next = p.eval(chain.last().expect("nonempty"));
        chain.push(next);
    }
    Ok(chain)
}

/// A closed interval known to contain a value; `lo == hi` when the value is exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Enclosure {
    pub fn exact(x: BigRational) -> Self {
        Enclosure { lo: x.clone(), hi: x }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn exact_value(&self) -> Option<&BigRational> {
        self.is_exact().then_some(&self.lo)
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / rat(2, 1)
    }

    /// Whether every point of the enclosure is within `eps` of `target`.
    pub fn within(&self, target: &BigRational, eps: &BigRational) -> bool {
        self.lo >= target - eps && self.hi <= target + eps
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// `A ≀_I AGL_1(q) ≀_I ⋯ ≀_I AGL_1(q)` with `steps` copies of `AGL_1(q)`.
    ImprimitiveAglChain { q: u64, steps: u64 },
    /// `A ≀_P Z` with `Z` regular cyclic of degree `∏ primes`.
    CyclicPowerChain { primes: Vec<u64> },
    /// `A ≀_P B` with `A` the named catalog group.
    InvertedPowerMap { name: String, delta_a: BigRational },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::ImprimitiveAglChain { .. } => "imprimitive-agl-chain",
            Family::CyclicPowerChain { .. } => "cyclic-power-chain",
            Family::InvertedPowerMap { .. } => "inverted-power-map",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityWitness {
    pub family: Family,
    pub value: Enclosure,
    pub target: BigRational,
    pub epsilon: BigRational,
}

impl DensityWitness {
    pub fn satisfies_contract(&self) -> bool {
        self.value.within(&self.target, &self.epsilon)
    }
}

impl fmt::Display for DensityWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::ImprimitiveAglChain { q, steps } => write!(f, "q={q}, steps={steps}")?,
            Family::CyclicPowerChain { primes } => write!(f, "primes={primes:?}")?,
            Family::InvertedPowerMap { name, delta_a } => write!(f, "A={name} (delta {delta_a})")?,
        }
        match self.value.exact_value() {
            Some(v) => write!(f, ", value={v}"),
            None => write!(f, ", value in [{}, {}]", self.value.lo, self.value.hi),
        }
    }
}

// Fixed-point helpers: an integer m stands for m / 2^PREC. All operands are nonnegative.

fn fx_one() -> BigInt {
    BigInt::one() << PREC
}

fn fx_from(x: &BigRational, up: bool) -> BigInt {
    let scaled = x.numer() * fx_one();
    let (q, r) = scaled.div_mod_floor(x.denom());
    if up && !r.is_zero() {
        q + 1
    } else {
        q
    }
}

fn fx_to(m: &BigInt) -> BigRational {
    BigRational::new(m.clone(), fx_one())
}

fn fx_mul(a: &BigInt, b: &BigInt, up: bool) -> BigInt {
    let p = a * b;
    if up {
        (p + fx_one() - 1) >> PREC
    } else {
        p >> PREC
    }
}

fn fx_div(a: &BigInt, d: u64, up: bool) -> BigInt {
    let d = BigInt::from(d);
    if up {
        a.div_ceil(&d)
    } else {
        a.div_floor(&d)
    }
}

fn fx_pow(x: &BigInt, mut e: u64, up: bool) -> BigInt {
    let mut result = fx_one();
    let mut base = x.clone();
    while e > 0 {
        if e & 1 == 1 {
            result = fx_mul(&result, &base, up);
        }
        e >>= 1;
        if e > 0 {
            base = fx_mul(&base, &base, up);
        }
    }
    result
}

/// `P_C` on a fixed-point value, rounded down or up. `P_C` is increasing on `[0, 1]`.
fn fx_agl_step(x: &BigInt, q: u64, up: bool) -> BigInt {
    let t0 = fx_div(&fx_one(), q, up);
    let t1 = fx_div(&(x * BigInt::from(q - 2)), q - 1, up);
    let t2 = fx_div(&fx_pow(x, q, up), q * (q - 1), up);
    let v = t0 + t1 + t2;
    if up {
        v.min(fx_one())
    } else {
        v
    }
}

#[derive(Clone, Debug)]
enum ChainValue {
    Exact(BigRational),
    Fixed(BigInt, BigInt),
}

impl ChainValue {
    fn enclosure(&self) -> Enclosure {
        match self {
            ChainValue::Exact(x) => Enclosure::exact(x.clone()),
            ChainValue::Fixed(lo, hi) => Enclosure {
                lo: fx_to(lo),
                hi: fx_to(hi),
            },
        }
    }

    fn step(&self, q: u64, p: &RationalPoly) -> ChainValue {
        match self {
            ChainValue::Exact(x) if q.saturating_mul(x.numer().bits() + x.denom().bits()) <= EXACT_BITS => {
                ChainValue::Exact(p.eval(x))
            }
            ChainValue::Exact(x) => {
                ChainValue::Fixed(fx_agl_step(&fx_from(x, false), q, false), fx_agl_step(&fx_from(x, true), q, true))
            }
            ChainValue::Fixed(lo, hi) => ChainValue::Fixed(fx_agl_step(lo, q, false), fx_agl_step(hi, q, true)),
        }
    }
}

fn check_search_inputs(delta_a: &BigRational, target: &BigRational, eps: &BigRational) -> Result<()> {
    if !eps.is_positive() {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    if delta_a.is_negative() || delta_a > &BigRational::one() {
        return Err(Error::InvalidArgument("delta(A) must lie in [0, 1]".into()));
    }
    if target < delta_a || target > &BigRational::one() {
        return Err(Error::InvalidArgument(format!(
            "target {target} outside [{delta_a}, 1]"
        )));
    }
    Ok(())
}

/// Smallest `(q, i)`, `q` prime, with `|c_i − target| ≤ ε` along the `AGL_1(q)` chain from
/// `δ(A)`.
///
/// Primes are tried in increasing order up to the least prime `q_0 > 1/ε`, for which the
/// chain's steps are shorter than `ε` and a hit is guaranteed.
pub fn density_search_imprimitive(delta_a: &BigRational, target: &BigRational, eps: &BigRational) -> Result<DensityWitness> {
    check_search_inputs(delta_a, target, eps)?;
    let upper = target + eps;
    let floor_inv = (eps.recip()).floor().to_integer();
    let q0 = match u64::try_from(floor_inv) {
        Ok(v) if v < SEARCH_CAP => next_prime(v),
        _ => SEARCH_CAP + 1,
    };
    let mut q = 3;
    while q <= q0.min(SEARCH_CAP) {
        let p = agl1_fix_pgf(q)?;
        let mut c = ChainValue::Exact(delta_a.clone());
        for i in 0..=SEARCH_CAP {
            let enc = c.enclosure();
            if enc.within(target, eps) {
                return Ok(DensityWitness {
                    family: Family::ImprimitiveAglChain { q, steps: i },
                    value: enc,
                    target: target.clone(),
                    epsilon: eps.clone(),
                });
            }
            if enc.lo > upper || enc.hi >= BigRational::one() && enc.lo >= BigRational::one() {
                break;
            }
            c = c.step(q, &p);
        }
        q = next_prime(q);
    }
    Err(Error::EpsilonTooSmall(format!(
        "no AGL1 chain with q <= {} reaches within {eps} of {target}",
        q0.min(SEARCH_CAP)
    )))
}

/// `D(n, q) = (1/(nq)) Σ_{d|n} φ(d) z^{n/d} (1 − z^{(n/d)(q−1)})` with `z = 1 − δ(A)`.
pub fn step_size(delta_a: &BigRational, n: u64, q: u64) -> Result<BigRational> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if n == 0 || n % q == 0 {
        return Err(Error::InvalidArgument(format!("need n >= 1 and q not dividing n (n={n}, q={q})")));
    }
    let z = BigRational::one() - delta_a;
    let mut total = BigRational::zero();
    for d in divisors(n) {
        let zd = crate::exactmath::pow_rational(&z, n / d);
        let tail = BigRational::one() - crate::exactmath::pow_rational(&zd, q - 1);
        total += rat_int(euler_phi(d)) * zd * tail;
    }
    Ok(total / rat_int(n * q))
}

/// Enclosure of `1 − (1/n) Σ_{d|n} φ(d) z^{n/d}` from fixed-point bounds on `z`.
fn cyclic_enclosure(z_lo: &BigInt, z_hi: &BigInt, n: u64) -> (BigInt, BigInt) {
    let mut s_lo = BigInt::zero();
    let mut s_hi = BigInt::zero();
    for d in divisors(n) {
        let phi = BigInt::from(euler_phi(d));
        s_lo += &phi * fx_pow(z_lo, n / d, false);
        s_hi += &phi * fx_pow(z_hi, n / d, true);
    }
    let one = fx_one();
    (&one - fx_div(&s_hi, n, true), one - fx_div(&s_lo, n, false))
}

/// Primes `p_1 < ⋯ < p_r` with `|δ(A ≀_P Z) − target| ≤ ε`, `Z` regular cyclic of degree
/// `p_1 ⋯ p_r`.
///
/// `p_1` is the least prime whose single-prime value does not overshoot `target + ε`; each
/// later prime is the least prime above the previous one whose step does not overshoot.
/// The values increase strictly and the steps shrink as the primes grow, so the walk stops
/// inside the window.
pub fn density_search_power_regular(delta_a: &BigRational, target: &BigRational, eps: &BigRational) -> Result<DensityWitness> {
    check_search_inputs(delta_a, target, eps)?;
    let witness = |primes: Vec<u64>, value: Enclosure| DensityWitness {
        family: Family::CyclicPowerChain { primes },
        value,
        target: target.clone(),
        epsilon: eps.clone(),
    };
    if delta_a.is_zero() || delta_a.is_one() {
        // the cyclic chain is constant at δ(A)
        let value = Enclosure::exact(delta_a.clone());
        if value.within(target, eps) {
            return Ok(witness(vec![2], value));
        }
        return Err(Error::DegenerateDelta(format!(
            "delta(A) = {delta_a} gives a constant chain that never reaches {target}"
        )));
    }
    let z = BigRational::one() - delta_a;
    let (z_lo, z_hi) = (fx_from(&z, false), fx_from(&z, true));
    let lower = fx_from(&(target - eps), true);
    let upper = fx_from(&(target + eps), false);

    let mut primes: Vec<u64> = Vec::new();
    let mut n = 1u64;
    let mut p = 2u64;
    loop {
        let (lo, hi) = loop {
            if p > SEARCH_CAP {
                return Err(Error::EpsilonTooSmall(format!(
                    "no prime up to {SEARCH_CAP} extends {primes:?} without overshooting {target} + {eps}"
                )));
            }
            let candidate = n.checked_mul(p).ok_or_else(|| {
                Error::EpsilonTooSmall(format!("degree overflow extending {primes:?}"))
            })?;
            let (lo, hi) = cyclic_enclosure(&z_lo, &z_hi, candidate);
            if hi <= upper {
                break (lo, hi);
            }
            p = next_prime(p);
        };
        primes.push(p);
        n *= p;
        if lo >= lower {
            let value = if n <= EXACT_CYCLIC_DEGREE {
                Enclosure::exact(power_delta_cyclic(delta_a, n)?)
            } else {
                Enclosure {
                    lo: fx_to(&lo),
                    hi: fx_to(&hi),
                }
            };
            return Ok(witness(primes, value));
        }
        p = next_prime(p);
    }
}

/// `x ∈ [0, 1]` with `|1 − C_B(1 − x) − target| ≤ tol`, by bisection.
pub fn invert_power_map(c_b: &RationalPoly, target: &BigRational, tol: &BigRational) -> Result<BigRational> {
    let one = BigRational::one();
    if target.is_negative() || target > &one {
        return Err(Error::InvalidArgument(format!("target {target} outside [0, 1]")));
    }
    if !tol.is_positive() {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let f = |x: &BigRational| &one - c_b.eval(&(&one - x));
    let (mut lo, mut hi) = (BigRational::zero(), one.clone());
    for x in [&lo, &hi] {
        if (f(x) - target).abs() <= *tol {
            return Ok(x.clone());
        }
    }
    for _ in 0..4096 {
        let mid = (&lo + &hi) / rat(2, 1);
        let v = f(&mid);
        if (&v - target).abs() <= *tol {
            return Ok(mid);
        }
        if &v < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::EpsilonTooSmall(format!("bisection did not reach tolerance {tol}")))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: String,
    pub delta: BigRational,
}

/// `S_m` (`2 ≤ m ≤ 16`), `A_m` (`3 ≤ m ≤ 16`), `C_p` and `AGL_1(p)` (`p ≤ 97`) with their
/// derangement proportions.
pub fn default_catalog() -> Vec<CatalogEntry> {
    let mut entries = Vec::new();
    for m in 2..=16u64 {
        entries.push(CatalogEntry {
            name: format!("S({m})"),
            delta: d_seq(m),
        });
    }
    for m in 3..=16u64 {
        entries.push(CatalogEntry {
            name: format!("A({m})"),
            delta: d_seq(m) + e_seq(m),
        });
    }
    let mut p = 2;
    while p <= 97 {
        entries.push(CatalogEntry {
            name: format!("C({p})"),
            delta: rat_ratio(p - 1, p),
        });
        entries.push(CatalogEntry {
            name: format!("AGL1({p})"),
            delta: rat_ratio(1, p),
        });
        p = next_prime(p);
    }
    entries
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimitiveSearch {
    Found(DensityWitness),
    /// No catalog group lands within `ε`; the closest one is reported.
    Infeasible {
        x_star: BigRational,
        nearest: String,
        nearest_value: BigRational,
        reason: String,
    },
}

/// Inverts `f(x) = 1 − C_B(1 − x)` at the target and picks the catalog group whose
/// `f(δ)` is closest to it.
pub fn density_search_power_primitive(
    b: &PermGroup,
    target: &BigRational,
    eps: &BigRational,
    catalog: &[CatalogEntry],
    cap: usize,
) -> Result<PrimitiveSearch> {
    if catalog.is_empty() {
        return Err(Error::InvalidArgument("empty catalog".into()));
    }
    if !eps.is_positive() {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    let c_b = cycle_count_vector(b, cap)?.pgf();
    let x_star = invert_power_map(&c_b, target, &(eps / rat(4, 1)))?;
    let one = BigRational::one();
    let f = |x: &BigRational| &one - c_b.eval(&(&one - x));
    let (best, value) = catalog
        .iter()
        .map(|e| (e, f(&e.delta)))
        .min_by(|(_, u), (_, v)| (u - target).abs().cmp(&(v - target).abs()))
        .expect("nonempty catalog");
    if (&value - target).abs() <= *eps {
        return Ok(PrimitiveSearch::Found(DensityWitness {
            family: Family::InvertedPowerMap {
                name: best.name.clone(),
                delta_a: best.delta.clone(),
            },
            value: Enclosure::exact(value),
            target: target.clone(),
            epsilon: eps.clone(),
        }));
    }
    Ok(PrimitiveSearch::Infeasible {
        x_star,
        nearest: best.name.clone(),
        nearest_value: value,
        reason: "catalog-limited: no catalog group is within epsilon; dense primitive families are not constructed".into(),
    })
}

/// Product of a prime list, for re-evaluating cyclic witnesses.
pub fn prime_product(primes: &[u64]) -> BigUint {
    primes.iter().map(|&p| BigUint::from(p)).product()
}
