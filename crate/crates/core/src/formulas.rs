//! Closed forms for fixed-point proportions of products, wreath products and sharply
//! transitive groups.
//!
//! Every evaluator takes spectra or generating polynomials rather than groups, so none of
//! them enumerates anything.

use std::collections::{HashMap, HashSet};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{
    d_seq, divisors, e_seq, euler_phi, factorial, pow_rational, rat_int, rat_ratio, stirling_row, to_f64,
    BigRational, RationalPoly,
};
use crate::groupstats::{CycleCountVector, FixSpectrum};
use crate::permcore::{PermGroup, Permutation};

/// `δ_0, …, δ_n` of a group or coset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaVector(Vec<BigRational>);

impl DeltaVector {
    pub fn new(entries: Vec<BigRational>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("empty delta vector".into()));
        }
        if entries.iter().any(|d| d.is_negative()) {
            return Err(Error::InvalidArgument("negative proportion".into()));
        }
        let sum: BigRational = entries.iter().sum();
        if !sum.is_one() {
            return Err(Error::InvalidArgument(format!("proportions sum to {sum}, not 1")));
        }
        Ok(DeltaVector(entries))
    }

    pub fn from_spectrum(s: &FixSpectrum) -> Self {
        DeltaVector(s.deltas())
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.0
    }

    /// Number of points; the last index.
    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    /// `δ_k`, zero beyond the degree.
    pub fn get(&self, k: usize) -> BigRational {
        self.0.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn delta(&self) -> &BigRational {
        &self.0[0]
    }

    pub fn pgf(&self) -> RationalPoly {
        RationalPoly::from_coeffs(self.0.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundsPair {
    pub lower: BigRational,
    pub upper: BigRational,
}

impl BoundsPair {
    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lower <= x && x <= &self.upper
    }
}

fn inv_factorial(n: u64) -> BigRational {
    rat_ratio(1, factorial(n))
}

fn signed_inv_factorial(j: u64) -> BigRational {
    let r = inv_factorial(j);
    if j % 2 == 0 {
        r
    } else {
        -r
    }
}

/// `δ_k` of a sharply `t`-transitive group of degree `n`.
pub fn sharply_transitive_delta_k(n: u64, t: u64, k: u64) -> Result<BigRational> {
    if n < 2 || t == 0 || t > n || k > n {
        return Err(Error::InvalidArgument(format!(
            "need n >= 2, 1 <= t <= n, k <= n (got n={n}, t={t}, k={k})"
        )));
    }
    if k == n {
        return Ok(rat_ratio(factorial(n - t), factorial(n)));
    }
    if k >= t {
        return Ok(BigRational::zero());
    }
    let first: BigRational = (0..t - k).map(signed_inv_factorial).sum();
    let second: BigRational = (t - k..=n - k)
        .map(|j| signed_inv_factorial(j) * inv_factorial(n - k - j))
        .sum();
    let scale = inv_factorial(k);
    Ok(&scale * first + scale * rat_int(factorial(n - t)) * second)
}

/// Derangement proportion of a sharply `t`-transitive group via the recurrence over
/// pointwise stabilisers of initial segments.
pub fn sharply_transitive_delta_recursive(n: u64, t: u64) -> Result<BigRational> {
    if t == 0 || t > n || n < 2 {
        return Err(Error::InvalidArgument(format!("need 1 <= t <= n and n >= 2 (got n={n}, t={t})")));
    }
    fn rec(n: u64, t: u64) -> BigRational {
        if n == 1 {
            return BigRational::zero();
        }
        let mut total = rat_ratio(factorial(n - t), BigUint::from(n) * factorial(n - 2));
        for k in 2..t {
            total += rec(n - k, t - k) * rat_ratio(1, BigUint::from(k) * factorial(k - 2));
        }
        total
    }
    Ok(rec(n, t))
}

/// `(δ_k(S_n), δ_k(A_n), δ_k(S_n ∖ A_n))`.
pub fn symmetric_family_delta_k(n: u64, k: u64) -> Result<(BigRational, BigRational, BigRational)> {
    if n == 0 || k > n {
        return Err(Error::InvalidArgument(format!("need n >= 1 and k <= n (got n={n}, k={k})")));
    }
    let d = d_seq(n - k);
    let e = e_seq(n - k);
    let f = inv_factorial(k);
    Ok((&d * &f, (&d + &e) * &f, (d - e) * f))
}

/// Additive convolution `Σ_{k_1+…+k_r=k} ∏ δ_{k_i}(C_i)`: intransitive direct products.
pub fn intransitive_delta_k(deltas: &[DeltaVector], k: usize) -> BigRational {
    intransitive_spectrum(deltas).get(k)
}

/// All `δ_k` of an intransitive direct product at once.
pub fn intransitive_spectrum(deltas: &[DeltaVector]) -> DeltaVector {
    let mut acc = RationalPoly::one();
    for d in deltas {
        acc = &acc * &d.pgf();
    }
    let degree: usize = deltas.iter().map(|d| d.degree()).sum();
    DeltaVector((0..=degree).map(|k| acc.coeff(k)).collect())
}

/// Multiplicative convolution over factorisations `i_1 ⋯ i_r = k`, factors in order.
fn multiplicative(deltas: &[&DeltaVector], k: usize, memo: &mut HashMap<(usize, usize), BigRational>) -> BigRational {
    if deltas.is_empty() {
        return if k == 1 { BigRational::one() } else { BigRational::zero() };
    }
    if k == 0 {
        let prod = deltas
            .iter()
            .fold(BigRational::one(), |acc, d| acc * (BigRational::one() - d.delta()));
        return BigRational::one() - prod;
    }
    let key = (deltas.len(), k);
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let head = deltas[0];
    let mut total = BigRational::zero();
    for d in divisors(k as u64) {
        let d = d as usize;
        if d > head.degree() {
            break;
        }
        let a = head.get(d);
        if a.is_zero() {
            continue;
        }
        total += a * multiplicative(&deltas[1..], k / d, memo);
    }
    memo.insert(key, total.clone());
    total
}

/// `Σ_{i_1⋯i_r=k} ∏ δ_{i_s}(C_s)`: direct products in product action.
pub fn product_action_delta_k(deltas: &[DeltaVector], k: usize) -> BigRational {
    let refs: Vec<&DeltaVector> = deltas.iter().collect();
    multiplicative(&refs, k, &mut HashMap::new())
}

/// `Σ_ℓ δ_ℓ(B) [x^k] P_A(x)^ℓ`.
pub fn imprimitive_delta_k(delta_a: &DeltaVector, delta_b: &DeltaVector, k: usize) -> BigRational {
    let pa = truncate(&delta_a.pgf(), k);
    let mut power = RationalPoly::one();
    let mut total = BigRational::zero();
    for l in 0..=delta_b.degree() {
        if l > 0 {
            power = truncate(&(&power * &pa), k);
        }
        let b = delta_b.get(l);
        if !b.is_zero() {
            total += b * power.coeff(k);
        }
    }
    total
}

/// All `δ_k` of `A ≀_I B`: the composition `P_B(P_A(x))`.
pub fn imprimitive_spectrum(delta_a: &DeltaVector, delta_b: &DeltaVector) -> DeltaVector {
    let p = delta_b.pgf().compose(&delta_a.pgf());
    let degree = delta_a.degree() * delta_b.degree();
    DeltaVector((0..=degree).map(|k| p.coeff(k)).collect())
}

fn truncate(p: &RationalPoly, k: usize) -> RationalPoly {
    RationalPoly::from_coeffs(p.coeffs().iter().take(k + 1).cloned().collect())
}

/// `δ_1(A)·P_B'(δ(A))`.
pub fn imprimitive_delta1(delta_a1: &BigRational, p_b: &RationalPoly, delta_a0: &BigRational) -> BigRational {
    delta_a1 * p_b.derivative().eval(delta_a0)
}

/// `δ_k` of the base-group coset `A^[n]·b` in power action, where `b` has `l` cycles.
pub fn power_coset_delta_k(delta_a: &DeltaVector, l: usize, k: usize) -> Result<BigRational> {
    if l == 0 {
        return Err(Error::InvalidArgument("a permutation has at least one cycle".into()));
    }
    let refs = vec![delta_a; l];
    Ok(multiplicative(&refs, k, &mut HashMap::new()))
}

/// `(1/|B|) Σ_ℓ stir(B,ℓ) Σ_{j_1⋯j_ℓ=k} ∏ δ_{j_r}(A)`: `δ_k(A ≀_P B)`.
pub fn power_delta_k(delta_a: &DeltaVector, stir_b: &CycleCountVector, k: usize) -> BigRational {
    let mut memo = HashMap::new();
    power_delta_k_memo(delta_a, stir_b, k, &mut memo)
}

fn power_delta_k_memo(
    delta_a: &DeltaVector,
    stir_b: &CycleCountVector,
    k: usize,
    memo: &mut HashMap<(usize, usize), BigRational>,
) -> BigRational {
    let n = stir_b.degree;
    let refs = vec![delta_a; n];
    let mut total = BigRational::zero();
    for l in 1..=n {
        let c = stir_b.count(l);
        if c.is_zero() {
            continue;
        }
        total += rat_int(c) * multiplicative(&refs[n - l..], k, memo);
    }
    total / rat_int(stir_b.total.clone())
}

/// All `δ_k(A ≀_P B)` for `k = 0..=m^n`.
pub fn power_spectrum(delta_a: &DeltaVector, stir_b: &CycleCountVector) -> DeltaVector {
    let degree = num_traits::pow(delta_a.degree(), stir_b.degree);
    let mut memo = HashMap::new();
    DeltaVector(
        (0..=degree)
            .map(|k| power_delta_k_memo(delta_a, stir_b, k, &mut memo))
            .collect(),
    )
}

/// `C_B(δ_1(A))`.
pub fn power_delta1(delta_a1: &BigRational, c_b: &RationalPoly) -> BigRational {
    c_b.eval(delta_a1)
}

/// `1 − C_B(1 − δ(A))`.
pub fn power_delta(delta_a: &BigRational, c_b: &RationalPoly) -> BigRational {
    BigRational::one() - c_b.eval(&(BigRational::one() - delta_a))
}

/// `1 − (1/n) Σ_{d|n} φ(d) (1 − δ)^{n/d}`.
pub fn power_delta_cyclic(delta: &BigRational, n: u64) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::InvalidArgument("cyclic top needs n >= 1".into()));
    }
    let z = BigRational::one() - delta;
    // z = a/b; the divisor sum is Σ φ(d) a^{n/d} b^{n - n/d} / b^n
    let (a, b) = (z.numer().clone(), z.denom().clone());
    let mut numer = BigInt::zero();
    for d in divisors(n) {
        let e = (n / d) as usize;
        numer += BigInt::from(euler_phi(d)) * num_traits::pow(a.clone(), e) * num_traits::pow(b.clone(), n as usize - e);
    }
    let denom = BigInt::from(n) * num_traits::pow(b, n as usize);
    Ok(BigRational::one() - BigRational::new(numer, denom))
}

/// `1 − ∏_{ℓ=1}^n (1 − δ/ℓ)`.
pub fn power_delta_full_symmetric(delta: &BigRational, n: u64) -> BigRational {
    let prod = (1..=n).fold(BigRational::one(), |acc, l| acc * (BigRational::one() - delta / rat_int(l)));
    BigRational::one() - prod
}

/// `1 − n^{−δ}` in floating point.
pub fn power_symmetric_lower_bound(delta: &BigRational, n: u64) -> f64 {
    1.0 - (n as f64).powf(-to_f64(delta))
}

/// `((r − 1)/n, 1 − 1/r)` for a transitive group of rank `r` and degree `n`.
pub fn rank_bounds(r: u64, n: u64) -> Result<BoundsPair> {
    if r < 2 || n < 2 {
        return Err(Error::InvalidArgument(format!("need r >= 2 and n >= 2 (got r={r}, n={n})")));
    }
    Ok(BoundsPair {
        lower: rat_ratio(r - 1, n),
        upper: BigRational::one() - rat_ratio(1, r),
    })
}

/// `(1 − C_B(1 − δ_L), 1 − C_B(1 − δ_U))`.
pub fn sandwich_bounds(delta_l: &BigRational, delta_u: &BigRational, stir_b: &CycleCountVector) -> Result<BoundsPair> {
    let zero = BigRational::zero();
    let one = BigRational::one();
    if delta_l < &zero || delta_l > delta_u || delta_u > &one {
        return Err(Error::InvalidArgument("need 0 <= deltaL <= deltaU <= 1".into()));
    }
    let c_b = stir_b.pgf();
    Ok(BoundsPair {
        lower: power_delta(delta_l, &c_b),
        upper: power_delta(delta_u, &c_b),
    })
}

/// Checks `C ≤ A` and `C ⊴ A` on generators.
pub fn check_normal(a: &PermGroup, c: &PermGroup, cap: usize) -> Result<()> {
    if a.degree() != c.degree() {
        return Err(Error::DegreeMismatch {
            left: a.degree(),
            right: c.degree(),
        });
    }
    for g in c.generators() {
        if !a.contains(g, cap)? {
            return Err(Error::InvalidArgument(format!("{g} is not in the ambient group")));
        }
    }
    for x in a.generators() {
        let xi = x.inverse();
        for g in c.generators() {
            if !c.contains(&xi.then(g).then(x), cap)? {
                return Err(Error::NotNormal);
            }
        }
    }
    Ok(())
}

/// `(min, max)` of `δ(Ca)` over the cosets of a normal subgroup `C` of `A`.
pub fn coset_delta_extrema(a: &PermGroup, c: &PermGroup, cap: usize) -> Result<(BigRational, BigRational)> {
    check_normal(a, c, cap)?;
    let sub = c.enumerate(cap)?;
    let mut covered: HashSet<Permutation> = HashSet::new();
    let mut extrema: Option<(BigRational, BigRational)> = None;
    for rep in a.enumerate(cap)?.iter() {
        if covered.contains(rep) {
            continue;
        }
        let mut derangements = 0u64;
        for x in sub.iter() {
            let y = x.then(rep);
            if y.is_derangement() {
                derangements += 1;
            }
            covered.insert(y);
        }
        let d = rat_ratio(derangements, sub.len());
        extrema = Some(match extrema {
            None => (d.clone(), d),
            Some((lo, hi)) => (lo.min(d.clone()), hi.max(d)),
        });
    }
    Ok(extrema.expect("a group has at least one coset"))
}

/// `stir(S_n, ·)` from Stirling numbers, no enumeration.
pub fn symmetric_cycle_counts(n: usize) -> Result<CycleCountVector> {
    Ok(CycleCountVector::from_counts(stirling_row(n)?))
}

/// `stir(C_n, ·)`: `φ(n/d)` elements with `d` cycles for each divisor `d` of `n`.
pub fn cyclic_cycle_counts(n: u64) -> CycleCountVector {
    let mut counts = vec![BigUint::zero(); n as usize + 1];
    for d in divisors(n) {
        counts[d as usize] = BigUint::from(euler_phi(n / d));
    }
    CycleCountVector::from_counts(counts)
}

/// `δ(A ≀_I S_n) = Σ_ℓ δ_ℓ(S_n) δ^ℓ`.
pub fn imprimitive_symmetric_delta(n: u64, delta_a: &BigRational) -> BigRational {
    (0..=n)
        .map(|l| d_seq(n - l) * inv_factorial(l) * pow_rational(delta_a, l))
        .sum()
}

/// `|δ(A ≀_I S_n) − e^{δ(A) − 1}|`.
pub fn limit_gap_imprimitive_symmetric(n: u64, delta_a: &BigRational) -> f64 {
    let value = to_f64(&imprimitive_symmetric_delta(n, delta_a));
    (value - (to_f64(delta_a) - 1.0).exp()).abs()
}

/// `|δ(S_n ≀_I S_n) − e^{e^{−1} − 1}|`.
pub fn doubly_symmetric_gap(n: u64) -> f64 {
    let value = to_f64(&imprimitive_symmetric_delta(n, &d_seq(n)));
    (value - ((-1.0f64).exp() - 1.0).exp()).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;
    use proptest::prelude::*;

    fn dv(v: &[(i64, i64)]) -> DeltaVector {
        DeltaVector::new(v.iter().map(|&(a, b)| rat(a, b)).collect()).unwrap()
    }

    fn s2() -> DeltaVector {
        dv(&[(1, 2), (0, 1), (1, 2)])
    }

    fn s3() -> DeltaVector {
        dv(&[(1, 3), (1, 2), (0, 1), (1, 6)])
    }

    #[test]
    fn sharply_transitive_examples() {
        assert_eq!(sharply_transitive_delta_k(5, 2, 0).unwrap(), rat(1, 5));
        assert_eq!(sharply_transitive_delta_k(4, 3, 0).unwrap(), rat(3, 8));
        assert_eq!(sharply_transitive_delta_k(4, 3, 3).unwrap(), rat(0, 1));
        assert_eq!(sharply_transitive_delta_recursive(4, 3).unwrap(), rat(3, 8));
        assert_eq!(sharply_transitive_delta_recursive(5, 2).unwrap(), rat(1, 5));
        // A_5: only the 24 five-cycles move every point
        assert_eq!(sharply_transitive_delta_recursive(5, 3).unwrap(), rat(2, 5));
        assert_eq!(sharply_transitive_delta_k(5, 1, 0).unwrap(), rat(4, 5));
    }

    #[test]
    fn sharply_transitive_spectra_sum_to_one_and_match_the_recurrence() {
        for n in 2..=9u64 {
            for t in 1..=n {
                let total: BigRational = (0..=n).map(|k| sharply_transitive_delta_k(n, t, k).unwrap()).sum();
                assert_eq!(total, rat(1, 1), "n={n} t={t}");
                assert_eq!(
                    sharply_transitive_delta_recursive(n, t).unwrap(),
                    sharply_transitive_delta_k(n, t, 0).unwrap()
                );
            }
        }
    }

    #[test]
    fn symmetric_family_examples_and_agreement() {
        assert_eq!(symmetric_family_delta_k(4, 0).unwrap(), (rat(3, 8), rat(1, 4), rat(1, 2)));
        assert_eq!(symmetric_family_delta_k(3, 1).unwrap(), (rat(1, 2), rat(0, 1), rat(1, 1)));
        for n in 2..=8u64 {
            let (s, a, _) = symmetric_family_delta_k(n, n).unwrap();
            assert_eq!(s, rat_ratio(1, factorial(n)));
            assert_eq!(a, rat_ratio(2, factorial(n)));
        }
        for n in 4..=8u64 {
            for k in 0..=n {
                let (s, a, _) = symmetric_family_delta_k(n, k).unwrap();
                assert_eq!(sharply_transitive_delta_k(n, n - 1, k).unwrap(), s);
                assert_eq!(sharply_transitive_delta_k(n, n - 2, k).unwrap(), a);
            }
        }
    }

    #[test]
    fn product_and_intransitive_examples() {
        assert_eq!(product_action_delta_k(&[s2(), s2()], 0), rat(3, 4));
        assert_eq!(product_action_delta_k(&[s2(), s3()], 6), rat(1, 12));
        for k in 0..=3 {
            assert_eq!(product_action_delta_k(&[s3()], k), s3().get(k));
            assert_eq!(intransitive_delta_k(&[s3()], k), s3().get(k));
        }
        assert_eq!(intransitive_delta_k(&[s2(), s2()], 0), rat(1, 4));
        assert_eq!(intransitive_delta_k(&[s2(), s2()], 2), rat(1, 2));
    }

    #[test]
    fn imprimitive_examples() {
        // dihedral of order 8 on the square: two rotations, the half turn, two edge reflections
        assert_eq!(imprimitive_delta_k(&s2(), &s2(), 0), rat(5, 8));
        let trivial1 = dv(&[(0, 1), (1, 1)]);
        for k in 0..=3 {
            assert_eq!(imprimitive_delta_k(&s3(), &trivial1, k), s3().get(k));
        }
        let c2 = s2();
        assert_eq!(imprimitive_delta_k(&s3(), &c2, 0), rat(5, 9));
        assert_eq!(imprimitive_delta1(&rat(1, 2), &c2.pgf(), &rat(1, 3)), rat(1, 6));
        assert_eq!(imprimitive_delta1(&rat(0, 1), &c2.pgf(), &rat(1, 3)), rat(0, 1));
        assert_eq!(imprimitive_delta1(&rat(1, 2), &RationalPoly::x(), &rat(1, 3)), rat(1, 2));
        let all = imprimitive_spectrum(&s3(), &c2);
        for k in 0..=6 {
            assert_eq!(all.get(k), imprimitive_delta_k(&s3(), &c2, k));
        }
    }

    #[test]
    fn power_examples() {
        assert_eq!(power_coset_delta_k(&s2(), 1, 0).unwrap(), rat(1, 2));
        assert_eq!(power_coset_delta_k(&s2(), 2, 0).unwrap(), rat(3, 4));
        // j1·j2 = 1 forces both factors to fix one point
        assert_eq!(power_coset_delta_k(&s3(), 2, 1).unwrap(), rat(1, 4));
        let c2 = cyclic_cycle_counts(2);
        let c3 = cyclic_cycle_counts(3);
        assert_eq!(power_delta_k(&s2(), &c2, 0), rat(5, 8));
        assert_eq!(power_delta_k(&s3(), &c3, 0), rat(37, 81));
        assert_eq!(power_delta_k(&s3(), &c3, 27), rat(1, 6 * 6 * 6 * 3));
        assert_eq!(power_delta1(&rat(1, 2), &c2.pgf()), rat(3, 8));
        assert_eq!(power_delta1(&rat(0, 1), &c2.pgf()), rat(0, 1));
        assert_eq!(power_delta1(&rat(1, 2), &RationalPoly::x()), rat(1, 2));
        let all = power_spectrum(&s3(), &c3);
        assert_eq!(all.entries().iter().sum::<BigRational>(), rat(1, 1));
        assert_eq!(all.get(0), rat(37, 81));
    }

    #[test]
    fn cyclic_and_symmetric_tops() {
        assert_eq!(power_delta_cyclic(&rat(1, 2), 2).unwrap(), rat(5, 8));
        assert_eq!(power_delta_cyclic(&rat(0, 1), 7).unwrap(), rat(0, 1));
        assert_eq!(power_delta_cyclic(&rat(1, 3), 3).unwrap(), rat(37, 81));
        assert_eq!(power_delta_full_symmetric(&rat(1, 2), 2), rat(5, 8));
        assert_eq!(power_delta_full_symmetric(&rat(0, 1), 5), rat(0, 1));
        assert_eq!(power_delta_full_symmetric(&rat(1, 3), 3), rat(41, 81));
        for n in 1..=30u64 {
            for d in [rat(1, 3), rat(1, 2), d_seq(6)] {
                let dvec = DeltaVector(vec![d.clone(), BigRational::one() - &d]);
                let sym = symmetric_cycle_counts(n as usize).unwrap();
                assert_eq!(power_delta_k(&dvec, &sym, 0), power_delta_full_symmetric(&d, n));
                assert_eq!(power_delta_k(&dvec, &cyclic_cycle_counts(n), 0), power_delta_cyclic(&d, n).unwrap());
            }
        }
    }

    #[test]
    fn symmetric_top_lower_bound() {
        assert!((power_symmetric_lower_bound(&rat(1, 1), 4) - 0.75).abs() < 1e-15);
        assert_eq!(power_symmetric_lower_bound(&rat(1, 3), 1), 0.0);
        assert!((power_symmetric_lower_bound(&rat(1, 3), 8) - 0.5).abs() < 1e-15);
        for d in [rat(1, 3), rat(1, 2), d_seq(6)] {
            let mut prev = BigRational::zero();
            for n in 1..=200u64 {
                let v = power_delta_full_symmetric(&d, n);
                assert!(v >= prev);
                assert!(to_f64(&v) >= power_symmetric_lower_bound(&d, n) - 1e-12);
                prev = v;
            }
        }
    }

    #[test]
    fn bounds_examples() {
        assert_eq!(rank_bounds(2, 7).unwrap(), BoundsPair { lower: rat(1, 7), upper: rat(1, 2) });
        assert_eq!(rank_bounds(3, 9).unwrap(), BoundsPair { lower: rat(2, 9), upper: rat(2, 3) });
        let b = rank_bounds(5, 5).unwrap();
        assert_eq!(b.lower, b.upper);
        let c2 = cyclic_cycle_counts(2);
        let b = sandwich_bounds(&rat(1, 4), &rat(1, 2), &c2).unwrap();
        assert_eq!(b, BoundsPair { lower: rat(11, 32), upper: rat(5, 8) });
        let b = sandwich_bounds(&rat(0, 1), &rat(1, 1), &c2).unwrap();
        assert_eq!(b, BoundsPair { lower: rat(0, 1), upper: rat(1, 1) });
        let b = sandwich_bounds(&rat(1, 3), &rat(1, 3), &c2).unwrap();
        assert_eq!(b.lower, power_delta(&rat(1, 3), &c2.pgf()));
        assert!(sandwich_bounds(&rat(1, 2), &rat(1, 3), &c2).is_err());
    }

    #[test]
    fn limit_gaps() {
        let mut prev = f64::INFINITY;
        for n in 1..=20 {
            let g = limit_gap_imprimitive_symmetric(n, &rat(1, 3));
            assert!(g <= prev + 1e-15);
            prev = g;
        }
        assert_eq!(limit_gap_imprimitive_symmetric(6, &rat(1, 1)), 0.0);
        assert!(doubly_symmetric_gap(12) < 1e-3);
    }

    proptest! {
        #[test]
        fn formula_spectra_are_distributions(a in 0usize..4, b in 0usize..4) {
            let vs = [s2(), s3(), dv(&[(2, 3), (0, 1), (0, 1), (1, 3)]), dv(&[(0, 1), (1, 1)])];
            let (da, db) = (&vs[a], &vs[b]);
            let one = rat(1, 1);
            prop_assert_eq!(imprimitive_spectrum(da, db).entries().iter().sum::<BigRational>(), one.clone());
            prop_assert_eq!(intransitive_spectrum(&[da.clone(), db.clone()]).entries().iter().sum::<BigRational>(), one.clone());
            let n = da.degree() * db.degree();
            let total: BigRational = (0..=n).map(|k| product_action_delta_k(&[da.clone(), db.clone()], k)).sum();
            prop_assert_eq!(total, one);
        }
    }
}
