//! Fixed-point spectra, cycle-count vectors and cycle indices of groups and cosets.
//!
//! Everything here is computed by visiting each element once, so the cost is linear in
//! the size of the group (or coset) times its degree.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactmath::{rat_ratio, BigRational, RationalPoly};
use crate::permcore::{Coset, PermGroup, Permutation};
use crate::DEFAULT_DEGREE_CAP;

/// A finite set of permutations that can be visited one element at a time.
pub trait Enumerable {
    fn degree(&self) -> usize;
    fn for_each_element(&self, cap: usize, f: &mut dyn FnMut(&Permutation)) -> Result<()>;

    fn fix_counts(&self, cap: usize) -> Result<Vec<u64>> {
        let mut counts = vec![0u64; self.degree() + 1];
        self.for_each_element(cap, &mut |g| counts[g.fixed_point_count()] += 1)?;
        Ok(counts)
    }
}

impl Enumerable for PermGroup {
    fn degree(&self) -> usize {
        PermGroup::degree(self)
    }

    fn for_each_element(&self, cap: usize, f: &mut dyn FnMut(&Permutation)) -> Result<()> {
        PermGroup::for_each_element(self, cap, f)
    }

    fn fix_counts(&self, cap: usize) -> Result<Vec<u64>> {
        PermGroup::fix_counts(self, cap)
    }
}

impl Enumerable for Coset {
    fn degree(&self) -> usize {
        Coset::degree(self)
    }

    fn for_each_element(&self, cap: usize, f: &mut dyn FnMut(&Permutation)) -> Result<()> {
        Coset::for_each_element(self, cap, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixSpectrum {
    pub degree: usize,
    /// `counts[k]` elements fix exactly `k` points, for `k = 0..=degree`.
    pub counts: Vec<u64>,
    pub total: BigUint,
}

impl FixSpectrum {
    pub fn delta_k(&self, k: usize) -> BigRational {
        let c = self.counts.get(k).copied().unwrap_or(0);
        rat_ratio(c, self.total.clone())
    }

    pub fn deltas(&self) -> Vec<BigRational> {
        (0..=self.degree).map(|k| self.delta_k(k)).collect()
    }

    /// Proportion of derangements.
    pub fn delta(&self) -> BigRational {
        self.delta_k(0)
    }

    pub fn pgf(&self) -> RationalPoly {
        RationalPoly::from_coeffs(self.deltas())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleCountVector {
    pub degree: usize,
    /// `counts[l]` elements have exactly `l` cycles; `counts[0]` is always 0.
    pub counts: Vec<BigUint>,
    pub total: BigUint,
}

impl CycleCountVector {
    pub fn count(&self, l: usize) -> BigUint {
        self.counts.get(l).cloned().unwrap_or_default()
    }

    pub fn from_counts(counts: Vec<BigUint>) -> Self {
        let degree = counts.len().saturating_sub(1);
        let total = counts.iter().sum();
        CycleCountVector { degree, counts, total }
    }

    pub fn pgf(&self) -> RationalPoly {
        if self.total.is_zero() {
            return RationalPoly::zero();
        }
        RationalPoly::from_coeffs(
            self.counts
                .iter()
                .map(|c| rat_ratio(c.clone(), self.total.clone()))
                .collect(),
        )
    }

    pub fn is_empty(&self) -> bool {
        self.total.is_zero()
    }
}

/// `(1/|G|) Σ_g x_1^{m_1(g)} ⋯ x_n^{m_n(g)}`, keyed by exponent vectors `(m_1, …, m_n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleIndex {
    pub degree: usize,
    pub terms: BTreeMap<Vec<u32>, BigRational>,
}

impl CycleIndex {
    /// Evaluates at `x_i = values[i-1]`.
    pub fn eval(&self, values: &[BigRational]) -> BigRational {
        assert_eq!(values.len(), self.degree);
        let mut total = BigRational::zero();
        for (exps, coeff) in &self.terms {
            let mut term = coeff.clone();
            for (x, &e) in values.iter().zip(exps) {
                if e > 0 {
                    term *= num_traits::pow(x.clone(), e as usize);
                }
            }
            total += term;
        }
        total
    }

    /// `Z(x, 1, …, 1)`, the fixed-point generating function.
    pub fn fix_specialization(&self) -> RationalPoly {
        let mut coeffs = vec![BigRational::zero(); self.degree + 1];
        for (exps, c) in &self.terms {
            coeffs[exps[0] as usize] += c;
        }
        RationalPoly::from_coeffs(coeffs)
    }

    /// `Z(x, x, …, x)`, the cycle-count generating function.
    pub fn cycle_specialization(&self) -> RationalPoly {
        let mut coeffs = vec![BigRational::zero(); self.degree + 1];
        for (exps, c) in &self.terms {
            let l: u32 = exps.iter().sum();
            coeffs[l as usize] += c;
        }
        RationalPoly::from_coeffs(coeffs)
    }
}

impl fmt::Display for CycleIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (exps, c) in self.terms.iter().rev() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, &e) in exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{}", i + 1, e)?,
                }
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Everything the statistics functions compute, gathered in one pass.
#[derive(Clone, Debug)]
pub struct Profile {
    pub fix: FixSpectrum,
    pub cycles: CycleCountVector,
    pub even: CycleCountVector,
    pub odd: CycleCountVector,
    pub cycle_index: Option<CycleIndex>,
}

fn check_degree(degree: usize) -> Result<()> {
    if degree > DEFAULT_DEGREE_CAP {
        return Err(Error::DegreeOverflow {
            what: "spectrum".into(),
            degree: degree.to_string(),
            cap: DEFAULT_DEGREE_CAP,
        });
    }
    Ok(())
}

/// Single pass over `c` collecting fixed points, cycle counts split by parity and,
/// optionally, the full cycle index.
pub fn profile<C: Enumerable + ?Sized>(c: &C, cap: usize, with_cycle_index: bool) -> Result<Profile> {
    let n = c.degree();
    check_degree(n)?;
    let mut fix = vec![0u64; n + 1];
    let mut even = vec![0u64; n + 1];
    let mut odd = vec![0u64; n + 1];
    let mut types: HashMap<Vec<u32>, u64> = HashMap::new();
    let mut seen = Vec::with_capacity(n);
    let mut ty = Vec::with_capacity(n + 1);
    let mut total = 0u64;
    c.for_each_element(cap, &mut |g| {
        total += 1;
        fix[g.fixed_point_count()] += 1;
        let l = if with_cycle_index {
            g.cycle_type_with(&mut seen, &mut ty);
            let l: u32 = ty.iter().sum();
            match types.get_mut(&ty[1..]) {
                Some(v) => *v += 1,
                None => {
                    types.insert(ty[1..].to_vec(), 1);
                }
            }
            l as usize
        } else {
            g.cycle_count_with(&mut seen)
        };
        if (n - l) % 2 == 0 {
            even[l] += 1;
        } else {
            odd[l] += 1;
        }
    })?;
    let total_big = BigUint::from(total);
    let even_total: u64 = even.iter().sum();
    let cycles: Vec<BigUint> = even.iter().zip(&odd).map(|(a, b)| BigUint::from(a + b)).collect();
    let big = |v: Vec<u64>| -> Vec<BigUint> { v.into_iter().map(BigUint::from).collect() };
    let cycle_index = with_cycle_index.then(|| CycleIndex {
        degree: n,
        terms: types
            .into_iter()
            .map(|(k, v)| (k, rat_ratio(v, total)))
            .collect(),
    });
    Ok(Profile {
        fix: FixSpectrum {
            degree: n,
            counts: fix,
            total: total_big.clone(),
        },
        cycles: CycleCountVector {
            degree: n,
            counts: cycles,
            total: total_big,
        },
        even: CycleCountVector {
            degree: n,
            counts: big(even),
            total: BigUint::from(even_total),
        },
        odd: CycleCountVector {
            degree: n,
            counts: big(odd),
            total: BigUint::from(total - even_total),
        },
        cycle_index,
    })
}

pub fn fix_spectrum<C: Enumerable + ?Sized>(c: &C, cap: usize) -> Result<FixSpectrum> {
    let n = c.degree();
    check_degree(n)?;
    let counts = c.fix_counts(cap)?;
    let total: u64 = counts.iter().sum();
    Ok(FixSpectrum {
        degree: n,
        counts,
        total: BigUint::from(total),
    })
}

pub fn delta_k<C: Enumerable + ?Sized>(c: &C, k: usize, cap: usize) -> Result<BigRational> {
    Ok(fix_spectrum(c, cap)?.delta_k(k))
}

pub fn cycle_count_vector<C: Enumerable + ?Sized>(c: &C, cap: usize) -> Result<CycleCountVector> {
    Ok(profile(c, cap, false)?.cycles)
}

pub fn cycle_index(g: &PermGroup, cap: usize) -> Result<CycleIndex> {
    Ok(profile(g, cap, true)?.cycle_index.expect("requested"))
}

pub fn fix_pgf(g: &PermGroup, cap: usize) -> Result<RationalPoly> {
    Ok(fix_spectrum(g, cap)?.pgf())
}

pub fn cycle_pgf(g: &PermGroup, cap: usize) -> Result<RationalPoly> {
    Ok(cycle_count_vector(g, cap)?.pgf())
}

/// Cycle counts of `G ∩ A_n` and of `G ∖ A_n`.
pub fn parity_split(g: &PermGroup, cap: usize) -> Result<(CycleCountVector, CycleCountVector)> {
    let p = profile(g, cap, false)?;
    Ok((p.even, p.odd))
}

/// Number of elements with an even (respectively odd) number of cycles.
pub fn cycle_parity_totals(v: &CycleCountVector) -> (BigUint, BigUint) {
    let even = v.counts.iter().step_by(2).sum();
    let odd = v.counts.iter().skip(1).step_by(2).sum();
    (even, odd)
}

/// Checks `Σ counts = total` for a spectrum built elsewhere.
pub fn spectrum_is_consistent(s: &FixSpectrum) -> bool {
    BigUint::from(s.counts.iter().sum::<u64>()) == s.total && s.counts.len() == s.degree + 1
}
