//! Named groups, direct and wreath products, base-group cosets and the group-expression
//! language.
//!
//! Point encodings:
//!
//! * imprimitive action on `[m] × [n]`: `(x, y) ↦ y·m + x`;
//! * power action on functions `ω: [n] → [m]`: `ω ↦ Σ_y ω(y)·m^y`;
//! * intransitive direct product: factor `i` occupies a contiguous block after factors `0..i`;
//! * product action: `(x_1, …, x_r) ↦ x_1 + d_1·x_2 + d_1·d_2·x_3 + …`.
//!
//! Product groups carry a streaming element source, so statistics over them never store
//! the element list.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::exactmath::{factorial, is_prime};
use crate::permcore::{parse_cycle_notation, Coset, ElementSource, PermGroup, Permutation};
use crate::Limits;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    Imprimitive,
    Power,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Action::Imprimitive => "imprimitive",
            Action::Power => "power",
        })
    }
}

fn cycle_through(n: usize, points: impl IntoIterator<Item = usize>) -> Permutation {
    Permutation::from_cycles(n, &[points.into_iter().collect()]).expect("valid cycle")
}

pub fn trivial(n: usize) -> Result<PermGroup> {
    if n == 0 {
        return Err(Error::InvalidArgument("degree must be positive".into()));
    }
    Ok(PermGroup::trivial(n))
}

pub fn symmetric(n: usize) -> Result<PermGroup> {
    if n == 0 {
        return Err(Error::InvalidArgument("S(n) needs n >= 1".into()));
    }
    let mut gens = Vec::new();
    if n >= 2 {
        gens.push(cycle_through(n, [0, 1]));
        gens.push(cycle_through(n, 0..n));
    }
    PermGroup::build(n, gens, format!("S({n})"), Some(factorial(n as u64)), None)
}

pub fn alternating(n: usize) -> Result<PermGroup> {
    if n == 0 {
        return Err(Error::InvalidArgument("A(n) needs n >= 1".into()));
    }
    let mut gens = Vec::new();
    let order = if n >= 2 {
        factorial(n as u64) / 2u32
    } else {
        BigUint::one()
    };
    if n >= 3 {
        gens.push(cycle_through(n, [0, 1, 2]));
        if n % 2 == 1 {
            gens.push(cycle_through(n, 0..n));
        } else {
            gens.push(cycle_through(n, 1..n));
        }
    }
    PermGroup::build(n, gens, format!("A({n})"), Some(order), None)
}

pub fn cyclic(n: usize) -> Result<PermGroup> {
    if n == 0 {
        return Err(Error::InvalidArgument("C(n) needs n >= 1".into()));
    }
    let gens = if n >= 2 { vec![cycle_through(n, 0..n)] } else { vec![] };
    PermGroup::build(n, gens, format!("C({n})"), Some(BigUint::from(n)), None)
}

/// The affine group `x ↦ ax + b` over the integers mod a prime `p`.
pub fn agl1(p: u64) -> Result<PermGroup> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let n = p as usize;
    let translation = Permutation::from_images((0..n).map(|x| (x + 1) % n).collect())?;
    let root = (1..p)
        .find(|&g| (1..p - 1).all(|e| mod_pow(g, e, p) != 1))
        .expect("primes have primitive roots");
    let scaling = Permutation::from_images((0..p).map(|x| ((x * root) % p) as usize).collect())?;
    PermGroup::build(
        n,
        vec![translation, scaling],
        format!("AGL1({p})"),
        Some(BigUint::from(p * (p - 1))),
        None,
    )
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// The group generated by explicit permutations of degree `n`.
pub fn from_generators(n: usize, generators: Vec<Permutation>) -> Result<PermGroup> {
    let label = if generators.is_empty() {
        format!("gens({n}; ())")
    } else {
        let gs: Vec<String> = generators.iter().map(|g| g.to_string()).collect();
        format!("gens({n}; {})", gs.join(", "))
    };
    PermGroup::build(n, generators, label, None, None)
}

fn order_of(g: &PermGroup, limits: &Limits) -> Result<BigUint> {
    g.order(limits.enumeration_cap)
}

fn check_degree(what: &str, degree: &BigUint, limits: &Limits) -> Result<usize> {
    match degree.to_usize() {
        Some(d) if d <= limits.degree_cap => Ok(d),
        _ => Err(Error::DegreeOverflow {
            what: what.to_string(),
            degree: degree.to_string(),
            cap: limits.degree_cap,
        }),
    }
}

#[derive(Clone, Debug)]
enum Layout {
    /// Coordinate `i` owns points `offsets[i]..offsets[i] + sizes[i]`.
    Blocks { offsets: Vec<usize> },
    /// Coordinate `i` is the digit with place value `places[i]`.
    Digits { places: Vec<usize> },
}

/// Streams the elements `(g_1, …, g_r; t)` of a direct or wreath product, where `t` ranges
/// over a top group permuting coordinates (the identity for direct products).
///
/// Consecutive tuples differ in few coordinates, so the image array is updated in place
/// rather than rebuilt.
struct TupleSource {
    degree: usize,
    layout: Layout,
    sizes: Vec<usize>,
    factors: Vec<PermGroup>,
    top: Option<PermGroup>,
    even_base: bool,
    order: BigUint,
}

struct Walk<'a> {
    src: &'a TupleSource,
    /// `tables[i][j·d_i + x]` is the image of `x` under the `j`-th element of factor `i`.
    tables: Vec<Vec<u32>>,
    lens: Vec<usize>,
    odd: Vec<Vec<bool>>,
}

impl<'a> Walk<'a> {
    fn new(src: &'a TupleSource, cap: usize) -> Result<Self> {
        let lists: Vec<Arc<Vec<Permutation>>> = src
            .factors
            .iter()
            .map(|g| g.enumerate(cap))
            .collect::<Result<_>>()?;
        let tables = lists
            .iter()
            .map(|l| l.iter().flat_map(|g| g.images().iter().copied()).collect())
            .collect();
        let lens = lists.iter().map(|l| l.len()).collect();
        let odd = lists
            .iter()
            .map(|l| l.iter().map(|g| g.sign() < 0).collect())
            .collect();
        Ok(Walk { src, tables, lens, odd })
    }

    fn initial_image(&self, top: &[usize], img: &mut [u32]) {
        match &self.src.layout {
            Layout::Blocks { offsets } => {
                for (i, &off) in offsets.iter().enumerate() {
                    let target = offsets[top[i]];
                    for x in 0..self.src.sizes[i] {
                        img[off + x] = (target + x) as u32;
                    }
                }
            }
            Layout::Digits { places } => {
                for (w, slot) in img.iter_mut().enumerate() {
                    let mut v = 0;
                    for (i, &place) in places.iter().enumerate() {
                        let digit = (w / place) % self.src.sizes[i];
                        v += digit * places[top[i]];
                    }
                    *slot = v as u32;
                }
            }
        }
    }

    /// Moves coordinate `i` from its `old`-th to its `new`-th factor element, returning the
    /// change in the number of fixed points.
    #[inline]
    fn update(&self, top: &[usize], i: usize, old: usize, new: usize, img: &mut [u32]) -> i64 {
        let d = self.src.sizes[i];
        let row = &self.tables[i][new * d..new * d + d];
        match &self.src.layout {
            Layout::Blocks { offsets } => {
                let off = offsets[i];
                let target = offsets[top[i]];
                let block = &mut img[off..off + d];
                if target != off {
                    for (slot, &v) in block.iter_mut().zip(row) {
                        *slot = v + target as u32;
                    }
                    return 0;
                }
                let mut delta = 0i64;
                for (x, (slot, &v)) in block.iter_mut().zip(row).enumerate() {
                    delta += (v as usize == x) as i64 - (*slot as usize == off + x) as i64;
                    *slot = v + off as u32;
                }
                delta
            }
            Layout::Digits { places } => {
                let old_row = &self.tables[i][old * d..old * d + d];
                let place = places[i];
                let out = places[top[i]] as i64;
                let span = place * d;
                let mut delta = 0i64;
                for digit in 0..d {
                    let shift = (row[digit] as i64 - old_row[digit] as i64) * out;
                    if shift == 0 {
                        continue;
                    }
                    for hi in (0..self.src.degree).step_by(span) {
                        let base = hi + digit * place;
                        for p in base..base + place {
                            let before = img[p] as usize == p;
                            let v = (img[p] as i64 + shift) as usize;
                            img[p] = v as u32;
                            delta += (v == p) as i64 - before as i64;
                        }
                    }
                }
                delta
            }
        }
    }

    /// Visits every base tuple over one top element, passing each element with its number
    /// of fixed points.
    fn run_top<const IMAGE: bool, F: FnMut(&Permutation, usize)>(&self, top: &[usize], perm: &mut Permutation, f: &mut F) {
        if let Layout::Blocks { offsets } = &self.src.layout {
            return self.run_top_blocks::<IMAGE, F>(offsets, top, perm, f);
        }
        let r = self.lens.len();
        let img = perm.raw_mut();
        self.initial_image(top, img);
        let mut fixed = img.iter().enumerate().filter(|&(p, &v)| p == v as usize).count() as i64;
        let mut idx = vec![0usize; r];
        let mut odd_count = 0usize;
        loop {
            if !self.src.even_base || odd_count % 2 == 0 {
                f(perm, fixed as usize);
            }
            let img = perm.raw_mut();
            let mut i = 0;
            loop {
                if i == r {
                    return;
                }
                let old = idx[i];
                let new = if old + 1 == self.lens[i] { 0 } else { old + 1 };
                idx[i] = new;
                odd_count ^= (self.odd[i][old] != self.odd[i][new]) as usize;
                fixed += self.update(top, i, old, new, img);
                if new != 0 {
                    break;
                }
                i += 1;
            }
        }
    }

    /// Same walk for block layouts, with the first coordinate cycled in a tight inner loop.
    /// Without `IMAGE` the first block of the image is left stale and only the fixed-point
    /// count passed to `f` is meaningful.
    fn run_top_blocks<const IMAGE: bool, F: FnMut(&Permutation, usize)>(
        &self,
        offsets: &[usize],
        top: &[usize],
        perm: &mut Permutation,
        f: &mut F,
    ) {
        let r = self.lens.len();
        let img = perm.raw_mut();
        self.initial_image(top, img);
        let d0 = self.src.sizes[0];
        let first = &self.tables[0];
        let first_odd = &self.odd[0];
        let first_fixed: Vec<i64> = first
            .chunks_exact(d0)
            .map(|row| row.iter().enumerate().filter(|&(x, &v)| x == v as usize).count() as i64)
            .collect();
        let target0 = offsets[top[0]] as u32;
        let stays = top[0] == 0;
        // fixed points outside block 0
        let mut rest_fixed = img[d0..].iter().enumerate().filter(|&(p, &v)| p + d0 == v as usize).count() as i64;
        let mut idx = vec![0usize; r];
        let mut rest_odd = false;
        loop {
            for (j, row) in first.chunks_exact(d0).enumerate() {
                if self.src.even_base && (rest_odd != first_odd[j]) {
                    continue;
                }
                if IMAGE {
                    for (slot, &v) in perm.raw_mut()[..d0].iter_mut().zip(row) {
                        *slot = v + target0;
                    }
                }
                let fixed = rest_fixed + if stays { first_fixed[j] } else { 0 };
                f(perm, fixed as usize);
            }
            let img = perm.raw_mut();
            let mut i = 1;
            loop {
                if i >= r {
                    return;
                }
                let old = idx[i];
                let new = if old + 1 == self.lens[i] { 0 } else { old + 1 };
                idx[i] = new;
                rest_odd ^= self.odd[i][old] != self.odd[i][new];
                rest_fixed += self.update(top, i, old, new, img);
                if new != 0 {
                    break;
                }
                i += 1;
            }
        }
    }

    fn run<const IMAGE: bool, F: FnMut(&Permutation, usize)>(&self, cap: usize, mut f: F) -> Result<()> {
        let r = self.lens.len();
        let mut perm = Permutation::identity(self.src.degree);
        match &self.src.top {
            None => {
                let top: Vec<usize> = (0..r).collect();
                self.run_top::<IMAGE, F>(&top, &mut perm, &mut f);
                Ok(())
            }
            Some(b) => {
                let mut top = vec![0usize; r];
                b.for_each_element(cap, &mut |t| {
                    for (slot, &y) in top.iter_mut().zip(t.images()) {
                        *slot = y as usize;
                    }
                    self.run_top::<IMAGE, F>(&top, &mut perm, &mut f);
                })
            }
        }
    }
}

impl ElementSource for TupleSource {
    fn degree(&self) -> usize {
        self.degree
    }

    fn order(&self, _cap: usize) -> Result<BigUint> {
        Ok(self.order.clone())
    }

    fn for_each(&self, cap: usize, f: &mut dyn FnMut(&Permutation)) -> Result<()> {
        Walk::new(self, cap)?.run::<true, _>(cap, |g, _| f(g))
    }

    fn fix_counts(&self, cap: usize) -> Result<Vec<u64>> {
        let mut counts = vec![0u64; self.degree + 1];
        Walk::new(self, cap)?.run::<false, _>(cap, |_, fixed| counts[fixed] += 1)?;
        Ok(counts)
    }
}

fn product_label(name: &str, groups: &[PermGroup]) -> String {
    let parts: Vec<&str> = groups.iter().map(|g| g.label()).collect();
    format!("{name}({})", parts.join(","))
}

/// Direct product acting on the disjoint union of the factors' point sets.
pub fn direct_product_intransitive(groups: &[PermGroup], limits: &Limits) -> Result<PermGroup> {
    if groups.is_empty() {
        return Err(Error::InvalidArgument("direct product of no groups".into()));
    }
    let sizes: Vec<usize> = groups.iter().map(|g| g.degree()).collect();
    let total: BigUint = sizes.iter().map(|&d| BigUint::from(d)).sum();
    let degree = check_degree("intransitive product", &total, limits)?;
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, &d| {
            let o = *acc;
            *acc += d;
            Some(o)
        })
        .collect();
    let mut gens = Vec::new();
    for (g, &off) in groups.iter().zip(&offsets) {
        for s in g.generators() {
            let mut images: Vec<usize> = (0..degree).collect();
            for x in 0..g.degree() {
                images[off + x] = off + s.image(x);
            }
            gens.push(Permutation::from_images(images)?);
        }
    }
    let mut order = BigUint::one();
    for g in groups {
        order *= order_of(g, limits)?;
    }
    let source = TupleSource {
        degree,
        layout: Layout::Blocks { offsets },
        sizes,
        factors: groups.to_vec(),
        top: None,
        even_base: false,
        order: order.clone(),
    };
    PermGroup::build(degree, gens, product_label("prodI", groups), Some(order), Some(Arc::new(source)))
}

/// Direct product acting componentwise on the Cartesian product of the point sets.
pub fn direct_product_product(groups: &[PermGroup], limits: &Limits) -> Result<PermGroup> {
    if groups.is_empty() {
        return Err(Error::InvalidArgument("direct product of no groups".into()));
    }
    let sizes: Vec<usize> = groups.iter().map(|g| g.degree()).collect();
    let total: BigUint = sizes.iter().map(|&d| BigUint::from(d)).product();
    let degree = check_degree("product action", &total, limits)?;
    let places: Vec<usize> = sizes
        .iter()
        .scan(1, |acc, &d| {
            let p = *acc;
            *acc *= d;
            Some(p)
        })
        .collect();
    let mut gens = Vec::new();
    for (i, g) in groups.iter().enumerate() {
        for s in g.generators() {
            let images = (0..degree)
                .map(|w| {
                    let digit = (w / places[i]) % sizes[i];
                    w - digit * places[i] + s.image(digit) * places[i]
                })
                .collect();
            gens.push(Permutation::from_images(images)?);
        }
    }
    let mut order = BigUint::one();
    for g in groups {
        order *= order_of(g, limits)?;
    }
    let source = TupleSource {
        degree,
        layout: Layout::Digits { places },
        sizes,
        factors: groups.to_vec(),
        top: None,
        even_base: false,
        order: order.clone(),
    };
    PermGroup::build(degree, gens, product_label("prodP", groups), Some(order), Some(Arc::new(source)))
}

/// An element `(α, b)` of `A ≀ B` with `α: [n] → A` stored as `base[y] = α(y)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WreathElement {
    pub base: Vec<Permutation>,
    pub top: Permutation,
}

impl WreathElement {
    pub fn new(base: Vec<Permutation>, top: Permutation) -> Result<Self> {
        if base.len() != top.degree() {
            return Err(Error::DegreeMismatch {
                left: base.len(),
                right: top.degree(),
            });
        }
        if let Some(first) = base.first() {
            if let Some(bad) = base.iter().find(|a| a.degree() != first.degree()) {
                return Err(Error::DegreeMismatch {
                    left: first.degree(),
                    right: bad.degree(),
                });
            }
        }
        Ok(WreathElement { base, top })
    }

    pub fn identity(m: usize, n: usize) -> Self {
        WreathElement {
            base: vec![Permutation::identity(m); n],
            top: Permutation::identity(n),
        }
    }

    fn m(&self) -> usize {
        self.base[0].degree()
    }

    /// `(α, b)(β, c) = (γ, bc)` with `γ(y) = α(y)·β(yb)`.
    pub fn multiply(&self, other: &WreathElement) -> WreathElement {
        let base = self
            .base
            .iter()
            .enumerate()
            .map(|(y, a)| a.then(&other.base[self.top.image(y)]))
            .collect();
        WreathElement {
            base,
            top: self.top.then(&other.top),
        }
    }

    pub fn inverse(&self) -> WreathElement {
        let top = self.top.inverse();
        let base = (0..self.base.len())
            .map(|y| self.base[top.image(y)].inverse())
            .collect();
        WreathElement { base, top }
    }

    /// The permutation induced on points in the given action.
    pub fn image(&self, action: Action) -> Permutation {
        let m = self.m();
        let n = self.base.len();
        match action {
            Action::Imprimitive => {
                let mut images = vec![0u32; m * n];
                for (y, a) in self.base.iter().enumerate() {
                    let target = self.top.image(y) * m;
                    for x in 0..m {
                        images[y * m + x] = (target + a.image(x)) as u32;
                    }
                }
                Permutation::from_raw(images)
            }
            Action::Power => {
                let degree = m.pow(n as u32);
                let places: Vec<usize> = (0..n).map(|y| m.pow(y as u32)).collect();
                let images = (0..degree)
                    .map(|w| {
                        let mut v = 0;
                        for (y, a) in self.base.iter().enumerate() {
                            let digit = (w / places[y]) % m;
                            v += a.image(digit) * places[self.top.image(y)];
                        }
                        v as u32
                    })
                    .collect();
                Permutation::from_raw(images)
            }
        }
    }
}

/// Product `α(y_i)·α(y_i b)·…·α(y_i b^{k−1})` along the `i`-th cycle of `b`, cycles
/// ordered by smallest point and each starting there.
pub fn bi_product(base: &[Permutation], b: &Permutation, i: usize) -> Result<Permutation> {
    if base.len() != b.degree() {
        return Err(Error::DegreeMismatch {
            left: base.len(),
            right: b.degree(),
        });
    }
    let cycles = b.cycle_decomposition().cycles;
    let cycle = cycles.get(i).ok_or(Error::IndexOutOfRange {
        index: i,
        len: cycles.len(),
    })?;
    let mut acc = base[cycle[0]].clone();
    for &y in &cycle[1..] {
        acc = acc.then(&base[y]);
    }
    Ok(acc)
}

fn wreath_degree(m: usize, n: usize, action: Action, limits: &Limits) -> Result<usize> {
    let total = match action {
        Action::Imprimitive => BigUint::from(m) * BigUint::from(n),
        Action::Power => num_traits::pow(BigUint::from(m), n),
    };
    let what = match action {
        Action::Imprimitive => "imprimitive wreath product",
        Action::Power => "power wreath product",
    };
    check_degree(what, &total, limits)
}

fn layout_for(m: usize, n: usize, action: Action) -> Layout {
    match action {
        Action::Imprimitive => Layout::Blocks {
            offsets: (0..n).map(|y| y * m).collect(),
        },
        Action::Power => Layout::Digits {
            places: (0..n).map(|y| m.pow(y as u32)).collect(),
        },
    }
}

fn orbit_representatives(b: &PermGroup) -> Vec<usize> {
    b.orbits().iter().map(|o| o[0]).collect()
}

fn placed(m: usize, n: usize, entries: &[(usize, &Permutation)]) -> WreathElement {
    let mut w = WreathElement::identity(m, n);
    for &(y, a) in entries {
        w.base[y] = a.clone();
    }
    w
}

fn wreath(a: &PermGroup, b: &PermGroup, action: Action, limits: &Limits) -> Result<PermGroup> {
    let (m, n) = (a.degree(), b.degree());
    if m < 2 {
        return Err(Error::InvalidArgument("wreath products need a base group of degree >= 2".into()));
    }
    let degree = wreath_degree(m, n, action, limits)?;
    let mut gens = Vec::new();
    for y in orbit_representatives(b) {
        for s in a.generators() {
            gens.push(placed(m, n, &[(y, s)]).image(action));
        }
    }
    for t in b.generators() {
        let w = WreathElement {
            base: vec![Permutation::identity(m); n],
            top: t.clone(),
        };
        gens.push(w.image(action));
    }
    let order = num_traits::pow(order_of(a, limits)?, n) * order_of(b, limits)?;
    let name = match action {
        Action::Imprimitive => "wrI",
        Action::Power => "wrP",
    };
    let source = TupleSource {
        degree,
        layout: layout_for(m, n, action),
        sizes: vec![m; n],
        factors: vec![a.clone(); n],
        top: Some(b.clone()),
        even_base: false,
        order: order.clone(),
    };
    PermGroup::build(
        degree,
        gens,
        format!("{name}({},{})", a.label(), b.label()),
        Some(order),
        Some(Arc::new(source)),
    )
}

/// `A ≀ B` acting on `[m] × [n]`.
pub fn wreath_imprimitive(a: &PermGroup, b: &PermGroup, limits: &Limits) -> Result<PermGroup> {
    wreath(a, b, Action::Imprimitive, limits)
}

/// `A ≀ B` acting on functions `[n] → [m]`.
pub fn wreath_power(a: &PermGroup, b: &PermGroup, limits: &Limits) -> Result<PermGroup> {
    wreath(a, b, Action::Power, limits)
}

pub fn wreath_product(a: &PermGroup, b: &PermGroup, action: Action, limits: &Limits) -> Result<PermGroup> {
    wreath(a, b, action, limits)
}

/// The index-2 subgroup `{(α, b) : ∏_y sign(α(y)) = +1}` of `S_m ≀ B`.
pub fn even_base_wreath(m: usize, b: &PermGroup, action: Action, limits: &Limits) -> Result<PermGroup> {
    if m < 2 {
        return Err(Error::InvalidArgument("evenWr needs m >= 2".into()));
    }
    let n = b.degree();
    let degree = wreath_degree(m, n, action, limits)?;
    let sm = symmetric(m)?;
    let am = alternating(m)?;
    let mut gens = Vec::new();
    for y in orbit_representatives(b) {
        for s in am.generators() {
            gens.push(placed(m, n, &[(y, s)]).image(action));
        }
    }
    let swap = cycle_through(m, [0, 1]);
    for y in 1..n {
        gens.push(placed(m, n, &[(0, &swap), (y, &swap)]).image(action));
    }
    for t in b.generators() {
        let w = WreathElement {
            base: vec![Permutation::identity(m); n],
            top: t.clone(),
        };
        gens.push(w.image(action));
    }
    let order = num_traits::pow(factorial(m as u64), n) * order_of(b, limits)? / 2u32;
    let source = TupleSource {
        degree,
        layout: layout_for(m, n, action),
        sizes: vec![m; n],
        factors: vec![sm; n],
        top: Some(b.clone()),
        even_base: true,
        order: order.clone(),
    };
    PermGroup::build(
        degree,
        gens,
        format!("evenWr({m},{},{action})", b.label()),
        Some(order),
        Some(Arc::new(source)),
    )
}

/// The coset `A^[n]·(τ, b)` of the base group in the chosen action.
pub fn base_coset(a: &PermGroup, tau: &[Permutation], b: &Permutation, action: Action, limits: &Limits) -> Result<Coset> {
    let n = b.degree();
    let top = trivial(n)?;
    let base_group = wreath(a, &top, action, limits)?;
    let rep = WreathElement::new(tau.to_vec(), b.clone())?;
    if rep.m() != a.degree() {
        return Err(Error::DegreeMismatch {
            left: a.degree(),
            right: rep.m(),
        });
    }
    Coset::new(base_group, rep.image(action))
}

/// Syntax tree of the group-expression language.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupExpr {
    Sym(usize),
    Alt(usize),
    Cyc(usize),
    Agl1(u64),
    Gens(usize, Vec<Vec<Vec<usize>>>),
    WrI(Box<GroupExpr>, Box<GroupExpr>),
    WrP(Box<GroupExpr>, Box<GroupExpr>),
    ProdI(Vec<GroupExpr>),
    ProdP(Vec<GroupExpr>),
    EvenWr(usize, Box<GroupExpr>, Action),
    Coset(Box<GroupExpr>, Vec<Vec<usize>>),
}

fn write_cycles(f: &mut fmt::Formatter<'_>, cycles: &[Vec<usize>]) -> fmt::Result {
    if cycles.is_empty() {
        return f.write_str("()");
    }
    for c in cycles {
        let pts: Vec<String> = c.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", pts.join(" "))?;
    }
    Ok(())
}

impl fmt::Display for GroupExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, name: &str, es: &[GroupExpr]| {
            write!(f, "{name}(")?;
            for (i, e) in es.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{e}")?;
            }
            f.write_str(")")
        };
        match self {
            GroupExpr::Sym(n) => write!(f, "S({n})"),
            GroupExpr::Alt(n) => write!(f, "A({n})"),
            GroupExpr::Cyc(n) => write!(f, "C({n})"),
            GroupExpr::Agl1(p) => write!(f, "AGL1({p})"),
            GroupExpr::Gens(n, perms) => {
                write!(f, "gens({n}; ")?;
                for (i, p) in perms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write_cycles(f, p)?;
                }
                f.write_str(")")
            }
            GroupExpr::WrI(a, b) => write!(f, "wrI({a},{b})"),
            GroupExpr::WrP(a, b) => write!(f, "wrP({a},{b})"),
            GroupExpr::ProdI(es) => list(f, "prodI", es),
            GroupExpr::ProdP(es) => list(f, "prodP", es),
            GroupExpr::EvenWr(m, b, action) => write!(f, "evenWr({m},{b},{action})"),
            GroupExpr::Coset(e, p) => {
                write!(f, "coset({e}, ")?;
                write_cycles(f, p)?;
                f.write_str(")")
            }
        }
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            position: self.pos,
            message: message.into(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{token}'")))
        }
    }

    fn ident(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let len = self
            .rest()
            .find(|c: char| !c.is_ascii_alphanumeric())
            .unwrap_or(self.rest().len());
        if len == 0 {
            return Err(self.err("expected a name"));
        }
        let word = &self.rest()[..len];
        self.pos += len;
        Ok(word)
    }

    fn int(&mut self) -> Result<u64> {
        self.skip_ws();
        let len = self
            .rest()
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(self.rest().len());
        if len == 0 {
            return Err(self.err("expected an integer"));
        }
        let value = self.rest()[..len]
            .parse()
            .map_err(|_| self.err("integer too large"))?;
        self.pos += len;
        Ok(value)
    }

    fn size(&mut self) -> Result<usize> {
        let start = self.pos;
        let v = self.int()?;
        usize::try_from(v).map_err(|_| Error::Parse {
            position: start,
            message: "integer too large".into(),
        })
    }

    /// Consumes a run of parenthesised cycles.
    fn perm(&mut self) -> Result<Vec<Vec<usize>>> {
        self.skip_ws();
        let start = self.pos;
        let mut end = self.pos;
        let bytes = self.text.as_bytes();
        while end < bytes.len() && bytes[end] == b'(' {
            match self.text[end..].find(')') {
                Some(close) => end += close + 1,
                None => break,
            }
            while end < bytes.len() && bytes[end].is_ascii_whitespace() {
                end += 1;
            }
        }
        if end == start {
            return Err(self.err("expected a permutation in cycle notation"));
        }
        let cycles = parse_cycle_notation(&self.text[start..end]).map_err(|e| match e {
            Error::MalformedCycle { position, message } => Error::Parse {
                position: start + position,
                message,
            },
            other => other,
        })?;
        self.pos = end;
        Ok(cycles)
    }

    fn expr(&mut self) -> Result<GroupExpr> {
        let start = self.pos;
        let name = self.ident()?;
        self.expect("(")?;
        let e = match name {
            "S" => GroupExpr::Sym(self.size()?),
            "A" => GroupExpr::Alt(self.size()?),
            "C" => GroupExpr::Cyc(self.size()?),
            "AGL1" => GroupExpr::Agl1(self.int()?),
            "gens" => {
                let n = self.size()?;
                self.expect(";")?;
                let mut perms = vec![self.perm()?];
                while self.eat(",") {
                    perms.push(self.perm()?);
                }
                GroupExpr::Gens(n, perms)
            }
            "wrI" | "wrP" => {
                let a = self.expr()?;
                self.expect(",")?;
                let b = self.expr()?;
                if name == "wrI" {
                    GroupExpr::WrI(Box::new(a), Box::new(b))
                } else {
                    GroupExpr::WrP(Box::new(a), Box::new(b))
                }
            }
            "prodI" | "prodP" => {
                let mut es = vec![self.expr()?];
                while self.eat(",") {
                    es.push(self.expr()?);
                }
                if es.len() < 2 {
                    return Err(self.err(format!("{name} needs at least two factors")));
                }
                if name == "prodI" {
                    GroupExpr::ProdI(es)
                } else {
                    GroupExpr::ProdP(es)
                }
            }
            "evenWr" => {
                let m = self.size()?;
                self.expect(",")?;
                let b = self.expr()?;
                let action = if self.eat(",") {
                    match self.ident()? {
                        "imprimitive" => Action::Imprimitive,
                        "power" => Action::Power,
                        other => return Err(self.err(format!("unknown action '{other}'"))),
                    }
                } else {
                    Action::Power
                };
                GroupExpr::EvenWr(m, Box::new(b), action)
            }
            "coset" => {
                let e = self.expr()?;
                self.expect(",")?;
                GroupExpr::Coset(Box::new(e), self.perm()?)
            }
            other => {
                return Err(Error::Parse {
                    position: start,
                    message: format!("unknown group constructor '{other}'"),
                })
            }
        };
        self.expect(")")?;
        Ok(e)
    }
}

impl GroupExpr {
    pub fn parse(text: &str) -> Result<GroupExpr> {
        let mut p = Parser { text, pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(p.err("trailing input"));
        }
        Ok(e)
    }

    fn children(&self) -> Vec<&GroupExpr> {
        match self {
            GroupExpr::WrI(a, b) | GroupExpr::WrP(a, b) => vec![a, b],
            GroupExpr::ProdI(es) | GroupExpr::ProdP(es) => es.iter().collect(),
            GroupExpr::EvenWr(_, b, _) => vec![b],
            GroupExpr::Coset(e, _) => vec![e],
            _ => vec![],
        }
    }
}

impl std::str::FromStr for GroupExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GroupExpr::parse(s)
    }
}

/// Result of elaborating an expression.
#[derive(Clone, Debug)]
pub enum Elaborated {
    Group(PermGroup),
    Coset(Coset),
}

impl Elaborated {
    pub fn degree(&self) -> usize {
        match self {
            Elaborated::Group(g) => g.degree(),
            Elaborated::Coset(c) => c.degree(),
        }
    }

    pub fn into_group(self) -> Result<PermGroup> {
        match self {
            Elaborated::Group(g) => Ok(g),
            Elaborated::Coset(_) => Err(Error::InvalidArgument("expected a group, found a coset".into())),
        }
    }
}

fn zero_based(cycles: &[Vec<usize>], degree: usize) -> Result<Permutation> {
    let mut cs = Vec::with_capacity(cycles.len());
    for c in cycles {
        let mut z = Vec::with_capacity(c.len());
        for &p in c {
            if p == 0 || p > degree {
                return Err(Error::PointOutOfRange { point: p, degree });
            }
            z.push(p - 1);
        }
        cs.push(z);
    }
    Permutation::from_cycles(degree, &cs)
}

fn group_child(e: &GroupExpr, path: &str, limits: &Limits) -> Result<PermGroup> {
    elaborate_at(e, path, limits)?
        .into_group()
        .map_err(|err| err.at(format!("{path} `{e}`")))
}

fn elaborate_at(expr: &GroupExpr, path: &str, limits: &Limits) -> Result<Elaborated> {
    let child_path = |i: usize| format!("{path}.{i}");
    let kids = expr.children();
    let children = |from: usize| -> Result<Vec<PermGroup>> {
        kids.iter()
            .enumerate()
            .skip(from)
            .map(|(i, e)| group_child(e, &child_path(i), limits))
            .collect()
    };
    let built: Result<Elaborated> = (|| {
        let g = match expr {
            GroupExpr::Sym(n) => symmetric(*n)?,
            GroupExpr::Alt(n) => alternating(*n)?,
            GroupExpr::Cyc(n) => cyclic(*n)?,
            GroupExpr::Agl1(p) => agl1(*p)?,
            GroupExpr::Gens(n, perms) => {
                let gens = perms.iter().map(|c| zero_based(c, *n)).collect::<Result<_>>()?;
                from_generators(*n, gens)?
            }
            GroupExpr::WrI(..) => {
                let c = children(0)?;
                wreath_imprimitive(&c[0], &c[1], limits)?
            }
            GroupExpr::WrP(..) => {
                let c = children(0)?;
                wreath_power(&c[0], &c[1], limits)?
            }
            GroupExpr::ProdI(_) => direct_product_intransitive(&children(0)?, limits)?,
            GroupExpr::ProdP(_) => direct_product_product(&children(0)?, limits)?,
            GroupExpr::EvenWr(m, _, action) => even_base_wreath(*m, &children(0)?[0], *action, limits)?,
            GroupExpr::Coset(_, cycles) => {
                let g = children(0)?.remove(0);
                let rep = zero_based(cycles, g.degree())?;
                return Ok(Elaborated::Coset(Coset::new(g, rep)?));
            }
        };
        Ok(Elaborated::Group(g))
    })();
    built.map_err(|e| match e {
        Error::AtPath { .. } => e,
        other => other.at(format!("{path} `{expr}`")),
    })
}

/// Builds the group or coset an expression denotes, checking degree caps at every node.
pub fn elaborate(expr: &GroupExpr, limits: &Limits) -> Result<Elaborated> {
    elaborate_at(expr, "$", limits)
}

/// Parses and elaborates in one step.
pub fn build(text: &str, limits: &Limits) -> Result<Elaborated> {
    elaborate(&GroupExpr::parse(text)?, limits)
}

/// Parses and elaborates an expression that must denote a group.
pub fn build_group(text: &str, limits: &Limits) -> Result<PermGroup> {
    build(text, limits)?.into_group()
}
