//! Permutations, permutation groups given by generators, orbits and stabilisers.
//!
//! Points are `0..degree` internally; cycle notation at the boundary is 1-based.
//! Permutations act on the right: `g.then(h)` is "first `g`, then `h`", so
//! `x (g h) = (x g) h`.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::exactmath::factorial;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree as u32).collect(),
        }
    }

    /// Builds a permutation from its image list, checking that it is a bijection.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::NotAPermutation(format!("{images:?}")));
            }
            seen[i] = true;
        }
        Ok(Permutation {
            images: images.into_iter().map(|i| i as u32).collect(),
        })
    }

    pub(crate) fn from_raw(images: Vec<u32>) -> Self {
        debug_assert!(Self::from_images(images.iter().map(|&i| i as usize).collect()).is_ok());
        Permutation { images }
    }

    pub(crate) fn raw_mut(&mut self) -> &mut [u32] {
        &mut self.images
    }

    /// Builds a permutation from 0-based cycles; unmentioned points are fixed.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut used = vec![false; degree];
        for cycle in cycles {
            for &p in cycle {
                if p >= degree {
                    return Err(Error::PointOutOfRange { point: p + 1, degree });
                }
                if used[p] {
                    return Err(Error::RepeatedPoint { point: p + 1 });
                }
                used[p] = true;
            }
            for (i, &p) in cycle.iter().enumerate() {
                images[p] = cycle[(i + 1) % cycle.len()];
            }
        }
        Self::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn image(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &p)| i as u32 == p)
    }

    /// `self` followed by `other`; panics on a degree mismatch.
    pub fn then(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "degree mismatch in composition");
        Permutation {
            images: self.images.iter().map(|&x| other.images[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.degree()];
        for (i, &p) in self.images.iter().enumerate() {
            inv[p as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    pub fn fixed_point_count(&self) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|&(i, &p)| i as u32 == p)
            .count()
    }

    pub fn is_derangement(&self) -> bool {
        self.fixed_point_count() == 0
    }

    pub fn cycle_decomposition(&self) -> CycleDecomposition {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        let mut cycle_type = vec![0usize; n + 1];
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.image(start);
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.image(x);
            }
            cycle_type[cycle.len()] += 1;
            cycles.push(cycle);
        }
        let cycle_count = cycles.len();
        CycleDecomposition {
            cycles,
            cycle_type,
            cycle_count,
        }
    }

    /// Number of cycles, trivial cycles included.
    pub fn cycle_count(&self) -> usize {
        let mut seen = Vec::new();
        self.cycle_count_with(&mut seen)
    }

    pub(crate) fn cycle_count_with(&self, seen: &mut Vec<bool>) -> usize {
        seen.clear();
        seen.resize(self.degree(), false);
        let mut count = 0;
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.image(x);
            }
        }
        count
    }

    /// Writes `m_i` into `out[i]` for `i = 1..=degree`.
    pub(crate) fn cycle_type_with(&self, seen: &mut Vec<bool>, out: &mut Vec<u32>) {
        let n = self.degree();
        seen.clear();
        seen.resize(n, false);
        out.clear();
        out.resize(n + 1, 0);
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                len += 1;
                x = self.image(x);
            }
            out[len] += 1;
        }
    }

    /// `+1` for even permutations, `−1` for odd ones.
    pub fn sign(&self) -> i8 {
        if (self.degree() - self.cycle_count()) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// 1-based cycle notation with trivial cycles omitted; `()` for the identity.
    pub fn to_cycle_string(&self) -> String {
        let cycles: Vec<_> = self
            .cycle_decomposition()
            .cycles
            .into_iter()
            .filter(|c| c.len() > 1)
            .collect();
        if cycles.is_empty() {
            return "()".to_string();
        }
        cycles
            .iter()
            .map(|c| {
                let pts: Vec<String> = c.iter().map(|p| (p + 1).to_string()).collect();
                format!("({})", pts.join(" "))
            })
            .collect()
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[deg {}]", self.to_cycle_string(), self.degree())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_cycle_string())
    }
}

/// `g` followed by `h`.
pub fn compose(g: &Permutation, h: &Permutation) -> Result<Permutation> {
    if g.degree() != h.degree() {
        return Err(Error::DegreeMismatch {
            left: g.degree(),
            right: h.degree(),
        });
    }
    Ok(g.then(h))
}

/// Disjoint cycles of a permutation, trivial ones included, each starting at its smallest
/// point and listed in order of those smallest points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleDecomposition {
    pub cycles: Vec<Vec<usize>>,
    /// `cycle_type[i]` is the number of `i`-cycles; index 0 is unused.
    pub cycle_type: Vec<usize>,
    pub cycle_count: usize,
}

/// Parses 1-based cycle notation such as `(1 2 3)(4,5)`; `()` is the identity.
pub fn parse_cycles(text: &str, degree: usize) -> Result<Permutation> {
    let cycles = parse_cycle_notation(text)?;
    let zero_based: Vec<Vec<usize>> = cycles
        .into_iter()
        .map(|c| c.into_iter().map(|p| p - 1).collect())
        .collect();
    for c in &zero_based {
        if let Some(&p) = c.iter().find(|&&p| p >= degree) {
            return Err(Error::PointOutOfRange { point: p + 1, degree });
        }
    }
    Permutation::from_cycles(degree, &zero_based)
}

/// Parses cycle notation into 1-based cycles without fixing a degree.
pub fn parse_cycle_notation(text: &str) -> Result<Vec<Vec<usize>>> {
    let bytes = text.as_bytes();
    let malformed = |position: usize, message: &str| Error::MalformedCycle {
        position,
        message: message.to_string(),
    };
    let mut pos = 0;
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    skip_ws(&mut pos);
    if pos == bytes.len() {
        return Err(malformed(pos, "empty permutation"));
    }
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut saw_empty = false;
    while pos < bytes.len() {
        if bytes[pos] != b'(' {
            return Err(malformed(pos, "expected '('"));
        }
        pos += 1;
        skip_ws(&mut pos);
        let mut cycle = Vec::new();
        if pos < bytes.len() && bytes[pos] == b')' {
            pos += 1;
            saw_empty = true;
        } else {
            loop {
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if start == pos {
                    return Err(malformed(pos, "expected a point"));
                }
                let point: usize = text[start..pos]
                    .parse()
                    .map_err(|_| malformed(start, "point does not fit in an integer"))?;
                if point == 0 {
                    return Err(Error::PointOutOfRange { point: 0, degree: 0 });
                }
                cycle.push(point);
                let sep_start = pos;
                skip_ws(&mut pos);
                if pos < bytes.len() && bytes[pos] == b',' {
                    pos += 1;
                    skip_ws(&mut pos);
                } else if pos < bytes.len() && bytes[pos] == b')' {
                    pos += 1;
                    break;
                } else if pos == sep_start {
                    return Err(malformed(pos, "expected separator or ')'"));
                }
                if pos >= bytes.len() {
                    return Err(malformed(pos, "unterminated cycle"));
                }
            }
            cycles.push(cycle);
        }
        skip_ws(&mut pos);
    }
    if saw_empty && !cycles.is_empty() {
        return Err(malformed(0, "'()' must stand alone"));
    }
    let mut seen = HashSet::new();
    for &p in cycles.iter().flatten() {
        if !seen.insert(p) {
            return Err(Error::RepeatedPoint { point: p });
        }
    }
    Ok(cycles)
}

/// A way of listing the elements of a group without breadth-first closure.
///
/// Implemented by product constructions whose elements are known to be in bijection with
/// tuples of factor elements; each call must visit every element exactly once.
pub trait ElementSource: Send + Sync {
    fn degree(&self) -> usize;
    fn order(&self, cap: usize) -> Result<BigUint>;
    fn for_each(&self, cap: usize, f: &mut dyn FnMut(&Permutation)) -> Result<()>;

    /// `counts[k]` is the number of elements with exactly `k` fixed points.
    fn fix_counts(&self, cap: usize) -> Result<Vec<u64>> {
        let mut counts = vec![0u64; self.degree() + 1];
        self.for_each(cap, &mut |g| counts[g.fixed_point_count()] += 1)?;
        Ok(counts)
    }
}

struct GroupInner {
    degree: usize,
    generators: Vec<Permutation>,
    label: String,
    known_order: Option<BigUint>,
    source: Option<Arc<dyn ElementSource>>,
    elements: OnceLock<Arc<Vec<Permutation>>>,
}

/// A permutation group of some degree, given by generators.
///
/// The full element list is produced on demand by breadth-first closure, sorted
/// lexicographically by image sequence, and cached.
#[derive(Clone)]
pub struct PermGroup {
    inner: Arc<GroupInner>,
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PermGroup")
            .field("label", &self.inner.label)
            .field("degree", &self.inner.degree)
            .field("generators", &self.inner.generators)
            .finish()
    }
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        Self::build(degree, generators, String::new(), None, None)
    }

    /// Full constructor used by the named-group and product builders.
    pub fn build(
        degree: usize,
        generators: Vec<Permutation>,
        label: String,
        known_order: Option<BigUint>,
        source: Option<Arc<dyn ElementSource>>,
    ) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidArgument("groups act on at least one point".into()));
        }
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch {
                    left: degree,
                    right: g.degree(),
                });
            }
        }
        let mut distinct: Vec<Permutation> = Vec::new();
        for g in generators {
            if !g.is_identity() && !distinct.contains(&g) {
                distinct.push(g);
            }
        }
        let generators = distinct;
        Ok(PermGroup {
            inner: Arc::new(GroupInner {
                degree,
                generators,
                label,
                known_order,
                source,
                elements: OnceLock::new(),
            }),
        })
    }

    pub fn trivial(degree: usize) -> Self {
        let g = Self::build(degree, Vec::new(), format!("1({degree})"), Some(BigUint::one()), None)
            .expect("positive degree");
        let _ = g.inner.elements.set(Arc::new(vec![Permutation::identity(degree)]));
        g
    }

    /// A group whose full element list is already known.
    ///
    /// A small generating set is extracted greedily so that the group can still be used as
    /// a factor in other constructions.
    pub fn from_elements(degree: usize, mut elements: Vec<Permutation>, label: impl Into<String>) -> Result<Self> {
        elements.sort();
        elements.dedup();
        let mut generators: Vec<Permutation> = Vec::new();
        let mut span: HashSet<Permutation> = HashSet::from([Permutation::identity(degree)]);
        for g in &elements {
            if !span.contains(g) {
                generators.push(g.clone());
                span = closure(degree, &generators, elements.len())?.into_iter().collect();
            }
        }
        if span.len() != elements.len() {
            return Err(Error::InvalidArgument("element list is not closed under composition".into()));
        }
        let order = BigUint::from(elements.len());
        let group = Self::build(degree, generators, label.into(), Some(order), None)?;
        let _ = group.inner.elements.set(Arc::new(elements));
        Ok(group)
    }

    pub fn with_label(&self, label: impl Into<String>) -> Self {
        let inner = &self.inner;
        let group = PermGroup {
            inner: Arc::new(GroupInner {
                degree: inner.degree,
                generators: inner.generators.clone(),
                label: label.into(),
                known_order: inner.known_order.clone(),
                source: inner.source.clone(),
                elements: OnceLock::new(),
            }),
        };
        if let Some(e) = inner.elements.get() {
            let _ = group.inner.elements.set(e.clone());
        }
        group
    }

    pub fn degree(&self) -> usize {
        self.inner.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.inner.generators
    }

    pub fn label(&self) -> &str {
        &self.inner.label
    }

    /// Order known from the construction, without enumerating.
    pub fn known_order(&self) -> Option<&BigUint> {
        self.inner.known_order.as_ref()
    }

    fn cap_error(&self, cap: usize) -> Error {
        let what = if self.inner.label.is_empty() {
            format!("group of degree {}", self.inner.degree)
        } else {
            self.inner.label.clone()
        };
        Error::CapExceeded { what, cap }
    }

    fn exceeds(&self, n: &BigUint, cap: usize) -> bool {
        n.to_usize().map_or(true, |n| n > cap)
    }

    /// Breadth-first closure from the identity under right multiplication by generators.
    pub fn enumerate(&self, cap: usize) -> Result<Arc<Vec<Permutation>>> {
        if let Some(e) = self.inner.elements.get() {
            if e.len() > cap {
                return Err(self.cap_error(cap));
            }
            return Ok(e.clone());
        }
        if let Some(n) = &self.inner.known_order {
            if self.exceeds(n, cap) {
                return Err(self.cap_error(cap));
            }
        }
        let elements = closure(self.inner.degree, &self.inner.generators, cap)
            .map_err(|_| self.cap_error(cap))?;
        Ok(self.inner.elements.get_or_init(|| Arc::new(elements)).clone())
    }

    pub fn order(&self, cap: usize) -> Result<BigUint> {
        if let Some(n) = &self.inner.known_order {
            return Ok(n.clone());
        }
        if let Some(src) = &self.inner.source {
            return src.order(cap);
        }
        Ok(BigUint::from(self.enumerate(cap)?.len()))
    }

    /// Visits every element once. Product constructions stream their elements without
    /// storing them; other groups use the cached closure.
    pub fn for_each_element(&self, cap: usize, f: &mut dyn FnMut(&Permutation)) -> Result<()> {
        if self.inner.elements.get().is_none() {
            if let Some(src) = &self.inner.source {
                let order = src.order(cap)?;
                if self.exceeds(&order, cap) {
                    return Err(self.cap_error(cap));
                }
                return src.for_each(cap, f);
            }
        }
        for g in self.enumerate(cap)?.iter() {
            f(g);
        }
        Ok(())
    }

    /// Fixed-point counts of all elements, indexed by the number of fixed points.
    pub fn fix_counts(&self, cap: usize) -> Result<Vec<u64>> {
        if self.inner.elements.get().is_none() {
            if let Some(src) = &self.inner.source {
                let order = src.order(cap)?;
                if self.exceeds(&order, cap) {
                    return Err(self.cap_error(cap));
                }
                return src.fix_counts(cap);
            }
        }
        let mut counts = vec![0u64; self.degree() + 1];
        for g in self.enumerate(cap)?.iter() {
            counts[g.fixed_point_count()] += 1;
        }
        Ok(counts)
    }

    /// Membership by binary search in the sorted element list.
    pub fn contains(&self, g: &Permutation, cap: usize) -> Result<bool> {
        if g.degree() != self.degree() {
            return Ok(false);
        }
        Ok(self.enumerate(cap)?.binary_search(g).is_ok())
    }

    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for g in self.generators() {
            for x in 0..n {
                let (a, b) = (find(&mut parent, x), find(&mut parent, g.image(x)));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut orbits: Vec<Vec<usize>> = Vec::new();
        let mut index_of_root = vec![usize::MAX; n];
        for x in 0..n {
            let r = find(&mut parent, x);
            if index_of_root[r] == usize::MAX {
                index_of_root[r] = orbits.len();
                orbits.push(Vec::new());
            }
            orbits[index_of_root[r]].push(x);
        }
        orbits
    }

    pub fn is_transitive(&self) -> bool {
        self.orbits().len() == 1
    }

    pub fn point_stabilizer(&self, x: usize, cap: usize) -> Result<PermGroup> {
        if x >= self.degree() {
            return Err(Error::PointOutOfRange { point: x + 1, degree: self.degree() });
        }
        let mut fixing = Vec::new();
        self.for_each_element(cap, &mut |g| {
            if g.image(x) == x {
                fixing.push(g.clone());
            }
        })?;
        let label = format!("Stab({}, {})", self.label(), x + 1);
        PermGroup::from_elements(self.degree(), fixing, label)
    }

    /// Number of orbits of a point stabiliser of a transitive group.
    pub fn rank(&self, cap: usize) -> Result<usize> {
        if !self.is_transitive() {
            return Err(Error::NotTransitive);
        }
        Ok(self.point_stabilizer(0, cap)?.orbits().len())
    }

    /// Largest `t` for which the group acts regularly on `t`-tuples of distinct points.
    ///
    /// Sharp `(n−1)`- and `n`-transitivity coincide, so `t` is reported up to `n − 1`
    /// (and as 1 on a single point). Intransitive groups give 0.
    pub fn sharp_transitivity_degree(&self, cap: usize) -> Result<usize> {
        let n = self.degree();
        if !self.is_transitive() {
            return Ok(0);
        }
        if n == 1 {
            return Ok(1);
        }
        let order = self.order(cap)?;
        let elements = self.enumerate(cap)?;
        for t in (1..n).rev() {
            let tuples = factorial(n as u64) / factorial((n - t) as u64);
            if order != tuples {
                continue;
            }
            let fixes_prefix = elements
                .iter()
                .filter(|g| (0..t).all(|i| g.image(i) == i))
                .count();
            if fixes_prefix == 1 {
                return Ok(t);
            }
        }
        Ok(0)
    }
}

/// Sorted closure of `generators` under composition, failing once it grows past `cap`.
pub(crate) fn closure(degree: usize, generators: &[Permutation], cap: usize) -> Result<Vec<Permutation>> {
    let id = Permutation::identity(degree);
    let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in generators {
            let h = g.then(s);
            if !seen.contains(&h) {
                seen.insert(h.clone());
                if seen.len() > cap {
                    return Err(Error::CapExceeded {
                        what: format!("closure of {} generators", generators.len()),
                        cap,
                    });
                }
                queue.push_back(h);
            }
        }
    }
    let mut elements: Vec<Permutation> = seen.into_iter().collect();
    elements.sort_unstable();
    Ok(elements)
}

/// The right coset `subgroup · representative`.
#[derive(Clone, Debug)]
pub struct Coset {
    pub subgroup: PermGroup,
    pub representative: Permutation,
}

impl Coset {
    pub fn new(subgroup: PermGroup, representative: Permutation) -> Result<Self> {
        if subgroup.degree() != representative.degree() {
            return Err(Error::DegreeMismatch {
                left: subgroup.degree(),
                right: representative.degree(),
            });
        }
        Ok(Coset {
            subgroup,
            representative,
        })
    }

    pub fn degree(&self) -> usize {
        self.subgroup.degree()
    }

    pub fn size(&self, cap: usize) -> Result<BigUint> {
        self.subgroup.order(cap)
    }

    /// Visits `c · representative` for every `c` in the subgroup.
    pub fn for_each_element(&self, cap: usize, f: &mut dyn FnMut(&Permutation)) -> Result<()> {
        let rep = &self.representative;
        let mut buf = Permutation::identity(self.degree());
        self.subgroup.for_each_element(cap, &mut |c| {
            for (slot, &x) in buf.raw_mut().iter_mut().zip(c.images()) {
                *slot = rep.images()[x as usize];
            }
            f(&buf);
        })
    }
}
