use std::process::ExitCode;
use std::time::Instant;

use num_traits::{One, Signed, Zero};
use wreathlab::constructions::{
    agl1, alternating, base_coset, cyclic, direct_product_intransitive, direct_product_product, even_base_wreath,
    symmetric, wreath_imprimitive, wreath_power, Action,
};
use wreathlab::density::{
    density_search_imprimitive, density_search_power_regular, imprimitive_chain, prime_product, step_size, Family,
};
use wreathlab::exactmath::{d_seq, rat, rat_ratio, to_f64};
use wreathlab::formulas::{
    coset_delta_extrema, doubly_symmetric_gap, imprimitive_spectrum, intransitive_spectrum, power_coset_delta_k,
    power_delta_cyclic, power_delta_full_symmetric, power_spectrum, power_symmetric_lower_bound,
    product_action_delta_k, rank_bounds, sandwich_bounds, sharply_transitive_delta_k,
    sharply_transitive_delta_recursive, DeltaVector,
};
use wreathlab::groupstats::{cycle_count_vector, cycle_parity_totals, fix_spectrum, profile, Profile};
use wreathlab::{BigRational, Limits, PermGroup, Permutation, Result, DEFAULT_ENUMERATION_CAP as CAP};

struct Check {
    failures: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Check { failures: Vec::new() }
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn result<T>(&mut self, r: Result<T>, what: &str) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.failures.push(format!("{what}: {e}"));
                None
            }
        }
    }
}

struct GridEntry {
    name: String,
    group: PermGroup,
    formula: Vec<BigRational>,
    profile: Profile,
}

fn small_groups() -> Vec<(&'static str, PermGroup)> {
    vec![
        ("S2", symmetric(2).unwrap()),
        ("S3", symmetric(3).unwrap()),
        ("A3", alternating(3).unwrap()),
        ("A4", alternating(4).unwrap()),
        ("S4", symmetric(4).unwrap()),
        ("C2", cyclic(2).unwrap()),
        ("C3", cyclic(3).unwrap()),
        ("C4", cyclic(4).unwrap()),
    ]
}

fn tops() -> Vec<(&'static str, PermGroup)> {
    vec![
        ("S2", symmetric(2).unwrap()),
        ("S3", symmetric(3).unwrap()),
        ("C2", cyclic(2).unwrap()),
        ("C3", cyclic(3).unwrap()),
        ("C4", cyclic(4).unwrap()),
    ]
}

fn deltas(g: &PermGroup) -> DeltaVector {
    DeltaVector::from_spectrum(&fix_spectrum(g, CAP).unwrap())
}

fn padded(v: &DeltaVector, degree: usize) -> Vec<BigRational> {
    (0..=degree).map(|k| v.get(k)).collect()
}

/// Builds every product in the grid that fits the default caps, with its formula spectrum
/// and enumerated profile.
fn grid(skipped: &mut Vec<String>) -> Vec<GridEntry> {
    let limits = Limits::default();
    let mut out = Vec::new();
    for (an, a) in small_groups() {
        let da = deltas(&a);
        for (bn, b) in tops() {
            let db = deltas(&b);
            let stir_b = cycle_count_vector(&b, CAP).unwrap();
            let pair = [da.clone(), db.clone()];
            let candidates: Vec<(String, Result<PermGroup>, Box<dyn Fn(usize) -> Vec<BigRational>>)> = vec![
                (
                    format!("wrI({an},{bn})"),
                    wreath_imprimitive(&a, &b, &limits),
                    Box::new({
                        let s = imprimitive_spectrum(&da, &db);
                        move |n| padded(&s, n)
                    }),
                ),
                (
                    format!("wrP({an},{bn})"),
                    wreath_power(&a, &b, &limits),
                    Box::new({
                        let s = power_spectrum(&da, &stir_b);
                        move |n| padded(&s, n)
                    }),
                ),
                (
                    format!("prodI({an},{bn})"),
                    direct_product_intransitive(&[a.clone(), b.clone()], &limits),
                    Box::new({
                        let s = intransitive_spectrum(&pair);
                        move |n| padded(&s, n)
                    }),
                ),
                (
                    format!("prodP({an},{bn})"),
                    direct_product_product(&[a.clone(), b.clone()], &limits),
                    Box::new({
                        let pair = pair.clone();
                        move |n| (0..=n).map(|k| product_action_delta_k(&pair, k)).collect()
                    }),
                ),
            ];
            for (name, built, formula) in candidates {
                match built {
                    Ok(g) => {
                        let profile = profile(&g, CAP, true).unwrap();
                        let formula = formula(g.degree());
                        out.push(GridEntry {
                            name,
                            group: g,
                            formula,
                            profile,
                        });
                    }
                    Err(e) => skipped.push(format!("{name} ({e})")),
                }
            }
        }
    }
    out
}

fn criterion_1(grid: &[GridEntry]) -> Check {
    let mut c = Check::new();
    for e in grid {
        let enumerated = e.profile.fix.deltas();
        c.expect(enumerated == e.formula, || format!("{}: formula spectrum differs", e.name));
    }
    c
}

fn criterion_2() -> Check {
    let mut c = Check::new();
    let limits = Limits::default();
    for (an, a) in [("S2", symmetric(2).unwrap()), ("S3", symmetric(3).unwrap())] {
        let da = deltas(&a);
        for (bn, b) in [("S2", symmetric(2).unwrap()), ("S3", symmetric(3).unwrap()), ("C3", cyclic(3).unwrap())] {
            let tau = vec![Permutation::identity(a.degree()); b.degree()];
            for bel in b.enumerate(CAP).unwrap().iter() {
                let Some(coset) = c.result(base_coset(&a, &tau, bel, Action::Power, &limits), "base_coset") else {
                    continue;
                };
                let spectrum = fix_spectrum(&coset, CAP).unwrap();
                let l = bel.cycle_count();
                for k in 0..=spectrum.degree {
                    let formula = power_coset_delta_k(&da, l, k).unwrap();
                    c.expect(formula == spectrum.delta_k(k), || {
                        format!("{an}^[{}]·{bel} (from {bn}), k={k}", b.degree())
                    });
                }
            }
        }
    }
    c
}

fn criterion_3() -> Check {
    let mut c = Check::new();
    let mut cases: Vec<(String, PermGroup, u64)> = Vec::new();
    for n in 2..=6 {
        cases.push((format!("S{n}"), symmetric(n).unwrap(), n as u64 - 1));
    }
    for n in [4, 5, 6] {
        cases.push((format!("A{n}"), alternating(n).unwrap(), n as u64 - 2));
    }
    for p in [3u64, 5, 7] {
        cases.push((format!("C{p}"), cyclic(p as usize).unwrap(), 1));
        cases.push((format!("AGL1({p})"), agl1(p).unwrap(), 2));
    }
    for (name, g, t) in cases {
        let n = g.degree() as u64;
        let degree = g.sharp_transitivity_degree(CAP).unwrap() as u64;
        c.expect(degree == t, || format!("{name}: sharp transitivity {degree}, expected {t}"));
        let spectrum = fix_spectrum(&g, CAP).unwrap();
        for k in 0..=n {
            let formula = sharply_transitive_delta_k(n, t, k).unwrap();
            c.expect(formula == spectrum.delta_k(k as usize), || format!("{name}: k={k}"));
        }
        let rec = sharply_transitive_delta_recursive(n, t).unwrap();
        c.expect(rec == spectrum.delta(), || format!("{name}: recurrence gives {rec}"));
    }
    c
}

fn criterion_4() -> Check {
    let mut c = Check::new();
    let limits = Limits::default();
    for (m, bn, b) in [(3, "C2", cyclic(2).unwrap()), (4, "C2", cyclic(2).unwrap()), (3, "C3", cyclic(3).unwrap())] {
        let g = even_base_wreath(m, &b, Action::Power, &limits).unwrap();
        let delta = fix_spectrum(&g, CAP).unwrap().delta();
        let (lo, hi) = coset_delta_extrema(&symmetric(m).unwrap(), &alternating(m).unwrap(), CAP).unwrap();
        let bounds = sandwich_bounds(&lo, &hi, &cycle_count_vector(&b, CAP).unwrap()).unwrap();
        c.expect(bounds.contains(&delta), || {
            format!("evenWr({m},{bn}): {delta} outside [{}, {}]", bounds.lower, bounds.upper)
        });
    }
    c
}

fn criterion_5(grid: &[GridEntry]) -> Check {
    let mut c = Check::new();
    let limits = Limits::default();
    for (m, n) in [(3, 2), (4, 2), (3, 3)] {
        let g = wreath_power(&symmetric(m).unwrap(), &symmetric(n).unwrap(), &limits).unwrap();
        let r = g.rank(CAP).unwrap();
        c.expect(r == n + 1, || format!("rank(S{m} wrP S{n}) = {r}"));
    }
    for e in grid.iter().filter(|e| e.group.is_transitive()) {
        let spectrum = &e.profile.fix;
        // rank of a transitive group is the average of fix(g)^2
        let squares: BigRational = spectrum.deltas().iter().enumerate().map(|(k, d)| d * rat((k * k) as i64, 1)).sum();
        c.expect(squares.is_integer(), || format!("{}: non-integral rank", e.name));
        let r = squares.to_integer();
        let r = u64::try_from(r).unwrap();
        if r < 2 {
            continue;
        }
        let bounds = rank_bounds(r, e.group.degree() as u64).unwrap();
        let delta = spectrum.delta();
        c.expect(bounds.contains(&delta), || {
            format!("{}: delta {delta} outside [{}, {}] (rank {r})", e.name, bounds.lower, bounds.upper)
        });
    }
    c
}

fn criterion_6() -> Check {
    let mut c = Check::new();
    let inv_e = (-1.0f64).exp();
    let gap = (to_f64(&d_seq(12)) - inv_e).abs();
    c.expect(gap < 1e-7, || format!("|d_12 - 1/e| = {gap}"));
    let gap = doubly_symmetric_gap(12);
    c.expect(gap < 1e-3, || format!("S12 wrI S12 gap {gap}"));
    let third = rat(1, 3);
    for n in 1..=200 {
        let exact = to_f64(&power_delta_full_symmetric(&third, n));
        let bound = power_symmetric_lower_bound(&third, n);
        c.expect(exact >= bound - 1e-12, || format!("n={n}: {exact} < {bound}"));
    }
    let stir = cycle_count_vector(&cyclic(3).unwrap(), CAP).unwrap();
    let value = 1.0 - stir.pgf().eval_f64(1.0 - inv_e);
    c.expect(value > inv_e - 1e-9, || format!("C3 power value {value} <= 1/e"));
    c
}

fn criterion_7() -> Check {
    let mut c = Check::new();
    if let Some(w) = c.result(density_search_imprimitive(&rat(1, 3), &rat(1, 2), &rat(1, 20)), "imprimitive search") {
        if let Family::ImprimitiveAglChain { q, steps } = w.family {
            let value = imprimitive_chain(&rat(1, 3), q, steps as usize).unwrap().pop().unwrap();
            c.expect(w.value.lo <= value && value <= w.value.hi, || "chain value outside enclosure".into());
            c.expect((&value - rat(1, 2)).abs() <= rat(1, 20), || format!("chain value {value}"));
        } else {
            c.expect(false, || "wrong family".into());
        }
    }
    if let Some(w) = c.result(density_search_power_regular(&rat(1, 2), &rat(9, 10), &rat(1, 20)), "cyclic search") {
        if let Family::CyclicPowerChain { primes } = &w.family {
            let n = u64::try_from(prime_product(primes)).unwrap();
            let value = power_delta_cyclic(&rat(1, 2), n).unwrap();
            c.expect((&value - rat(9, 10)).abs() <= rat(1, 20), || format!("cyclic value {value}"));
        } else {
            c.expect(false, || "wrong family".into());
        }
    }

    let s3 = symmetric(3).unwrap();
    let chain = imprimitive_chain(&rat(1, 3), 3, 2).unwrap();
    let mut g = s3.clone();
    for (r, expected) in chain.iter().enumerate() {
        if r > 0 {
            let limits = Limits::default().with_enumeration_cap(usize::MAX);
            g = wreath_imprimitive(&g, &s3, &limits).unwrap();
        }
        let spectrum = fix_spectrum(&g, usize::MAX).unwrap();
        c.expect(&spectrum.delta() == expected, || format!("r={r}: oracle {} vs chain {expected}", spectrum.delta()));
    }

    for (n, q) in [(2u64, 3u64), (3, 5), (6, 5)] {
        for d in [rat(1, 3), rat(1, 2)] {
            let lhs = power_delta_cyclic(&d, n * q).unwrap() - power_delta_cyclic(&d, n).unwrap();
            let rhs = step_size(&d, n, q).unwrap();
            c.expect(lhs == rhs, || format!("D({n},{q}) at delta {d}"));
        }
    }
    c
}

fn criterion_8(grid: &[GridEntry]) -> Check {
    let mut c = Check::new();
    let one = BigRational::one();
    for e in grid {
        let g = &e.group;
        let p = &e.profile;
        let order = g.known_order().cloned().unwrap_or_else(|| g.order(CAP).unwrap());
        c.expect(p.fix.total == order, || format!("{}: sum of Fix_k differs from |G|", e.name));

        let average_fix: BigRational = p.fix.deltas().iter().enumerate().map(|(k, d)| d * rat(k as i64, 1)).sum();
        let orbits = g.orbits().len();
        c.expect(average_fix == rat(orbits as i64, 1), || format!("{}: orbit count", e.name));

        let pg = p.fix.pgf();
        let cg = p.cycles.pgf();
        c.expect(pg.eval(&one) == one && cg.eval(&one) == one, || format!("{}: pgf at 1", e.name));

        let ci = p.cycle_index.as_ref().unwrap();
        c.expect(ci.fix_specialization() == pg, || format!("{}: cycle index fix specialisation", e.name));
        c.expect(ci.cycle_specialization() == cg, || format!("{}: cycle index cycle specialisation", e.name));

        let has_odd = g.generators().iter().any(|x| x.sign() < 0);
        let (even_l, odd_l) = cycle_parity_totals(&p.cycles);
        if has_odd {
            c.expect(p.even.total == p.odd.total && even_l == odd_l, || format!("{}: parity halves", e.name));
        } else {
            let n_even = g.degree() % 2 == 0;
            let wrong = if n_even { &odd_l } else { &even_l };
            c.expect(p.odd.total.is_zero() && wrong.is_zero(), || format!("{}: parity in A_n", e.name));
        }

        if g.is_transitive() {
            // fixed-point counts of the stabiliser of point 0, streamed from G
            let mut counts = vec![0u64; g.degree() + 1];
            g.for_each_element(CAP, &mut |x| {
                if x.image(0) == 0 {
                    counts[x.fixed_point_count()] += 1;
                }
            })
            .unwrap();
            let h_order: u64 = counts.iter().sum();
            let ph: Vec<BigRational> = counts.iter().map(|&k| rat_ratio(k, h_order)).collect();
            let ph = wreathlab::RationalPoly::from_coeffs(ph);
            c.expect(ph.div_x() == Some(pg.derivative()), || format!("{}: stabiliser derivative", e.name));
        }
    }
    c
}

fn report(id: usize, title: &str, start: Instant, check: Check, notes: &str) -> bool {
    let secs = start.elapsed().as_secs_f64();
    let ok = check.failures.is_empty();
    println!("criterion {id}: {} {title} ({secs:.1}s){notes}", if ok { "PASS" } else { "FAIL" });
    for f in check.failures.iter().take(10) {
        println!("    {f}");
    }
    ok
}

fn main() -> ExitCode {
    let mut all = true;

    let start = Instant::now();
    let mut skipped = Vec::new();
    let grid = grid(&mut skipped);
    let notes = format!(" [{} products checked, {} over caps]", grid.len(), skipped.len());
    all &= report(1, "oracle grid, both actions and both direct products", start, criterion_1(&grid), &notes);
    for s in &skipped {
        println!("    skipped {s}");
    }

    let t = Instant::now();
    all &= report(2, "base coset power formula", t, criterion_2(), "");
    let t = Instant::now();
    all &= report(3, "sharply transitive spectra and recurrence", t, criterion_3(), "");
    let t = Instant::now();
    all &= report(4, "even-base sandwich", t, criterion_4(), "");
    let t = Instant::now();
    all &= report(5, "rank and rank bounds", t, criterion_5(&grid), "");
    let t = Instant::now();
    all &= report(6, "limits at desk scale", t, criterion_6(), "");
    let t = Instant::now();
    all &= report(7, "density witnesses, iterated chain oracle, step sizes", t, criterion_7(), "");
    let t = Instant::now();
    all &= report(8, "structural invariants over the grid", t, criterion_8(&grid), "");

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
