mod report;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{One, Signed};
use wreathlab::constructions::{
    agl1, build, build_group, cyclic, direct_product_intransitive, direct_product_product, elaborate, symmetric,
    wreath_imprimitive, wreath_power, Action, Elaborated, GroupExpr,
};
use wreathlab::density::{
    agl1_fix_pgf, default_catalog, density_search_imprimitive, density_search_power_primitive,
    density_search_power_regular, imprimitive_chain, prime_product, step_size, DensityWitness, Family,
    PrimitiveSearch,
};
use wreathlab::exactmath::{d_seq, parse_rational, rat_int, to_f64};
use wreathlab::formulas::{
    coset_delta_extrema, imprimitive_spectrum, imprimitive_symmetric_delta, intransitive_spectrum,
    power_delta_cyclic, power_delta_full_symmetric, power_spectrum, power_symmetric_lower_bound,
    product_action_delta_k, rank_bounds, sandwich_bounds, sharply_transitive_delta_k, DeltaVector,
};
use wreathlab::groupstats::{cycle_count_vector, cycle_index, fix_spectrum, profile, FixSpectrum};
use wreathlab::{
    BigInt, BigRational, BigUint, Error, Limits, PermGroup, Result, DEFAULT_DEGREE_CAP, DEFAULT_ENUMERATION_CAP,
};

use report::{Format, Report};

#[derive(Parser, Debug)]
#[command(name = "wreathlab", version, about = "Exact fixed-point statistics of permutation groups and wreath products")]
struct Cli {
    /// Emit JSON
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV, one row per value
    #[arg(long, global = true)]
    csv: bool,
    /// Enumeration cap (elements per group)
    #[arg(long, global = true, env = "WREATHLAB_CAP", default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: usize,
    /// Degree cap (points per constructed group)
    #[arg(long = "degree-cap", global = true, default_value_t = DEFAULT_DEGREE_CAP)]
    degree_cap: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Order, orbits, fixed-point spectrum and cycle counts of a group or coset
    Stats {
        expr: String,
        /// Also report the rank of a transitive group
        #[arg(long)]
        rank: bool,
        #[arg(long = "cycle-index")]
        cycle_index: bool,
    },
    /// Cycle index of a group
    Index { expr: String },
    /// Closed-form values, no enumeration of the product
    Formula {
        #[command(subcommand)]
        which: FormulaCommand,
    },
    /// Compare a product formula against enumeration
    Verify {
        kind: ProductKind,
        #[arg(required = true, num_args = 2..)]
        groups: Vec<String>,
        #[command(flatten)]
        ks: KSelect,
    },
    /// Rank bounds and sandwich bounds for a group
    Bounds {
        expr: String,
        /// Normal subgroup for sandwich bounds, as C=EXPR
        #[arg(long)]
        sandwich: Option<String>,
    },
    /// Search for a group whose derangement proportion is near a target
    Density {
        mode: DensityMode,
        #[arg(long = "deltaA", conflicts_with = "base")]
        delta_a: Option<String>,
        /// Base group, whose derangement proportion is used
        #[arg(long)]
        base: Option<String>,
        /// Top group for the primitive search
        #[arg(long)]
        top: Option<String>,
        #[arg(long)]
        target: String,
        #[arg(long)]
        eps: String,
        /// Rebuild the witness group and enumerate it when it fits the caps
        #[arg(long = "verify-oracle")]
        verify_oracle: bool,
    },
    /// Finite-n values of the limiting proportions
    Limits {
        #[arg(long, default_value_t = 12)]
        n: u64,
        #[arg(long, default_value = "1/3")]
        delta: String,
    },
}

#[derive(Subcommand, Debug)]
enum FormulaCommand {
    #[command(name = "wrI")]
    WrI {
        a: String,
        b: String,
        #[command(flatten)]
        ks: KSelect,
    },
    #[command(name = "wrP")]
    WrP {
        a: String,
        b: String,
        #[command(flatten)]
        ks: KSelect,
    },
    #[command(name = "prodI")]
    ProdI {
        #[arg(required = true, num_args = 2..)]
        groups: Vec<String>,
        #[command(flatten)]
        ks: KSelect,
    },
    #[command(name = "prodP")]
    ProdP {
        #[arg(required = true, num_args = 2..)]
        groups: Vec<String>,
        #[command(flatten)]
        ks: KSelect,
    },
    /// Sharply t-transitive group of degree n
    Sharp {
        n: u64,
        t: u64,
        #[command(flatten)]
        ks: KSelect,
    },
    /// delta(A wrP C_n) from delta(A)
    CyclicPower { delta: String, n: u64 },
    /// delta(A wrP S_n) from delta(A), with the 1 - n^(-delta) bound
    FullSymmetricPower { delta: String, n: u64 },
    /// delta(A wrI S_n) from delta(A)
    ImprimitiveSymmetric { delta: String, n: u64 },
    /// Fixed-point pgf of AGL1(q)
    Agl1 { q: u64 },
    /// c_0 = delta, c_i = P_C(c_(i-1)) with C = AGL1(q)
    Chain { delta: String, q: u64, r: usize },
    /// Step D(n, q) of the cyclic chain
    Step { delta: String, n: u64, q: u64 },
}

#[derive(Args, Debug, Clone, Copy)]
struct KSelect {
    /// Only this k
    #[arg(long, conflicts_with = "all_k")]
    k: Option<usize>,
    /// Every k (the default)
    #[arg(long = "all-k")]
    all_k: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ProductKind {
    #[value(name = "wrI")]
    WrI,
    #[value(name = "wrP")]
    WrP,
    #[value(name = "prodI")]
    ProdI,
    #[value(name = "prodP")]
    ProdP,
}

impl ProductKind {
    fn name(self) -> &'static str {
        match self {
            ProductKind::WrI => "wrI",
            ProductKind::WrP => "wrP",
            ProductKind::ProdI => "prodI",
            ProductKind::ProdP => "prodP",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum DensityMode {
    Imprimitive,
    Cyclic,
    Primitive,
}

struct Ctx {
    limits: Limits,
}

impl Ctx {
    fn cap(&self) -> usize {
        self.limits.enumeration_cap
    }
}

fn exit_code(e: &Error) -> u8 {
    match e.root() {
        Error::CapExceeded { .. }
        | Error::DegreeOverflow { .. }
        | Error::NotTransitive
        | Error::NotNormal
        | Error::EpsilonTooSmall(_)
        | Error::DegenerateDelta(_) => 2,
        _ => 1,
    }
}

fn status_code(status: &str) -> u8 {
    match status {
        "DIFFER" | "FAIL" => 3,
        "infeasible" => 2,
        _ => 0,
    }
}

fn integer(x: impl Into<BigInt>) -> BigRational {
    rat_int(x)
}

fn big(x: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(x.clone()))
}

fn rational(text: &str) -> Result<BigRational> {
    parse_rational(text)
}

fn selected(ks: KSelect, degree: usize) -> Result<Vec<usize>> {
    match ks.k {
        Some(k) if k > degree => Err(Error::IndexOutOfRange { index: k, len: degree + 1 }),
        Some(k) => Ok(vec![k]),
        None => Ok((0..=degree).collect()),
    }
}

fn group(text: &str, ctx: &Ctx) -> Result<PermGroup> {
    build_group(text, &ctx.limits)
}

fn deltas(g: &PermGroup, ctx: &Ctx) -> Result<DeltaVector> {
    Ok(DeltaVector::from_spectrum(&fix_spectrum(g, ctx.cap())?))
}

/// Rank of a transitive group as the mean of fix(g)^2.
fn rank_from_spectrum(s: &FixSpectrum) -> BigRational {
    s.deltas()
        .iter()
        .enumerate()
        .map(|(k, d)| d * integer((k * k) as u64))
        .sum()
}

fn product_degree(kind: ProductKind, groups: &[PermGroup], ctx: &Ctx) -> Result<usize> {
    if matches!(kind, ProductKind::WrI | ProductKind::WrP) && groups.len() != 2 {
        return Err(Error::InvalidArgument(format!("{} takes exactly two groups", kind.name())));
    }
    let degrees: Vec<BigUint> = groups.iter().map(|g| BigUint::from(g.degree())).collect();
    let degree: BigUint = match kind {
        ProductKind::WrI | ProductKind::ProdP => degrees.iter().product(),
        ProductKind::ProdI => degrees.iter().sum(),
        ProductKind::WrP => {
            if groups[1].degree() > 64 && groups[0].degree() > 1 {
                return Err(Error::DegreeOverflow {
                    what: kind.name().into(),
                    degree: format!("{}^{}", groups[0].degree(), groups[1].degree()),
                    cap: ctx.limits.degree_cap,
                });
            }
            degrees[0].pow(groups[1].degree() as u32)
        }
    };
    match usize::try_from(&degree) {
        Ok(d) if d <= ctx.limits.degree_cap => Ok(d),
        _ => Err(Error::DegreeOverflow {
            what: kind.name().into(),
            degree: degree.to_string(),
            cap: ctx.limits.degree_cap,
        }),
    }
}

fn formula_spectrum(kind: ProductKind, groups: &[PermGroup], ctx: &Ctx) -> Result<Vec<BigRational>> {
    let degree = product_degree(kind, groups, ctx)?;
    let spectra = groups.iter().map(|g| deltas(g, ctx)).collect::<Result<Vec<_>>>()?;
    let v = match kind {
        ProductKind::WrI => imprimitive_spectrum(&spectra[0], &spectra[1]),
        ProductKind::WrP => power_spectrum(&spectra[0], &cycle_count_vector(&groups[1], ctx.cap())?),
        ProductKind::ProdI => intransitive_spectrum(&spectra),
        ProductKind::ProdP => {
            return Ok((0..=degree).map(|k| product_action_delta_k(&spectra, k)).collect());
        }
    };
    Ok((0..=degree).map(|k| v.get(k)).collect())
}

fn build_product(kind: ProductKind, groups: &[PermGroup], ctx: &Ctx) -> Result<PermGroup> {
    match kind {
        ProductKind::WrI => wreath_imprimitive(&groups[0], &groups[1], &ctx.limits),
        ProductKind::WrP => wreath_power(&groups[0], &groups[1], &ctx.limits),
        ProductKind::ProdI => direct_product_intransitive(groups, &ctx.limits),
        ProductKind::ProdP => direct_product_product(groups, &ctx.limits),
    }
}

fn run_stats(expr: &str, rank: bool, with_index: bool, ctx: &Ctx) -> Result<Report> {
    let mut r = Report::new("stats");
    r.input("expr", expr);
    let el = build(expr, &ctx.limits)?;
    let p = match &el {
        Elaborated::Group(g) => {
            r.value("order", &big(&g.order(ctx.cap())?));
            r.value("degree", &integer(g.degree() as u64));
            let orbits = g.orbits().len();
            r.value("orbits", &integer(orbits as u64));
            r.text("transitive", if orbits == 1 { "yes" } else { "no" });
            profile(g, ctx.cap(), with_index)?
        }
        Elaborated::Coset(c) => {
            r.value("size", &big(&c.size(ctx.cap())?));
            r.value("degree", &integer(c.degree() as u64));
            profile(c, ctx.cap(), with_index)?
        }
    };
    if rank {
        match &el {
            Elaborated::Group(g) if g.is_transitive() => r.value("rank", &rank_from_spectrum(&p.fix)),
            Elaborated::Group(_) => return Err(Error::NotTransitive),
            Elaborated::Coset(_) => return Err(Error::InvalidArgument("rank needs a group, not a coset".into())),
        }
    }
    for k in 0..=p.fix.degree {
        r.indexed("delta", k, &p.fix.delta_k(k));
    }
    for l in 1..=p.cycles.degree {
        r.indexed("stir", l, &big(&p.cycles.count(l)));
    }
    r.text("P_G", p.fix.pgf().to_string());
    r.text("C_G", p.cycles.pgf().to_string());
    if let Some(z) = &p.cycle_index {
        r.text("Z", z.to_string());
    }
    Ok(r)
}

fn run_index(expr: &str, ctx: &Ctx) -> Result<Report> {
    let mut r = Report::new("index");
    r.input("expr", expr);
    let g = group(expr, ctx)?;
    let z = cycle_index(&g, ctx.cap())?;
    for (exps, c) in z.terms.iter().rev() {
        let name: Vec<String> = exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { format!("x{}", i + 1) } else { format!("x{}^{e}", i + 1) })
            .collect();
        r.value(&name.join("*"), c);
    }
    r.text("Z", z.to_string());
    Ok(r)
}

fn spectrum_rows(r: &mut Report, name: &str, values: &[BigRational], ks: &[usize]) {
    for &k in ks {
        r.indexed(name, k, &values[k]);
    }
}

fn run_formula(which: &FormulaCommand, ctx: &Ctx) -> Result<Report> {
    let mut r = Report::new("formula");
    let product = |r: &mut Report, kind: ProductKind, names: &[String], ks: KSelect| -> Result<()> {
        r.input("construction", kind.name());
        r.input("groups", names.to_vec());
        let groups = names.iter().map(|n| group(n, ctx)).collect::<Result<Vec<_>>>()?;
        let values = formula_spectrum(kind, &groups, ctx)?;
        let ks = selected(ks, values.len() - 1)?;
        spectrum_rows(r, "delta", &values, &ks);
        Ok(())
    };
    match which {
        FormulaCommand::WrI { a, b, ks } => product(&mut r, ProductKind::WrI, &[a.clone(), b.clone()], *ks)?,
        FormulaCommand::WrP { a, b, ks } => product(&mut r, ProductKind::WrP, &[a.clone(), b.clone()], *ks)?,
        FormulaCommand::ProdI { groups, ks } => product(&mut r, ProductKind::ProdI, groups, *ks)?,
        FormulaCommand::ProdP { groups, ks } => product(&mut r, ProductKind::ProdP, groups, *ks)?,
        FormulaCommand::Sharp { n, t, ks } => {
            r.input("construction", "sharp");
            r.input("n", *n);
            r.input("t", *t);
            for k in selected(*ks, *n as usize)? {
                r.indexed("delta", k, &sharply_transitive_delta_k(*n, *t, k as u64)?);
            }
        }
        FormulaCommand::CyclicPower { delta, n } => {
            r.input("construction", "cyclic-power");
            r.input("delta", delta.as_str());
            r.input("n", *n);
            if *n > ctx.limits.degree_cap as u64 * 100 {
                return Err(Error::DegreeOverflow {
                    what: "cyclic top".into(),
                    degree: n.to_string(),
                    cap: ctx.limits.degree_cap * 100,
                });
            }
            r.value("delta", &power_delta_cyclic(&rational(delta)?, *n)?);
        }
        FormulaCommand::FullSymmetricPower { delta, n } => {
            r.input("construction", "full-symmetric-power");
            r.input("delta", delta.as_str());
            r.input("n", *n);
            let d = rational(delta)?;
            let value = power_delta_full_symmetric(&d, *n);
            let bound = power_symmetric_lower_bound(&d, *n);
            r.value("delta", &value);
            r.float("lower_bound", bound);
            r.text("bound_holds", if to_f64(&value) >= bound - 1e-12 { "PASS" } else { "FAIL" });
        }
        FormulaCommand::ImprimitiveSymmetric { delta, n } => {
            r.input("construction", "imprimitive-symmetric");
            r.input("delta", delta.as_str());
            r.input("n", *n);
            let d = rational(delta)?;
            let value = imprimitive_symmetric_delta(*n, &d);
            r.value("delta", &value);
            r.float("limit", (to_f64(&d) - 1.0).exp());
        }
        FormulaCommand::Agl1 { q } => {
            r.input("construction", "agl1");
            r.input("q", *q);
            let p = agl1_fix_pgf(*q)?;
            for (k, c) in p.coeffs().iter().enumerate() {
                if !num_traits::Zero::is_zero(c) {
                    r.indexed("coefficient", k, c);
                }
            }
            r.text("P_C", p.to_string());
        }
        FormulaCommand::Chain { delta, q, r: steps } => {
            r.input("construction", "imprimitive-chain");
            r.input("delta", delta.as_str());
            r.input("q", *q);
            r.input("r", *steps as u64);
            let growth = (*q as f64).ln() * *steps as f64;
            if growth > 20.0 {
                return Err(Error::InvalidArgument(format!(
                    "exact chain values have about q^r digits; q={q}, r={steps} is too large"
                )));
            }
            for (i, c) in imprimitive_chain(&rational(delta)?, *q, *steps)?.iter().enumerate() {
                r.indexed("c", i, c);
            }
        }
        FormulaCommand::Step { delta, n, q } => {
            r.input("construction", "step");
            r.input("delta", delta.as_str());
            r.input("n", *n);
            r.input("q", *q);
            r.value("D", &step_size(&rational(delta)?, *n, *q)?);
        }
    }
    Ok(r)
}

fn run_verify(kind: ProductKind, names: &[String], ks: KSelect, ctx: &Ctx) -> Result<Report> {
    let mut r = Report::new("verify");
    r.input("construction", kind.name());
    r.input("groups", names.to_vec());
    let groups = names.iter().map(|n| group(n, ctx)).collect::<Result<Vec<_>>>()?;
    let formula = formula_spectrum(kind, &groups, ctx)?;
    let product = build_product(kind, &groups, ctx)?;
    let oracle = fix_spectrum(&product, ctx.cap())?.deltas();
    let mut all_equal = true;
    for k in selected(ks, formula.len() - 1)? {
        let equal = formula[k] == oracle[k];
        all_equal &= equal;
        r.indexed("formula", k, &formula[k]);
        r.indexed("oracle", k, &oracle[k]);
        r.indexed_text("check", k, if equal { "EQUAL" } else { "DIFFER" });
    }
    r.status = if all_equal { "EQUAL" } else { "DIFFER" }.into();
    Ok(r)
}

fn run_bounds(text: &str, sandwich: Option<&str>, ctx: &Ctx) -> Result<Report> {
    let mut r = Report::new("bounds");
    r.input("expr", text);
    let expr = GroupExpr::parse(text)?;
    let g = elaborate(&expr, &ctx.limits)?.into_group()?;
    let spectrum = fix_spectrum(&g, ctx.cap())?;
    let delta = spectrum.delta();
    r.value("delta", &delta);
    let mut pass = true;

    if g.is_transitive() {
        let rank = rank_from_spectrum(&spectrum).to_integer();
        let rank = u64::try_from(rank).map_err(|_| Error::InvalidArgument("rank out of range".into()))?;
        r.value("rank", &integer(rank));
        if rank >= 2 {
            let b = rank_bounds(rank, g.degree() as u64)?;
            let ok = b.contains(&delta);
            pass &= ok;
            r.value("rank_lower", &b.lower);
            r.value("rank_upper", &b.upper);
            r.text("rank_bounds", if ok { "PASS" } else { "FAIL" });
        } else {
            r.text("rank_bounds", "degree 1, no bounds");
        }
    } else if sandwich.is_none() {
        return Err(Error::NotTransitive);
    } else {
        r.text("rank_bounds", "not transitive");
    }

    if let Some(spec) = sandwich {
        let c_text = spec
            .strip_prefix("C=")
            .ok_or_else(|| Error::InvalidArgument(format!("--sandwich expects C=EXPR, got {spec}")))?;
        r.input("sandwich", spec);
        let (a, b, even) = match &expr {
            GroupExpr::WrP(a, b) => (
                elaborate(a, &ctx.limits)?.into_group()?,
                elaborate(b, &ctx.limits)?.into_group()?,
                false,
            ),
            GroupExpr::EvenWr(m, b, Action::Power) => (symmetric(*m)?, elaborate(b, &ctx.limits)?.into_group()?, true),
            GroupExpr::EvenWr(_, _, Action::Imprimitive) => {
                return Err(Error::InvalidArgument("sandwich bounds need the power action".into()));
            }
            _ => {
                return Err(Error::InvalidArgument(
                    "sandwich bounds need an expression of the form wrP(A,B) or evenWr(m,B,power)".into(),
                ));
            }
        };
        let c = group(c_text, ctx)?;
        if even && c.generators().iter().any(|x| x.sign() < 0) {
            return Err(Error::InvalidArgument(format!("{c_text} is not contained in the alternating group")));
        }
        let (lo, hi) = coset_delta_extrema(&a, &c, ctx.cap())?;
        let bounds = sandwich_bounds(&lo, &hi, &cycle_count_vector(&b, ctx.cap())?)?;
        let ok = bounds.contains(&delta);
        pass &= ok;
        r.value("delta_L", &lo);
        r.value("delta_U", &hi);
        r.value("sandwich_lower", &bounds.lower);
        r.value("sandwich_upper", &bounds.upper);
        r.text("sandwich", if ok { "PASS" } else { "FAIL" });
    }
    r.status = if pass { "PASS" } else { "FAIL" }.into();
    Ok(r)
}

fn witness_rows(r: &mut Report, w: &DensityWitness) {
    r.text("family", w.family.name());
    match &w.family {
        Family::ImprimitiveAglChain { q, steps } => {
            r.value("q", &integer(*q));
            r.value("steps", &integer(*steps));
        }
        Family::CyclicPowerChain { primes } => {
            let list: Vec<String> = primes.iter().map(|p| p.to_string()).collect();
            r.text("primes", list.join(","));
            r.value("n", &big(&prime_product(primes)));
        }
        Family::InvertedPowerMap { name, delta_a } => {
            r.text("base", name.as_str());
            r.value("delta_A", delta_a);
        }
    }
    match w.value.exact_value() {
        Some(v) => r.value("value", v),
        None => {
            r.value("value_lo", &w.value.lo);
            r.value("value_hi", &w.value.hi);
        }
    }
    r.value("target", &w.target);
    r.value("epsilon", &w.epsilon);
    r.text("contract", if w.satisfies_contract() { "PASS" } else { "FAIL" });
}

/// Builds the witness group; `None` when it has no explicit model here.
fn witness_group(w: &DensityWitness, base: Option<&PermGroup>, top: Option<&PermGroup>, ctx: &Ctx) -> Option<Result<PermGroup>> {
    match &w.family {
        Family::ImprimitiveAglChain { q, steps } => {
            let base = base?;
            Some((|| {
                let c = agl1(*q)?;
                let mut g = base.clone();
                for _ in 0..*steps {
                    g = wreath_imprimitive(&g, &c, &ctx.limits)?;
                }
                Ok(g)
            })())
        }
        Family::CyclicPowerChain { primes } => {
            let base = base?;
            Some((|| {
                let n = usize::try_from(prime_product(primes))
                    .map_err(|_| Error::InvalidArgument("cyclic top too large".into()))?;
                wreath_power(base, &cyclic(n)?, &ctx.limits)
            })())
        }
        Family::InvertedPowerMap { name, .. } => {
            let top = top?;
            Some(group(name, ctx).and_then(|a| wreath_power(&a, top, &ctx.limits)))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_density(
    mode: DensityMode,
    delta_a: Option<&str>,
    base: Option<&str>,
    top: Option<&str>,
    target: &str,
    eps: &str,
    verify: bool,
    ctx: &Ctx,
) -> Result<Report> {
    let mut r = Report::new("density");
    r.input("mode", format!("{mode:?}").to_lowercase());
    r.input("target", target);
    r.input("eps", eps);
    let target = rational(target)?;
    let eps = rational(eps)?;
    let base_group = base.map(|b| group(b, ctx)).transpose()?;
    let top_group = top.map(|t| group(t, ctx)).transpose()?;

    let witness = match mode {
        DensityMode::Imprimitive | DensityMode::Cyclic => {
            let d = match (delta_a, &base_group) {
                (Some(d), _) => {
                    r.input("deltaA", d);
                    rational(d)?
                }
                (None, Some(g)) => {
                    r.input("base", base.unwrap_or_default());
                    fix_spectrum(g, ctx.cap())?.delta()
                }
                (None, None) => return Err(Error::InvalidArgument("give --deltaA or --base".into())),
            };
            if mode == DensityMode::Imprimitive {
                density_search_imprimitive(&d, &target, &eps)?
            } else {
                density_search_power_regular(&d, &target, &eps)?
            }
        }
        DensityMode::Primitive => {
            let b = top_group
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("the primitive search needs --top".into()))?;
            r.input("top", top.unwrap_or_default());
            match density_search_power_primitive(b, &target, &eps, &default_catalog(), ctx.cap())? {
                PrimitiveSearch::Found(w) => w,
                PrimitiveSearch::Infeasible {
                    x_star,
                    nearest,
                    nearest_value,
                    reason,
                } => {
                    r.value("x_star", &x_star);
                    r.text("nearest", nearest);
                    r.value("nearest_value", &nearest_value);
                    r.value("target", &target);
                    r.value("epsilon", &eps);
                    r.text("reason", reason);
                    r.status = "infeasible".into();
                    return Ok(r);
                }
            }
        }
    };
    witness_rows(&mut r, &witness);
    let mut pass = witness.satisfies_contract();

    if verify {
        match witness_group(&witness, base_group.as_ref(), top_group.as_ref(), ctx) {
            None => r.text("oracle", "skipped: no explicit base group (use --base)"),
            Some(Err(e)) => r.text("oracle", format!("skipped: {e}")),
            Some(Ok(g)) => match fix_spectrum(&g, ctx.cap()) {
                Err(e) => r.text("oracle", format!("skipped: {e}")),
                Ok(s) => {
                    let d = s.delta();
                    let ok = witness.value.lo <= d && d <= witness.value.hi;
                    pass &= ok;
                    r.value("oracle_delta", &d);
                    r.text("oracle", if ok { "PASS" } else { "FAIL" });
                }
            },
        }
    }
    if !pass {
        r.status = "FAIL".into();
    }
    Ok(r)
}

fn run_limits(n: u64, delta: &str) -> Result<Report> {
    let mut r = Report::new("limits");
    r.input("n", n);
    r.input("delta", delta);
    let d = rational(delta)?;
    if d.is_negative() || d > BigRational::one() {
        return Err(Error::InvalidArgument(format!("delta {d} outside [0, 1]")));
    }
    let inv_e = (-1.0f64).exp();
    let dn = d_seq(n);
    r.value("delta_S_n", &dn);
    r.float("gap_to_inverse_e", (to_f64(&dn) - inv_e).abs());
    let doubly = imprimitive_symmetric_delta(n, &dn);
    r.value("delta_S_n_wrI_S_n", &doubly);
    r.float("gap_to_exp_inverse_e_minus_1", (to_f64(&doubly) - (inv_e - 1.0).exp()).abs());
    let full = power_delta_full_symmetric(&d, n);
    let bound = power_symmetric_lower_bound(&d, n);
    r.value("delta_A_wrP_S_n", &full);
    r.float("lower_bound", bound);
    r.text("lower_bound_holds", if to_f64(&full) >= bound - 1e-12 { "PASS" } else { "FAIL" });
    let single = imprimitive_symmetric_delta(n, &d);
    r.value("delta_A_wrI_S_n", &single);
    r.float("gap_to_exp_delta_minus_1", (to_f64(&single) - (to_f64(&d) - 1.0).exp()).abs());
    Ok(r)
}

fn dispatch(cli: &Cli, ctx: &Ctx) -> Result<Report> {
    match &cli.command {
        Command::Stats { expr, rank, cycle_index } => run_stats(expr, *rank, *cycle_index, ctx),
        Command::Index { expr } => run_index(expr, ctx),
        Command::Formula { which } => run_formula(which, ctx),
        Command::Verify { kind, groups, ks } => run_verify(*kind, groups, *ks, ctx),
        Command::Bounds { expr, sandwich } => run_bounds(expr, sandwich.as_deref(), ctx),
        Command::Density {
            mode,
            delta_a,
            base,
            top,
            target,
            eps,
            verify_oracle,
        } => run_density(
            *mode,
            delta_a.as_deref(),
            base.as_deref(),
            top.as_deref(),
            target,
            eps,
            *verify_oracle,
            ctx,
        ),
        Command::Limits { n, delta } => run_limits(*n, delta),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Stats { .. } => "stats",
        Command::Index { .. } => "index",
        Command::Formula { .. } => "formula",
        Command::Verify { .. } => "verify",
        Command::Bounds { .. } => "bounds",
        Command::Density { .. } => "density",
        Command::Limits { .. } => "limits",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let format = if cli.json {
        Format::Json
    } else if cli.csv {
        Format::Csv
    } else {
        Format::Text
    };
    let ctx = Ctx {
        limits: Limits::default()
            .with_enumeration_cap(cli.cap)
            .with_degree_cap(cli.degree_cap),
    };
    let (report, code) = match dispatch(&cli, &ctx) {
        Ok(r) => {
            let code = status_code(&r.status);
            (r, code)
        }
        Err(e) => {
            let mut r = Report::new(command_name(&cli.command));
            r.status = "error".into();
            r.error = Some(e.to_string());
            (r, exit_code(&e))
        }
    };
    if format == Format::Text && report.status == "error" {
        eprintln!("error: {}", report.error.as_deref().unwrap_or(""));
    } else if let Err(e) = report.emit(format) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
