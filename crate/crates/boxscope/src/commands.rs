//! One function per subcommand. Each writes its result table to `ctx.out`
//! in the selected format and notes to `ctx.err`.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use boxscope_core::arith::{factorize, mult_order, Factorization};
use boxscope_core::boxspace::{covering_params, dalpha_row, make_sequence, verify_covering, Alpha, SequenceKind};
use boxscope_core::bs::{BsGroup, Word};
use boxscope_core::cayley::{build_graph, DiameterEnvelope};
use boxscope_core::density::{
    analytic_density_partial, euler_product_partial, natural_density_partial, scan_row, smooth_numbers, summarize_scan,
    totient_ratio_bound, validate_scan_primes, PrimeSet, Rational,
};
use boxscope_core::oddorder::{odd_order_moduli, UnitSpec};
use boxscope_core::quotient::build_quotient;
use boxscope_core::real::{format_f64, Real};
use boxscope_core::Error;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::acceptance;
use crate::cache::{measure, Cache, ScanRecord};
use crate::cli::Family;
use crate::output::{two_decimals, Cell, Format, Table};
use crate::pool::map_ordered;

pub type Result<T = ()> = anyhow::Result<T>;

pub struct Ctx<'a> {
    pub format: Format,
    pub jobs: usize,
    pub max_vertices: u64,
    pub cache: Option<Cache>,
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn table(&mut self, table: &Table) -> Result {
        table.write(self.format, &mut self.out)?;
        Ok(())
    }

    fn human(&self) -> bool {
        self.format == Format::Human
    }
}

fn decimal(r: &Rational) -> Cell {
    Cell::Real(Real::ratio(r.numer(), r.denom()).to_string())
}

fn small_m(m: &BigUint) -> Result<u64> {
    Ok(m.to_u64()
        .ok_or_else(|| Error::Validation(format!("m = {m} must fit in 64 bits for graph work")))?)
}

pub fn order(ctx: &mut Ctx, m: &BigUint, n: &BigUint) -> Result {
    let cert = mult_order(m, n)?;
    let mu = cert.mu().ok();
    if ctx.human() {
        let mu_text = match &mu {
            Some(mu) => mu.to_string(),
            None => format!("(too large; mu = {} mod {n})", cert.mu_residue()),
        };
        writeln!(ctx.out, "ord_{m}({n}) = {}, mu = {mu_text}", cert.order())?;
        return Ok(());
    }
    let mut t = Table::new(&["m", "N", "ord", "order_factors", "mu", "mu_mod_N"]);
    t.push(vec![
        Cell::int(m.clone()),
        Cell::int(n.clone()),
        Cell::int(cert.order().clone()),
        Cell::Text(cert.order_factorization().to_string()),
        Cell::opt(mu, Cell::Int),
        Cell::int(cert.mu_residue().clone()),
    ]);
    ctx.table(&t)
}

pub fn quotient(ctx: &mut Ctx, m: &BigUint, n: &BigUint) -> Result {
    let q = build_quotient(m, n)?;
    if ctx.human() {
        writeln!(ctx.out, "G_{m}/G_{m}({n}) = {}, |G| = {}", q.label(), q.size())?;
        return Ok(());
    }
    let mut t = Table::new(&["m", "N", "ord", "group", "group_size", "m_inverse"]);
    t.push(vec![
        Cell::int(m.clone()),
        Cell::int(n.clone()),
        Cell::int(q.torsion().clone()),
        Cell::Text(q.label()),
        Cell::Int(q.size()),
        Cell::int(q.m_inv().clone()),
    ]);
    ctx.table(&t)
}

/// A cached record for `(m, N)` or a fresh measurement appended to the cache.
fn lookup_or_measure(ctx: &mut Ctx, m: &BigUint, n: &BigUint) -> Result<(ScanRecord, bool)> {
    let cap = ctx.max_vertices;
    if let Some(r) = ctx.cache.as_ref().and_then(|c| c.lookup(m, n, cap)) {
        return Ok((r.clone(), true));
    }
    let record = measure(m, n, cap)?;
    if let Some(cache) = ctx.cache.as_mut() {
        cache.append(record.clone())?;
    }
    Ok((record, false))
}

pub fn diameter(ctx: &mut Ctx, m: &BigUint, n: &BigUint) -> Result {
    let m_word = small_m(m)?;
    let (record, cached) = lookup_or_measure(ctx, m, n)?;
    let Some(diam) = record.diameter else {
        return Err(Error::ResourceCap {
            what: "Cayley graph",
            required: format!("{} vertices (raise --max-vertices)", record.group_size),
            cap: ctx.max_vertices,
        }
        .into());
    };
    let env = DiameterEnvelope::new(m_word, &record.ord);
    if ctx.human() {
        writeln!(
            ctx.out,
            "diameter = {diam}, |G| = {}, bounds [{}, {}]",
            record.group_size,
            two_decimals(env.lower()),
            two_decimals(env.upper)
        )?;
        if cached {
            writeln!(ctx.err, "note: diameter read from cache")?;
        }
        return Ok(());
    }
    let mut t = Table::new(&["m", "N", "ord", "group_size", "diameter", "lower_bound", "upper_bound"]);
    t.push(vec![
        Cell::int(m.clone()),
        Cell::int(n.clone()),
        Cell::Int(record.ord.clone()),
        Cell::Int(record.group_size.clone()),
        Cell::int(diam),
        Cell::Real(format_f64(env.lower())),
        Cell::Real(format_f64(env.upper)),
    ]);
    ctx.table(&t)
}

pub fn word(ctx: &mut Ctx, m: &BigUint, text: &str) -> Result {
    let g = BsGroup::new(m)?;
    let w: Word = text.parse()?;
    let x = g.eval_word(&w);
    let nf = g.normal_form(&x);
    let synth = g.synthesize_word(&nf);
    let bound = g.synthesis_length_bound(&nf);
    let envelope = g.length_bounds(&nf, None);
    let upper = envelope.upper.min(synth.len() as f64);
    if ctx.human() {
        writeln!(ctx.out, "element      {}", g.display(&x))?;
        writeln!(ctx.out, "normal form  t^-{} a^{} t^{}", nf.i, nf.ell, nf.j)?;
        writeln!(
            ctx.out,
            "synthesized  {} (length {}, certified <= {})",
            synth,
            synth.len(),
            format_f64(bound)
        )?;
        let relation = if envelope.exact { "=" } else { "<=" };
        writeln!(ctx.out, "word length  {relation} {}", format_f64(upper))?;
        return Ok(());
    }
    let mut t = Table::new(&[
        "word",
        "k",
        "r",
        "i",
        "ell",
        "j",
        "synthesized",
        "synthesized_length",
        "synthesis_bound",
        "length_upper",
    ]);
    t.push(vec![
        Cell::Text(w.to_string()),
        Cell::Text(x.k.to_string()),
        Cell::Text(x.r.display_with(g.m())),
        Cell::int(nf.i),
        Cell::Text(nf.ell.to_string()),
        Cell::int(nf.j),
        Cell::Text(synth.to_string()),
        Cell::int(synth.len() as u64),
        Cell::Real(format_f64(bound)),
        Cell::Real(format_f64(upper)),
    ]);
    ctx.table(&t)
}

const RECORD_COLUMNS: [&str; 7] = [
    "m",
    "N",
    "ord",
    "group_size",
    "diameter",
    "wall_time_ms",
    "tool_version",
];

fn record_row(r: &ScanRecord) -> Vec<Cell> {
    vec![
        Cell::Int(r.m.clone()),
        Cell::Int(r.n.clone()),
        Cell::Int(r.ord.clone()),
        Cell::Int(r.group_size.clone()),
        Cell::opt(r.diameter, Cell::int),
        Cell::int(r.wall_time_ms),
        Cell::Text(r.tool_version.clone()),
    ]
}

pub fn sweep(ctx: &mut Ctx, m: &BigUint, n_min: u64, n_max: u64) -> Result {
    if n_min == 0 || n_min > n_max {
        return Err(Error::Validation(format!("need 1 <= n-min <= n-max, got {n_min}..{n_max}")).into());
    }
    BsGroup::new(m)?;
    let cap = ctx.max_vertices;
    let moduli: Vec<BigUint> = (n_min..=n_max)
        .map(BigUint::from)
        .filter(|n| n.gcd(m).is_one())
        .collect();
    let todo: Vec<BigUint> = moduli
        .iter()
        .filter(|n| ctx.cache.as_ref().and_then(|c| c.lookup(m, n, cap)).is_none())
        .cloned()
        .collect();
    let hits = moduli.len() - todo.len();

    let mut write_error = None;
    let cache = &mut ctx.cache;
    let fresh = map_ordered(
        &todo,
        ctx.jobs,
        |n| measure(m, n, cap),
        |_, r| {
            if let (Ok(record), Some(cache), None) = (r, cache.as_mut(), &write_error) {
                write_error = cache.append(record.clone()).err();
            }
        },
    );
    if let Some(e) = write_error {
        return Err(e).context("appending to the cache");
    }
    let mut fresh = fresh.into_iter();
    let mut t = Table::new(&RECORD_COLUMNS);
    for n in &moduli {
        let cached = ctx
            .cache
            .as_ref()
            .and_then(|c| c.lookup(m, n, cap))
            .filter(|r| !todo.contains(&r.n));
        let record = match cached {
            Some(r) => r.clone(),
            None => fresh.next().expect("one result per uncached modulus")?,
        };
        t.push(record_row(&record));
    }
    ctx.table(&t)?;
    if ctx.cache.is_some() {
        writeln!(ctx.err, "note: {hits} of {} moduli served from cache", moduli.len())?;
    }
    Ok(())
}

pub fn scan(
    ctx: &mut Ctx,
    m: &BigUint,
    family: Family,
    alpha: Alpha,
    kmax: u32,
    diameters: bool,
    terms: Vec<BigUint>,
) -> Result {
    let kind = match family {
        Family::Geometric => SequenceKind::Geometric,
        Family::DoublyExponential => SequenceKind::DoublyExponential,
        Family::Explicit => SequenceKind::Explicit(terms.clone()),
    };
    if family == Family::Explicit && terms.is_empty() {
        return Err(Error::Validation("the explicit family needs --terms".into()).into());
    }
    if family != Family::Explicit && !terms.is_empty() {
        return Err(Error::Validation("--terms applies only to the explicit family".into()).into());
    }
    let seq = make_sequence(m, kind)?;
    let ks: Vec<u32> = (1..=kmax)
        .take_while(|k| seq.term(*k).is_some() || seq.term_bits(*k) > 0)
        .collect();
    let cap = diameters.then_some(ctx.max_vertices);
    let rows = map_ordered(&ks, ctx.jobs, |k| dalpha_row(&seq, alpha, *k, cap), |_, _| {});

    let mut t = Table::new(&[
        "k",
        "N",
        "ord",
        "group_size",
        "ratio_order",
        "diameter",
        "ratio_diam",
        "alpha_hat",
    ]);
    for row in rows {
        let row = row?;
        t.push(vec![
            Cell::int(row.k),
            Cell::Int(row.n),
            Cell::Int(row.order),
            Cell::Int(row.group_size),
            Cell::Real(row.ratio_order.to_string()),
            Cell::opt(row.diameter, Cell::int),
            Cell::opt(row.ratio_diam, |r| Cell::Real(r.to_string())),
            Cell::opt(row.alpha_hat, |a| Cell::Real(format_f64(a))),
        ]);
    }
    if ctx.human() {
        writeln!(
            ctx.out,
            "# m = {m}, {} chain, alpha = {alpha}; ratio_order = ord/N^(alpha/(1-alpha)), ratio_diam = diam/|G|^alpha, alpha_hat = ln(diam)/ln|G| (empirical estimator)",
            seq.kind().name()
        )?;
    }
    ctx.table(&t)
}

pub fn covering(ctx: &mut Ctx, m: &BigUint, n: &BigUint, d: u32, alpha: Option<Alpha>) -> Result {
    let report = verify_covering(m, n, d, ctx.max_vertices)?;
    let inequality = alpha
        .map(|a| covering_params(m, n, d, Some(a)).map(|p| p.inequality_holds))
        .transpose()?
        .flatten();
    let mut t = Table::new(&[
        "m",
        "N",
        "D",
        "n",
        "quotient_size",
        "ord",
        "kernel_size",
        "expected_kernel_size",
        "homomorphism",
        "projection_surjective",
        "cyclic_image",
        "diameter",
        "diameter_ok",
        "alpha_inequality",
        "passed",
    ]);
    t.push(vec![
        Cell::int(m.clone()),
        Cell::int(n.clone()),
        Cell::int(d),
        Cell::Int(report.params.n.clone()),
        Cell::Int(report.params.quotient_size.clone()),
        Cell::Int(report.order.clone()),
        Cell::opt(report.kernel_size.clone(), Cell::Int),
        Cell::Int(report.expected_kernel_size()),
        Cell::opt(report.homomorphism, Cell::Bool),
        Cell::opt(report.projection_surjective, Cell::Bool),
        Cell::opt(report.cyclic_image, Cell::Bool),
        Cell::opt(report.diameter, Cell::int),
        Cell::opt(report.diameter_ok, Cell::Bool),
        Cell::opt(inequality, Cell::Bool),
        Cell::Bool(report.passed()),
    ]);
    if ctx.human() {
        for (name, cell) in t.columns.iter().zip(&t.rows[0]) {
            let text = cell.text();
            writeln!(ctx.out, "{name:<22} {}", if text.is_empty() { "-" } else { &text })?;
        }
    } else {
        ctx.table(&t)?;
    }
    if report.skipped() {
        writeln!(
            ctx.err,
            "note: quotient exceeds --max-vertices; exhaustive checks skipped"
        )?;
    } else if !report.passed() {
        return Err(Error::Invariant(format!("covering checks failed for m = {m}, N = {n}, D = {d}")).into());
    }
    Ok(())
}

pub fn density_natural(ctx: &mut Ctx, set: &PrimeSet, x: u64) -> Result {
    let d = natural_density_partial(set, x)?;
    let mut t = Table::new(&["set", "x", "density", "decimal"]);
    t.push(vec![
        Cell::Text(set.to_string()),
        Cell::int(x),
        Cell::Fraction(d.to_string()),
        decimal(&d),
    ]);
    ctx.table(&t)
}

pub fn density_analytic(ctx: &mut Ctx, set: &PrimeSet, s: f64, cutoff: u64) -> Result {
    let d = analytic_density_partial(set, s, cutoff)?;
    let mut t = Table::new(&["set", "s", "cutoff", "density"]);
    t.push(vec![
        Cell::Text(set.to_string()),
        Cell::Real(format_f64(s)),
        Cell::int(cutoff),
        Cell::Real(format_f64(d)),
    ]);
    ctx.table(&t)
}

pub fn density_euler(ctx: &mut Ctx, set: &PrimeSet, count: usize) -> Result {
    let p = euler_product_partial(set, count)?;
    if p.short {
        writeln!(
            ctx.err,
            "warning: {set} has only {} member(s) available; product is over all of them",
            p.primes.len()
        )?;
    }
    let mut t = Table::new(&["set", "count", "primes_used", "product", "decimal", "short"]);
    t.push(vec![
        Cell::Text(set.to_string()),
        Cell::int(count as u64),
        Cell::int(p.primes.len() as u64),
        Cell::Fraction(p.value.to_string()),
        decimal(&p.value),
        Cell::Bool(p.short),
    ]);
    ctx.table(&t)
}

pub fn ratio_scan(ctx: &mut Ctx, m: &BigUint, primes: &[u64], bound: &BigUint) -> Result {
    let primes = validate_scan_primes(m, primes)?;
    if bound < &BigUint::one() {
        return Err(Error::Domain("bound must be >= 1".into()).into());
    }
    let moduli = smooth_numbers(&primes, bound)?;
    let rows = map_ordered(&moduli, ctx.jobs, |(n, f)| scan_row(m, n, f), |_, _| {});
    let rows = rows.into_iter().collect::<std::result::Result<Vec<_>, _>>()?;
    let scan = summarize_scan(rows).ok_or_else(|| Error::Invariant("scan produced no rows".into()))?;
    let mut t = Table::new(&["N", "ord", "ratio", "decimal"]);
    for r in &scan.rows {
        t.push(vec![
            Cell::Int(r.n.clone()),
            Cell::Int(r.order.clone()),
            Cell::Fraction(r.ratio.to_string()),
            decimal(&r.ratio),
        ]);
    }
    ctx.table(&t)?;
    if ctx.human() {
        writeln!(
            ctx.out,
            "min ord_{m}(N)/N = {} ({}) at N = {}, over {} P-smooth N <= {bound}",
            scan.min_ratio,
            decimal(&scan.min_ratio).text(),
            scan.argmin,
            scan.rows.len()
        )?;
    }
    Ok(())
}

pub fn totient(ctx: &mut Ctx, n: &BigUint) -> Result {
    let f = if n.is_one() {
        Factorization::one()
    } else {
        factorize(n)?
    };
    let ratio = totient_ratio_bound(&f);
    let mut t = Table::new(&["N", "factorization", "phi", "ratio", "decimal"]);
    t.push(vec![
        Cell::int(n.clone()),
        Cell::Text(if f.is_one() { "1".into() } else { f.to_string() }),
        Cell::Int(f.totient()),
        Cell::Fraction(ratio.to_string()),
        decimal(&ratio),
    ]);
    ctx.table(&t)
}

pub fn oddorder(ctx: &mut Ctx, a1: &BigInt, a2: &BigInt, m: &BigUint, count: usize, kmax: u64) -> Result {
    BsGroup::new(m)?;
    let s = UnitSpec::from_signed(a1, a2, m)?;
    if s.inverted() {
        writeln!(
            ctx.err,
            "note: searching with s = {s}, the inverse of the given unit (same order everywhere)"
        )?;
    }
    let found = odd_order_moduli(&s, m, count, kmax)?;
    if ctx.human() {
        for r in &found {
            let k = r.k.map_or_else(|| "-".to_string(), |k| k.to_string());
            writeln!(ctx.out, "{k} {} {}", r.n, r.order)?;
        }
        return Ok(());
    }
    let mut t = Table::new(&["k", "N", "order"]);
    for r in found {
        t.push(vec![Cell::opt(r.k, Cell::int), Cell::Int(r.n), Cell::Int(r.order)]);
    }
    ctx.table(&t)
}

/// `fmt::Write` over an `io::Write`, keeping the first IO error.
struct FmtAdapter<W: Write> {
    inner: W,
    error: Option<io::Error>,
}

impl<W: Write> fmt::Write for FmtAdapter<W> {
    fn write_str(&mut self, s: &str) -> fmt::Result {
        self.inner.write_all(s.as_bytes()).map_err(|e| {
            self.error = Some(e);
            fmt::Error
        })
    }
}

fn write_dot<W: Write>(graph: &boxscope_core::cayley::CayleyGraph, sink: W) -> Result {
    let mut adapter = FmtAdapter {
        inner: sink,
        error: None,
    };
    if graph.export_dot(&mut adapter).is_err() {
        return Err(adapter
            .error
            .map_or_else(|| anyhow::anyhow!("DOT formatting failed"), Into::into));
    }
    adapter.inner.flush()?;
    Ok(())
}

pub fn export_dot(ctx: &mut Ctx, m: &BigUint, n: &BigUint, path: Option<&Path>) -> Result {
    let q = build_quotient(m, n)?;
    let graph = build_graph(&q, ctx.max_vertices)?;
    match path {
        Some(p) => {
            let file = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            write_dot(&graph, BufWriter::new(file))?;
            writeln!(
                ctx.err,
                "wrote {} vertices and {} edges to {}",
                graph.vertex_count(),
                graph.edge_count(),
                p.display()
            )?;
        }
        None => write_dot(&graph, BufWriter::new(&mut ctx.out))?,
    }
    Ok(())
}

pub fn verify(ctx: &mut Ctx, criteria: &[u8]) -> Result {
    let ids: Vec<u8> = if criteria.is_empty() {
        acceptance::CRITERIA.iter().map(|(id, _)| *id).collect()
    } else {
        criteria.to_vec()
    };
    if let Some(bad) = ids.iter().find(|id| !(1..=11).contains(*id)) {
        return Err(Error::Validation(format!("no acceptance criterion #{bad}; valid ids are 1 to 11")).into());
    }
    let columns = [
        "id",
        "title",
        "passed",
        "checks_ok",
        "detail",
        "elapsed_ms",
        "budget_ms",
    ];
    let mut t = Table::new(&columns);
    let mut failed = Vec::new();
    for id in ids {
        let o = acceptance::run(id, ctx.jobs).expect("valid id");
        if !o.passed() {
            failed.push(id);
        }
        let row = vec![
            Cell::int(o.id),
            Cell::Text(o.title.to_string()),
            Cell::Bool(o.passed()),
            Cell::Bool(o.checks_ok),
            Cell::Text(o.detail.clone()),
            Cell::int(o.elapsed.as_millis() as u64),
            Cell::opt(o.budget, |b| Cell::int(b.as_millis() as u64)),
        ];
        match ctx.format {
            Format::Human => writeln!(ctx.out, "{o}")?,
            Format::Json => crate::output::write_json_row(&columns, &row, &mut ctx.out)?,
            Format::Csv => t.push(row),
        }
        ctx.out.flush()?;
    }
    if ctx.format == Format::Csv {
        ctx.table(&t)?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::Invariant(format!("acceptance criteria failed: {failed:?}")).into())
    }
}
