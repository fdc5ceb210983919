//! One function per subcommand. Each returns its record table plus a few
//! summary lines for stderr.

use num_bigint::BigUint;
use unitri::comparison::{class_coefficients, comparison_constant, main_bound_curve, spectral_comparison_check};
use unitri::group::{eval_word, group_order, strict_len};
use unitri::paths::{word_class_element, word_second_diag, word_stats};
use unitri::spectral::{k_spectrum, product_spectrum, transition_spectrum};
use unitri::superclass::{
    conjugacy_class_elements, degree_identity_sum, enumerate_labels_checked, label_count, superclass_partition,
};
use unitri::supercharacter::upper_bound_curve;
use unitri::walk::{Walk, WalkKind, WalkSpec};
use unitri::{Limits, PrimeModulus, UniTriMatrix};

use crate::config::{Command, RunConfig};
use crate::error::CliError;
use crate::table::{Cell, Table};

/// What a command produced.
#[derive(Debug)]
pub struct Outcome {
    pub table: Table,
    pub notes: Vec<String>,
    /// Invariant violations; a non-empty list means exit code 3.
    pub failures: Vec<String>,
}

impl Outcome {
    fn ok(table: Table, notes: Vec<String>) -> Self {
        Self {
            table,
            notes,
            failures: Vec::new(),
        }
    }
}

pub fn limits(cfg: &RunConfig) -> Result<Limits, CliError> {
    let mut l = Limits::from_env()?;
    if let Some(b) = cfg.budget_states {
        l.max_states = b;
    }
    Ok(l)
}

fn modulus(cfg: &RunConfig) -> Result<PrimeModulus, CliError> {
    Ok(PrimeModulus::new(cfg.p)?)
}

fn dimension(cfg: &RunConfig) -> Result<usize, CliError> {
    if cfg.n < 2 {
        return Err(CliError::Usage(format!("--n {} is below 2", cfg.n)));
    }
    Ok(cfg.n)
}

fn walk_spec(cfg: &RunConfig) -> Result<WalkSpec, CliError> {
    let p = modulus(cfg)?;
    Ok(match cfg.walk {
        WalkKind::P => WalkSpec::p(dimension(cfg)?, p),
        WalkKind::Q => WalkSpec::q(dimension(cfg)?, p),
        WalkKind::K => WalkSpec::k(p),
        WalkKind::ProductQ => {
            if cfg.n == 0 {
                return Err(CliError::Usage("--n must be positive".into()));
            }
            WalkSpec::product_q(cfg.n, p)
        }
    })
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        Command::TvCurve => tv_curve(cfg),
        Command::BoundCurve => bound_curve(cfg),
        Command::Spectrum => spectrum(cfg),
        Command::Superclasses => superclasses(cfg),
        Command::Words => words(cfg),
        Command::Compare => compare(cfg),
        Command::Verify => verify(cfg),
    }
}

/// `(t, tv, l2sq)` for each requested time.
fn tv_points(walk: &Walk, times: &[u64], exact: bool) -> Result<Vec<(u64, f64, f64)>, CliError> {
    let t_end = times.iter().copied().max().unwrap_or(0);
    let mut out = Vec::with_capacity(times.len());
    if exact {
        let mut d = walk.rational_start();
        for t in 0..=t_end {
            if t > 0 {
                d = walk.rational_step(&d)?;
            }
            if times.contains(&t) {
                out.push((t, d.tv_distance(), d.l2_distance_sq()));
            }
        }
    } else {
        let mut d = walk.start();
        for t in 0..=t_end {
            if t > 0 {
                d = walk.step(&d)?;
            }
            if times.contains(&t) {
                out.push((t, d.tv_distance(), d.l2_distance_sq()));
            }
        }
    }
    Ok(out)
}

pub fn tv_curve(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let limits = limits(cfg)?;
    let spec = walk_spec(cfg)?;
    let walk = Walk::new(spec, &limits)?;
    let mut table = Table::new(&["t", "tv", "l2sq"]);
    let points = tv_points(&walk, &cfg.times(), cfg.exact)?;
    for &(t, tv, l2) in &points {
        table.push(vec![t.into(), tv.into(), l2.into()]);
    }
    let mut notes = vec![format!("walk={} dim={} p={} order={}", spec.kind, spec.dim, cfg.p, walk.order())];
    if let Some(eps) = cfg.eps {
        match points.iter().find(|&&(_, tv, _)| tv < eps) {
            Some((t, _, _)) => notes.push(format!("t_mix({eps})={t}")),
            None => notes.push(format!("t_mix({eps}) not reached by t={}", cfg.t_max)),
        }
    }
    Ok(Outcome::ok(table, notes))
}

pub fn bound_curve(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let limits = limits(cfg)?;
    let (n, p) = (dimension(cfg)?, modulus(cfg)?);
    let times = cfg.times();
    let rhs = upper_bound_curve(n, p, &times, &limits)?;
    let report = comparison_constant(n, p, &limits)?;
    let main = main_bound_curve(n, p, &times, report.constant, &limits)?;
    let q = tv_points(&Walk::new(WalkSpec::q(n, p), &limits)?, &times, cfg.exact)?;
    let pw = tv_points(&Walk::new(WalkSpec::p(n, p), &limits)?, &times, cfg.exact)?;
    let mut table = Table::new(&["t", "rhs", "q_tv4", "main_rhs", "p_tv4"]);
    let mut failures = Vec::new();
    for k in 0..times.len() {
        let (q4, p4) = (4.0 * q[k].1 * q[k].1, 4.0 * pw[k].1 * pw[k].1);
        if q4 > rhs[k] * (1.0 + 1e-9) + 1e-15 {
            failures.push(format!("character bound below 4TV(Q)^2 at t={}", times[k]));
        }
        if p4 > main[k] * (1.0 + 1e-9) + 1e-15 {
            failures.push(format!("main bound below 4TV(P)^2 at t={}", times[k]));
        }
        table.push(vec![times[k].into(), rhs[k].into(), q4.into(), main[k].into(), p4.into()]);
    }
    Ok(Outcome {
        table,
        notes: vec![format!("A={}/{}", report.constant_num, report.constant_den)],
        failures,
    })
}

pub fn spectrum(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let limits = limits(cfg)?;
    let spec = walk_spec(cfg)?;
    let numeric = transition_spectrum(&spec, &limits)?;
    let closed = match spec.kind {
        WalkKind::K => Some(k_spectrum(spec.p, spec.a())),
        WalkKind::ProductQ => Some(product_spectrum(spec.dim, spec.p, spec.a())),
        _ => None,
    };
    let mut table = Table::new(&["index", "eigenvalue", "closed_form"]);
    for (k, &v) in numeric.eigenvalues.iter().enumerate() {
        let c = closed.as_ref().map_or(Cell::Empty, |s| Cell::Float(s.eigenvalues[k]));
        table.push(vec![k.into(), v.into(), c]);
    }
    Ok(Outcome::ok(
        table,
        vec![format!("eigenpairs={} max_residual={:.3e}", numeric.len(), numeric.max_residual)],
    ))
}

pub fn superclasses(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let limits = limits(cfg)?;
    let (n, p) = (dimension(cfg)?, modulus(cfg)?);
    let mut table = Table::new(&["label", "d", "i", "size_exponent", "weight"]);
    let q = BigUint::from(p.get());
    let mut degree_sum = BigUint::from(0u8);
    let mut size_sum = BigUint::from(0u8);
    for label in enumerate_labels_checked(n, p, &limits)? {
        let s = label.statistics();
        let weight = q.pow(2 * s.d - s.i_stat);
        degree_sum += &weight;
        size_sum += q.pow(s.size_exponent);
        table.push(vec![
            label.to_string().into(),
            s.d.into(),
            s.i_stat.into(),
            s.size_exponent.into(),
            Cell::Text(weight.to_string()),
        ]);
    }
    let order = q.pow(strict_len(n) as u32);
    let mut failures = Vec::new();
    if degree_sum != order {
        failures.push(format!("degree identity: sum {degree_sum} != {order}"));
    }
    if size_sum != order {
        failures.push(format!("class sizes: sum {size_sum} != {order}"));
    }
    Ok(Outcome {
        notes: vec![format!("labels={} degree_sum={degree_sum} order={order}", table.rows.len())],
        table,
        failures,
    })
}

pub fn words(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let limits = limits(cfg)?;
    let (n, p) = (dimension(cfg)?, modulus(cfg)?);
    let per_class = (p.get() as u128).pow(n as u32 - 2);
    let total = per_class * (n as u128 - 1) * class_coefficients(p).len() as u128;
    if total > limits.max_words as u128 {
        return Err(unitri::Error::Capacity {
            what: "class-element words",
            requested: total,
            limit: limits.max_words as u128,
        }
        .into());
    }
    let mut table = Table::new(&["row", "coeff", "element", "length", "max_multiplicity", "word"]);
    let mut failures = Vec::new();
    for i in 1..n {
        for c in class_coefficients(p) {
            for b in conjugacy_class_elements(i, p.reduce(c), n, p)? {
                let w = word_class_element(&b, i, c)?;
                let stats = word_stats(&w);
                if eval_word(&w, n, p)? != b || w.len() % 2 == 0 {
                    failures.push(format!("word for element {} of C_{i}({c}) is wrong", b.encode_index()));
                }
                table.push(vec![
                    i.into(),
                    c.into(),
                    b.encode_index().into(),
                    w.len().into(),
                    stats.max_multiplicity().into(),
                    w.to_string().into(),
                ]);
            }
        }
    }
    Ok(Outcome {
        notes: vec![format!("words={}", table.rows.len())],
        table,
        failures,
    })
}

pub fn compare(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let limits = limits(cfg)?;
    let (n, p) = (dimension(cfg)?, modulus(cfg)?);
    let r = comparison_constant(n, p, &limits)?;
    let mut table = Table::new(&["generator", "load", "inv_p", "product"]);
    for l in &r.loads {
        table.push(vec![l.step.to_string().into(), l.load.into(), l.inv_p.into(), l.product.into()]);
    }
    let mut notes = vec![format!(
        "A={}/{} ({:.6}) argmax={} words={} max_length={} max_multiplicity={}",
        r.constant_num, r.constant_den, r.constant, r.argmax, r.words, r.max_length, r.max_multiplicity
    )];
    let mut failures = Vec::new();
    let order = group_order(n, p).map_or(u128::MAX, |o| o as u128);
    if order <= limits.max_dense_states as u128 {
        let check = spectral_comparison_check(n, p, r.constant, &limits)?;
        notes.push(format!(
            "spectral check {} over {} pairs, min slack {:.6e}",
            if check.holds { "holds" } else { "FAILS" },
            check.pairs,
            check.min_slack
        ));
        if !check.holds {
            failures.push(format!("spectral comparison fails at index {}", check.worst_index));
        }
    } else {
        notes.push(format!("spectral check skipped: |G|={order} exceeds the dense budget"));
    }
    Ok(Outcome { table, notes, failures })
}

struct Checks {
    table: Table,
    failures: Vec<String>,
}

impl Checks {
    fn record(&mut self, name: &str, result: Result<String, String>) {
        let (status, detail) = match result {
            Ok(d) => ("pass", d),
            Err(d) => {
                self.failures.push(format!("{name}: {d}"));
                ("fail", d)
            }
        };
        self.table.push(vec![name.into(), status.into(), detail.into()]);
    }
}

fn check_group(n: usize, p: PrimeModulus) -> Result<String, String> {
    let order = group_order(n, p).ok_or("group order overflows")?;
    let sample = order.min(12);
    let el = |k| UniTriMatrix::decode_index(k, n, p).unwrap();
    for k in 0..order.min(5000) {
        let x = el(k);
        if x.encode_index() != k || !x.mul(&x.inverse()).unwrap().is_identity() {
            return Err(format!("element {k} fails inverse or encoding"));
        }
    }
    for a in 0..sample {
        for b in 0..sample {
            for c in 0..sample {
                let (x, y, z) = (el(a * 7 % order), el(b * 11 % order), el(c * 13 % order));
                if x.mul(&y).unwrap().mul(&z).unwrap() != x.mul(&y.mul(&z).unwrap()).unwrap() {
                    return Err(format!("associativity fails at ({a},{b},{c})"));
                }
            }
        }
    }
    Ok(format!("order {order}"))
}

fn check_second_diag(n: usize, p: PrimeModulus) -> Result<String, String> {
    let mut count = 0;
    for i in 1..n.saturating_sub(1) {
        for b in 0..p.get() {
            let w = word_second_diag(i, b, n, p).map_err(|e| e.to_string())?;
            let want = UniTriMatrix::elementary(n, p, i, i + 2, b as i64).unwrap();
            let bound = 12 * (b as f64).sqrt().floor() as usize + 10;
            if eval_word(&w, n, p).unwrap() != want || w.len() % 2 != 0 || w.len() > bound {
                return Err(format!("row {i} b={b}: {w}"));
            }
            count += 1;
        }
    }
    Ok(format!("{count} words"))
}

fn check_partition(n: usize, p: PrimeModulus, limits: &Limits) -> Result<String, String> {
    let parts = superclass_partition(n, p, limits).map_err(|e| e.to_string())?;
    let order = group_order(n, p).unwrap();
    let mut seen = vec![false; order as usize];
    for (label, fiber) in &parts {
        if fiber.len() as u64 != (p.get() as u64).pow(label.statistics().size_exponent) {
            return Err(format!("fiber {label} has {} elements", fiber.len()));
        }
        for &g in fiber {
            if std::mem::replace(&mut seen[g as usize], true) {
                return Err(format!("element {g} lies in two fibers"));
            }
        }
    }
    if seen.iter().any(|s| !s) || parts.len() as u128 != label_count(n, p) {
        return Err("fibers do not cover the group".into());
    }
    Ok(format!("{} fibers", parts.len()))
}

fn check_degree(n: usize, p: PrimeModulus) -> Result<String, String> {
    let sum = degree_identity_sum(n, p);
    let want = BigUint::from(p.get()).pow(strict_len(n) as u32);
    if sum == want {
        Ok(format!("sum {sum}"))
    } else {
        Err(format!("sum {sum} != {want}"))
    }
}

fn check_exact_float(n: usize, p: PrimeModulus, t_max: u64, limits: &Limits) -> Result<String, String> {
    let walk = Walk::new(WalkSpec::p(n, p), limits).map_err(|e| e.to_string())?;
    let (mut f, mut r) = (walk.start(), walk.rational_start());
    let mut worst = 0.0f64;
    for _ in 0..t_max.min(20) {
        f = walk.step(&f).unwrap();
        r = walk.rational_step(&r).unwrap();
        for g in 0..walk.order() {
            worst = worst.max((f.probability(g) - r.probability(g)).abs());
        }
    }
    if worst < 1e-12 {
        Ok(format!("max gap {worst:.3e}"))
    } else {
        Err(format!("max gap {worst:.3e}"))
    }
}

fn check_q_bound(n: usize, p: PrimeModulus, t_max: u64, limits: &Limits) -> Result<String, String> {
    let ts: Vec<u64> = (0..=t_max).collect();
    let rhs = upper_bound_curve(n, p, &ts, limits).map_err(|e| e.to_string())?;
    let curve = Walk::new(WalkSpec::q(n, p), limits).map_err(|e| e.to_string())?.curve(t_max);
    for pt in curve {
        let lhs = 4.0 * pt.tv * pt.tv;
        if lhs > rhs[pt.t as usize] * (1.0 + 1e-9) + 1e-15 {
            return Err(format!("t={}: {lhs:.6e} > {:.6e}", pt.t, rhs[pt.t as usize]));
        }
    }
    Ok(format!("t <= {t_max}"))
}

fn check_comparison(n: usize, p: PrimeModulus, limits: &Limits) -> Result<String, String> {
    let r = comparison_constant(n, p, limits).map_err(|e| e.to_string())?;
    let mut detail = format!("A={}/{}", r.constant_num, r.constant_den);
    if group_order(n, p).is_some_and(|o| o <= limits.max_dense_states) {
        let check = spectral_comparison_check(n, p, r.constant, limits).map_err(|e| e.to_string())?;
        if !check.holds {
            return Err(format!("{detail}, slack {:.6e} at index {}", check.min_slack, check.worst_index));
        }
        detail += &format!(", spectral slack {:.6e}", check.min_slack);
    }
    let ts: Vec<u64> = (1..=10).map(|k| (2.0 * k as f64 * r.constant).ceil() as u64).collect();
    let main = main_bound_curve(n, p, &ts, r.constant, limits).map_err(|e| e.to_string())?;
    let curve = Walk::new(WalkSpec::p(n, p), limits)
        .map_err(|e| e.to_string())?
        .curve(*ts.last().unwrap());
    for (&t, &m) in ts.iter().zip(&main) {
        let lhs = 4.0 * curve[t as usize].tv.powi(2);
        if lhs > m {
            return Err(format!("{detail}, main bound {m:.6e} < {lhs:.6e} at t={t}"));
        }
    }
    Ok(detail)
}

/// Runs the invariant suite for one `(n, p)`.
pub fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let limits = limits(cfg)?;
    let (n, p) = (dimension(cfg)?, modulus(cfg)?);
    let mut checks = Checks {
        table: Table::new(&["check", "status", "detail"]),
        failures: Vec::new(),
    };
    checks.record("group_laws", check_group(n, p));
    checks.record("second_diagonal_words", check_second_diag(n, p));
    let words = words(cfg)?;
    checks.record(
        "class_words",
        if words.failures.is_empty() {
            Ok(format!("{} words", words.table.rows.len()))
        } else {
            Err(words.failures.join("; "))
        },
    );
    checks.record("superclass_partition", check_partition(n, p, &limits));
    checks.record("degree_identity", check_degree(n, p));
    checks.record("exact_vs_float", check_exact_float(n, p, cfg.t_max, &limits));
    checks.record("character_bound", check_q_bound(n, p, cfg.t_max, &limits));
    checks.record("comparison", check_comparison(n, p, &limits));
    let passed = checks.table.rows.len() - checks.failures.len();
    Ok(Outcome {
        notes: vec![format!("{passed}/{} checks pass", checks.table.rows.len())],
        table: checks.table,
        failures: checks.failures,
    })
}
