//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::{BTreeSet, VecDeque};
use std::f64::consts::TAU;
use std::path::PathBuf;
use std::process::Command as Process;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use unitri::comparison::{class_coefficients, comparison_constant, main_bound_curve, spectral_comparison_check};
use unitri::group::{eval_word, group_order, strict_len};
use unitri::paths::{word_class_element, word_second_diag};
use unitri::spectral::{product_spectrum, spectrum_distance, transition_spectrum};
use unitri::superclass::{canonical_form, conjugacy_class_elements, degree_identity_sum, superclass_partition};
use unitri::supercharacter::upper_bound_curve;
use unitri::walk::{closest_odd_sqrt, mixing_time, Walk, WalkSpec};
use unitri::{GeneratorStep, Limits, PrimeModulus, UniTriMatrix};

type Verdict = Result<String, String>;
type Criterion = (u32, &'static str, Duration, fn() -> Verdict);

fn pm(p: u32) -> PrimeModulus {
    PrimeModulus::new(p).unwrap()
}

fn floor_sqrt(x: u32) -> usize {
    (x as f64).sqrt().floor() as usize
}

fn criterion_1() -> Verdict {
    let mut count = 0;
    for n in 3..=5 {
        for p in [3, 5, 7] {
            let pmod = pm(p);
            for i in 1..=n - 2 {
                for b in 0..p {
                    let w = word_second_diag(i, b, n, pmod).map_err(|e| e.to_string())?;
                    let want = UniTriMatrix::elementary(n, pmod, i, i + 2, b as i64).unwrap();
                    if eval_word(&w, n, pmod).unwrap() != want {
                        return Err(format!("n={n} p={p} i={i} b={b}: wrong value"));
                    }
                    if w.len() % 2 != 0 || w.len() > 12 * floor_sqrt(b) + 10 {
                        return Err(format!("n={n} p={p} i={i} b={b}: length {}", w.len()));
                    }
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} words"))
}

fn criterion_2() -> Verdict {
    let mut count = 0;
    let mut longest = 0;
    for n in [3, 4] {
        for p in [3, 5, 7] {
            let pmod = pm(p);
            for i in 1..n {
                for c in class_coefficients(pmod) {
                    for b in conjugacy_class_elements(i, pmod.reduce(c), n, pmod).unwrap() {
                        let w = word_class_element(&b, i, c).map_err(|e| e.to_string())?;
                        if eval_word(&w, n, pmod).unwrap() != b || w.len() % 2 == 0 {
                            return Err(format!("n={n} p={p} C_{i}({c}) element {}", b.encode_index()));
                        }
                        longest = longest.max(w.len());
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{count} words, longest {longest}"))
}

fn conjugation_orbit(m: &UniTriMatrix) -> BTreeSet<u64> {
    let (n, p) = (m.dim(), m.modulus());
    let gens: Vec<UniTriMatrix> = GeneratorStep::all(n).iter().map(|s| s.matrix(n, p).unwrap()).collect();
    let mut seen = BTreeSet::from([m.encode_index()]);
    let mut queue = VecDeque::from([m.clone()]);
    while let Some(x) = queue.pop_front() {
        for g in &gens {
            let y = g.inverse().mul(&x).unwrap().mul(g).unwrap();
            if seen.insert(y.encode_index()) {
                queue.push_back(y);
            }
        }
    }
    seen
}

fn criterion_3() -> Verdict {
    let limits = Limits::default();
    let mut fibers = 0;
    for n in 2..=4 {
        for p in [3, 5] {
            let pmod = pm(p);
            let parts = superclass_partition(n, pmod, &limits).map_err(|e| e.to_string())?;
            let order = group_order(n, pmod).unwrap();
            let mut hit = vec![0u8; order as usize];
            for fiber in parts.values() {
                for &g in fiber {
                    hit[g as usize] += 1;
                }
            }
            if hit.iter().any(|&h| h != 1) {
                return Err(format!("n={n} p={p}: fibers do not partition G"));
            }
            fibers += parts.len();
            for i in 1..n {
                for x in 1..p {
                    let m = UniTriMatrix::elementary(n, pmod, i, i + 1, x as i64).unwrap();
                    let orbit = conjugation_orbit(&m);
                    let fiber: BTreeSet<u64> = parts[&canonical_form(&m)].iter().copied().collect();
                    let class: BTreeSet<u64> = conjugacy_class_elements(i, x, n, pmod)
                        .unwrap()
                        .iter()
                        .map(UniTriMatrix::encode_index)
                        .collect();
                    if orbit != fiber || orbit != class || class.len() as u64 != (p as u64).pow(n as u32 - 2) {
                        return Err(format!("n={n} p={p} i={i} x={x}: class mismatch"));
                    }
                }
            }
        }
    }
    Ok(format!("{fibers} fibers"))
}

fn criterion_4() -> Verdict {
    for n in 2..=6 {
        for p in [3u32, 5, 7] {
            let want = BigUint::from(p).pow(strict_len(n) as u32);
            let got = degree_identity_sum(n, pm(p));
            if got != want {
                return Err(format!("n={n} p={p}: {got} != {want}"));
            }
        }
    }
    Ok("n <= 6, p in {3,5,7}".into())
}

fn cycle_eigenvalue(x: u32, p: u32, a: u32) -> f64 {
    let (x, p, a) = (x as f64, p as f64, a as f64);
    0.5 * ((TAU * x / p).cos() + (TAU * a * x / p).cos())
}

fn criterion_5() -> Verdict {
    let limits = Limits::default();
    let mut worst_k = 0.0f64;
    for p in [5, 7, 11, 13] {
        let a = closest_odd_sqrt(pm(p));
        let mut want: Vec<f64> = (0..p).map(|x| cycle_eigenvalue(x, p, a)).collect();
        want.sort_by(|x, y| y.total_cmp(x));
        let got = transition_spectrum(&WalkSpec::k(pm(p)), &limits).map_err(|e| e.to_string())?;
        for (g, w) in got.eigenvalues.iter().zip(&want) {
            worst_k = worst_k.max((g - w).abs());
        }
    }
    if worst_k > 1e-9 {
        return Err(format!("K spectrum off by {worst_k:.3e}"));
    }
    let mut worst_l2 = 0.0f64;
    for p in [5, 7, 11] {
        let a = closest_odd_sqrt(pm(p));
        let curve = Walk::new(WalkSpec::k(pm(p)), &limits).unwrap().curve(50);
        for pt in curve {
            let sum: f64 = (1..p).map(|x| cycle_eigenvalue(x, p, a).powi(2 * pt.t as i32)).sum();
            worst_l2 = worst_l2.max((p as f64 * pt.l2_sq - sum).abs());
        }
    }
    if worst_l2 > 1e-10 {
        return Err(format!("L2 identity off by {worst_l2:.3e}"));
    }
    let p = pm(5);
    let closed = product_spectrum(2, p, closest_odd_sqrt(p));
    let numeric = transition_spectrum(&WalkSpec::product_q(2, p), &limits).map_err(|e| e.to_string())?;
    let gap = spectrum_distance(&closed, &numeric);
    if gap > 1e-9 {
        return Err(format!("productQ spectrum off by {gap:.3e}"));
    }
    Ok(format!("K {worst_k:.1e}, L2 {worst_l2:.1e}, productQ {gap:.1e}"))
}

fn criterion_6() -> Verdict {
    let limits = Limits::default();
    let ts: Vec<u64> = (0..=200).collect();
    let mut tightest = f64::INFINITY;
    for n in 2..=4 {
        for p in [3, 5, 7] {
            let rhs = upper_bound_curve(n, pm(p), &ts, &limits).map_err(|e| e.to_string())?;
            let curve = Walk::new(WalkSpec::q(n, pm(p)), &limits).map_err(|e| e.to_string())?.curve(200);
            for pt in &curve {
                let lhs = 4.0 * pt.tv * pt.tv;
                let r = rhs[pt.t as usize];
                if lhs > r * (1.0 + 1e-9) + 1e-15 {
                    return Err(format!("n={n} p={p} t={}: {lhs:.6e} > {r:.6e}", pt.t));
                }
                if lhs > 1e-12 {
                    tightest = tightest.min(r / lhs);
                }
            }
            if (n, p) == (2, 5) {
                let end = 4.0 * curve[200].tv.powi(2);
                if rhs[200] >= 1e-6 || end >= 1e-6 {
                    return Err(format!("n=2 p=5 at t=200: rhs {:.3e}, 4TV^2 {end:.3e}", rhs[200]));
                }
            }
        }
    }
    Ok(format!("smallest rhs/lhs ratio {tightest:.4}"))
}

fn criterion_7() -> Verdict {
    let limits = Limits::default();
    let mut details = Vec::new();
    for (n, p) in [(2, 5), (2, 7), (3, 3), (3, 5)] {
        let r = comparison_constant(n, pm(p), &limits).map_err(|e| e.to_string())?;
        let check = spectral_comparison_check(n, pm(p), r.constant, &limits).map_err(|e| e.to_string())?;
        if !check.holds {
            return Err(format!("n={n} p={p}: slack {:.3e} at index {}", check.min_slack, check.worst_index));
        }
        details.push(format!("A({n},{p})={}/{}", r.constant_num, r.constant_den));
    }
    let (n, p) = (3, pm(3));
    let a = comparison_constant(n, p, &limits).unwrap().constant;
    let ts: Vec<u64> = (1..=10).map(|k| (2.0 * k as f64 * a).ceil() as u64).collect();
    let main = main_bound_curve(n, p, &ts, a, &limits).map_err(|e| e.to_string())?;
    let curve = Walk::new(WalkSpec::p(n, p), &limits).unwrap().curve(*ts.last().unwrap());
    for (&t, &m) in ts.iter().zip(&main) {
        let lhs = 4.0 * curve[t as usize].tv.powi(2);
        if lhs > m {
            return Err(format!("main bound {m:.6e} < {lhs:.6e} at t={t}"));
        }
    }
    Ok(details.join(" "))
}

fn criterion_8() -> Verdict {
    let primes = [5u32, 7, 11, 13];
    let mut times = Vec::new();
    for &q in &primes {
        times.push(mixing_time(&WalkSpec::p(2, pm(q)), 0.25, &Limits::default()).map_err(|e| e.to_string())? as f64);
    }
    let log_c = primes
        .iter()
        .zip(&times)
        .map(|(&q, &t)| (t / (q * q) as f64).ln())
        .sum::<f64>()
        / primes.len() as f64;
    let c = log_c.exp();
    for (&q, &t) in primes.iter().zip(&times) {
        let ratio = t / (c * (q * q) as f64);
        if !(0.5..=2.0).contains(&ratio) {
            return Err(format!("p={q}: t_mix {t} is {ratio:.3} times C p^2"));
        }
    }
    Ok(format!("C = {c:.4}, t_mix = {times:?}"))
}

fn criterion_9() -> Verdict {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut fixtures: Vec<PathBuf> = std::fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_str().unwrap().starts_with("verify_"))
        .collect();
    fixtures.sort();
    let run = |path: &PathBuf| -> Result<Vec<u8>, String> {
        let out = Process::new(env!("CARGO_BIN_EXE_unitri"))
            .args(["verify", "--exact", "--config", path.to_str().unwrap()])
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("{} exited with {:?}", path.display(), out.status.code()));
        }
        Ok(out.stdout)
    };
    for f in &fixtures {
        if run(f)? != run(f)? {
            return Err(format!("{} differs between runs", f.display()));
        }
    }
    if fixtures.is_empty() {
        return Err("no verify fixtures".into());
    }
    Ok(format!("{} fixtures", fixtures.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "commutator words", Duration::from_secs(1), criterion_1),
        (2, "class words", Duration::from_secs(30), criterion_2),
        (3, "super-class structure", Duration::from_secs(60), criterion_3),
        (4, "degree identity", Duration::from_secs(10), criterion_4),
        (5, "spectral identities", Duration::from_secs(300), criterion_5),
        (6, "character bound dominance", Duration::from_secs(300), criterion_6),
        (7, "comparison certificate", Duration::from_secs(300), criterion_7),
        (8, "quadratic mixing on the cycle", Duration::from_secs(60), criterion_8),
        (9, "reproducible verify output", Duration::from_secs(300), criterion_9),
    ];
    let mut failed = 0;
    for (k, name, budget, f) in criteria {
        let start = Instant::now();
        let verdict = f();
        let took = start.elapsed();
        let verdict = match verdict {
            Ok(d) if took > budget => Err(format!("{d}; took {took:.2?}, budget {budget:?}")),
            v => v,
        };
        match verdict {
            Ok(d) => println!("PASS criterion {k} ({name}): {d} [{took:.2?}]"),
            Err(d) => {
                failed += 1;
                println!("FAIL criterion {k} ({name}): {d} [{took:.2?}]");
            }
        }
    }
    println!("{} of 9 criteria pass", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
