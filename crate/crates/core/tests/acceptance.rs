//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use itertools::Itertools;
use mlrc::bounds::{self, Formula, Part};
use mlrc::code::{verify_locality, ErasurePattern, LinearCode, Repairer};
use mlrc::construct::{build_multi_delta_lrc, ConstructionParams};
use mlrc::descriptor::CodeDescriptor;
use mlrc::regen::{self, Budget};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn mlrc(args: &[&str]) -> Result<Vec<u8>, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_mlrc")).args(args).output().map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(format!("mlrc {args:?} failed: {}", String::from_utf8_lossy(&o.stderr)));
    }
    Ok(o.stdout)
}

fn construct(dir: &Path, name: &str, args: &[&str]) -> Result<(String, CodeDescriptor), String> {
    let path = dir.join(name).to_string_lossy().into_owned();
    let mut all = vec!["construct"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", &path]);
    mlrc(&all)?;
    let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    let desc = CodeDescriptor::from_json(&text).map_err(|e| e.to_string())?;
    Ok((path, desc))
}

/// Dimension, oracle distance and certificate of a freshly built code.
fn reproduce(args: &[&str], n: usize, k: usize, d: usize, bound: i64, limit: Duration) -> Check {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (_, desc) = construct(dir.path(), "code.json", args)?;
    let code = desc.code().map_err(|e| e.to_string())?;
    ensure((code.n(), code.k()) == (n, k), format!("got [{}, {}]", code.n(), code.k()))?;
    let oracle_d = common::min_distance_by_columns(&desc.h, desc.q, n);
    ensure(oracle_d == d, format!("oracle distance {oracle_d}, expected {d}"))?;
    let cert = desc.certificate().ok_or("no certificate")?;
    ensure(cert.achieved_d == d, format!("certificate distance {}", cert.achieved_d))?;
    ensure(cert.bound_d == Some(bound), format!("certificate bound {:?}", cert.bound_d))?;
    ensure(cert.optimal, "not marked optimal")?;
    let elapsed = start.elapsed();
    ensure(elapsed < limit, format!("took {elapsed:?}"))?;
    Ok(format!("[{n},{k},{d}] over GF({}), bound {bound}, {elapsed:.2?}", desc.q))
}

fn criterion_1() -> Check {
    reproduce(&["--parts", "6:2,8:3", "--k", "8", "--q", "17"], 14, 8, 4, 4, Duration::from_secs(5))
}

fn criterion_2() -> Check {
    let parts = [(8, 2), (10, 3)];
    let gamma = bounds::gamma(8, &parts, 3);
    ensure(gamma == 4, format!("gamma = {gamma}"))?;
    let b = bounds::bound_equal_delta(18, 8, &parts, 3).map_err(|e| e.to_string())?;
    ensure(b.formula == Formula::UniformDelta && b.value == Some(5), format!("{b:?}"))?;
    reproduce(&["--parts", "8:2,10:3", "--k", "8", "--delta", "3", "--q", "19"], 18, 8, 5, 5, Duration::from_secs(30))
        .map(|s| format!("{s}, gamma 4"))
}

fn constructed() -> Vec<mlrc::construct::ConstructionOutput> {
    [((6, 2), (8, 3), 8, 2, 17), ((8, 2), (10, 3), 8, 3, 19)]
        .into_iter()
        .map(|(a, b, k, delta, q)| {
            build_multi_delta_lrc(&ConstructionParams { parts: vec![a, b], k, delta, q: Some(q) }).unwrap()
        })
        .collect()
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let mut local_patterns = 0;
    let mut global_patterns = 0;
    for out in constructed() {
        let code = &out.code;
        let n = code.n();
        let hints: Vec<Vec<usize>> = out.groups.iter().map(|g| g.1.clone()).collect();
        let outcome = verify_locality(code, &out.profile, &hints).map_err(|e| e.to_string())?;
        let cert = outcome.certificate().ok_or("locality not certified")?;
        let rep = Repairer::new(code, &out.profile, cert).map_err(|e| e.to_string())?;
        let msg: Vec<u32> = (0..code.k() as u32).map(|i| (3 * i + 1) % code.field().q()).collect();
        let word = code.encode(&msg).unwrap();
        let delta = out.params.delta;

        for (part, group) in &out.groups {
            let r = out.params.parts[*part].1;
            for size in 1..delta {
                for e in group.iter().copied().combinations(size) {
                    let got = rep.repair(&word, &ErasurePattern::new(n, &e).unwrap()).map_err(|x| x.to_string())?;
                    ensure(got.word == word, format!("wrong repair of {e:?}"))?;
                    ensure(got.all_local(), format!("{e:?} not repaired locally"))?;
                    for s in &got.symbols {
                        ensure(s.helpers <= r + delta - 2, format!("{e:?} read {} helpers", s.helpers))?;
                    }
                    local_patterns += 1;
                }
            }
        }
        let d = out.certificate.achieved_d;
        for size in 1..d {
            for e in (0..n).combinations(size) {
                let got = rep.repair(&word, &ErasurePattern::new(n, &e).unwrap()).map_err(|x| x.to_string())?;
                ensure(got.word == word, format!("wrong repair of {e:?}"))?;
                global_patterns += 1;
            }
        }
        let witness = code.min_distance_witness();
        ensure(witness.len() == d, "witness size")?;
        let bad = rep.repair(&word, &ErasurePattern::new(n, &witness).unwrap());
        ensure(bad.is_err(), format!("{witness:?} should be unrecoverable"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), format!("took {elapsed:?}"))?;
    Ok(format!(
        "{local_patterns} in-group patterns local, {global_patterns} patterns below d recovered, d-patterns fail, {elapsed:.2?}"
    ))
}

fn value(b: Result<bounds::BoundResult, bounds::BoundsError>) -> Option<i64> {
    b.ok().and_then(|b| b.value)
}

fn criterion_4() -> Check {
    let mut tuples = 0usize;
    let mut compared = [0usize; 5];
    let mut check = |i: usize, a: Option<i64>, b: Option<i64>, ctx: &dyn Fn() -> String| -> Result<(), String> {
        if let (Some(x), Some(y)) = (a, b) {
            compared[i] += 1;
            ensure(x == y, format!("identity {} fails at {}: {x} vs {y}", i + 1, ctx()))?;
        }
        Ok(())
    };
    for n in 2..=30 {
        for k in 1..=n {
            for r in 1..=6 {
                tuples += 1;
                let ctx = || format!("n={n} k={k} r={r}");
                check(0, value(bounds::bound_r_delta(n, k, r, 2)), value(bounds::bound_r_local(n, k, r)), &ctx)?;
            }
        }
    }
    let sizes = 1..=12usize;
    for (n1, n2) in sizes.clone().cartesian_product(sizes) {
        for (r1, r2) in (1..=4).cartesian_product(1..=5).filter(|(a, b)| a <= b) {
            for (d1, d2) in (2..=4).cartesian_product(2..=4).filter(|(a, b)| a >= b) {
                let n = n1 + n2;
                for k in 1..=n {
                    tuples += 1;
                    let ctx = || format!("n=({n1},{n2}) r=({r1},{r2}) delta=({d1},{d2}) k={k}");
                    let (p1, p2) = (Part::new(n1, r1, d1), Part::new(n2, r2, d2));
                    let two =
                        bounds::bound_two_locality(n, k, p1, p2).ok().filter(|b| b.formula == Formula::TwoLocality);
                    let two = two.and_then(|b| b.value);
                    let multi = value(bounds::bound_multi(n, k, &[p1, p2]));
                    check(3, multi, two, &ctx)?;
                    if (d1, d2) == (2, 2) && r1 < r2 {
                        let ml = value(bounds::bound_ml(n, k, &[(n1, r1), (n2, r2)]));
                        check(1, two, ml, &ctx)?;
                        check(2, multi, ml, &ctx)?;
                        check(4, value(bounds::bound_equal_delta(n, k, &[(n1, r1), (n2, r2)], 2)), ml, &ctx)?;
                    }
                }
            }
        }
    }
    // Three parts for the all-delta-2 reductions.
    for (n1, n2, n3) in (1..=8usize).cartesian_product(1..=8).cartesian_product(1..=8).map(|((a, b), c)| (a, b, c)) {
        let (r1, r2, r3) = (1, 2, 4);
        let n = n1 + n2 + n3;
        let nr = [(n1, r1), (n2, r2), (n3, r3)];
        let parts: Vec<Part> = nr.iter().map(|&(a, b)| Part::new(a, b, 2)).collect();
        for k in 1..=n {
            tuples += 1;
            let ctx = || format!("n=({n1},{n2},{n3}) k={k}");
            let ml = value(bounds::bound_ml(n, k, &nr));
            check(2, value(bounds::bound_multi(n, k, &parts)), ml, &ctx)?;
            check(4, value(bounds::bound_equal_delta(n, k, &nr, 2)), ml, &ctx)?;
        }
    }
    ensure(compared.iter().all(|&c| c >= 500), format!("too few comparisons: {compared:?}"))?;
    Ok(format!("{tuples} tuples; comparisons per identity {compared:?}"))
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let count = 24;
    for i in 0..count {
        let c = common::random_code(&mut rng);
        let q = c.field().q();
        let rank_h = common::rank(&c.parity_check().to_rows(), q);
        ensure((q as u64).pow(rank_h as u32) <= 1 << 16, "dual too large")?;
        let budget = Budget::default();
        let found: Vec<Vec<usize>> = regen::enumerate_regenerating_sets(&c, c.n(), &budget)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|r| r.coordinates)
            .collect();
        let oracle = common::minimal_dual_supports(&c.parity_check().to_rows(), q, c.n());
        ensure(found == oracle, format!("code {i}: circuits differ from minimal dual supports"))?;
        let t = regen::phi(&c, c.n() - c.k(), &budget).map_err(|e| e.to_string())?;
        ensure(t.values.windows(2).all(|w| w[1] > w[0]), format!("code {i}: phi not increasing"))?;
        let d = common::min_distance_by_columns(&c.parity_check().to_rows(), q, c.n());
        let b = regen::singleton_rho_bound(&c, &budget).map_err(|e| e.to_string())?;
        ensure(b >= d, format!("code {i}: bound {b} < d {d}"))?;
    }
    Ok(format!("{count} random codes (n <= 12, q^(n-k) <= 2^16)"))
}

fn criterion_6() -> Check {
    let mut rows = Vec::new();
    for out in constructed() {
        let report =
            regen::check_lemma_phi_bounds(&out.code, &out.profile, &Budget::default()).map_err(|e| e.to_string())?;
        ensure(report.holds(), format!("violations at x = {:?}", report.violations))?;
        rows.push(format!("[{},{}] x <= {}", out.code.n(), out.code.k(), report.rows.len() - 1));
    }
    Ok(rows.join(", "))
}

fn corpus() -> Vec<LinearCode> {
    let mut v = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..30 {
        v.push(common::random_code(&mut rng));
    }
    for (q, n, k) in [(7, 6, 3), (11, 8, 3), (13, 10, 4), (13, 12, 2), (17, 14, 3), (5, 4, 2)] {
        v.push(common::rs(q, n, k));
    }
    for (parts, k, q) in [(vec![(4, 3)], 3, 5), (vec![(3, 2), (4, 3)], 3, 11), (vec![(3, 2), (4, 3)], 4, 11)] {
        if let Ok(out) = build_multi_delta_lrc(&ConstructionParams { parts, k, delta: 2, q: Some(q) }) {
            v.push(out.code);
        }
    }
    for out in constructed() {
        v.push(out.code);
    }
    v
}

fn criterion_7() -> Check {
    let (mut checked, mut skipped) = (0, 0);
    for c in corpus() {
        let q = c.field().q() as u64;
        if q.checked_pow(c.k() as u32).is_none_or(|s| s > 1 << 16) {
            skipped += 1;
            continue;
        }
        let d = c.min_distance();
        let w = common::min_weight(&c.generator().to_rows(), c.field().q(), c.n());
        ensure(d == w, format!("[{}, {}] over GF({q}): {d} vs {w}", c.n(), c.k()))?;
        checked += 1;
    }
    ensure(checked >= 20, format!("only {checked} codes checked"))?;
    Ok(format!("{checked} codes agree ({skipped} with q^k > 2^16 skipped)"))
}

fn criterion_8() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (path, _) = construct(dir.path(), "t4.json", &["--parts", "6:2,8:3", "--k", "8", "--q", "17"])?;
    let base = ["simulate", "--code", &path, "--seed", "42", "--trials", "10000"];
    for format in ["text", "json"] {
        let mut args = base.to_vec();
        args.extend_from_slice(&["--format", format]);
        ensure(mlrc(&args)? == mlrc(&args)?, format!("{format} reports differ"))?;
    }
    let mut args = base.to_vec();
    args.extend_from_slice(&["--failures", "1", "--format", "json"]);
    let v: Value = serde_json::from_slice(&mlrc(&args)?).map_err(|e| e.to_string())?;
    let parts = v["parts"].as_array().ok_or("no parts")?;
    for (p, helpers) in parts.iter().zip([2.0, 3.0]) {
        ensure(p["local_success_rate"] == 1.0, format!("part {}: local rate {}", p["part"], p["local_success_rate"]))?;
        ensure(p["mean_helpers"] == helpers, format!("part {}: mean helpers {}", p["part"], p["mean_helpers"]))?;
    }
    ensure(v["all_local"] == 10000, "not all trials local")?;
    Ok("byte-identical reports; local rate 1.0; mean helpers 2 and 3".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("construction [14,8,4] meets its bound", criterion_1),
        ("construction [18,8,5] meets its bound", criterion_2),
        ("locality certificates and exhaustive repair", criterion_3),
        ("bound reduction identities", criterion_4),
        ("regenerating-set oracle agreement", criterion_5),
        ("Phi within the piecewise bound", criterion_6),
        ("minimum distance oracle equivalence", criterion_7),
        ("simulation determinism", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
