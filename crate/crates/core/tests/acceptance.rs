//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use mcu_synth::circuit::{cmps_toffoli, compose, counts, Circuit};
use mcu_synth::exp_synth::exp_synthesize;
use mcu_synth::oracle::{
    circuit_unitary, cnu_unitary, equiv_dense, equiv_sampled_with, lambda_unitary, DenseUnitary, SampleOptions,
};
use mcu_synth::poly_synth::{
    lambda_m1_net, lambda_m2_net, lattice_params, poly_blocks, poly_synthesize, ToffoliPolicy,
};
use mcu_synth::qmath::{random_unitary, Unitary2};
use mcu_synth::reporting::{formula_counts, second_differences, Scheme};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = fn() -> Outcome;

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn gate_set() -> Vec<(String, Unitary2)> {
    let mut v: Vec<(String, Unitary2)> = ["X", "Z", "H", "T"].iter().map(|s| (s.to_string(), gate(s))).collect();
    for seed in 1..=3 {
        v.push((format!("random({seed})"), random_unitary(seed)));
    }
    v
}

fn within(t: Instant, limit: u64) -> (bool, Duration) {
    let e = t.elapsed();
    (e <= Duration::from_secs(limit), e)
}

fn c1_exp_correctness() -> Outcome {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for n in 3..=10 {
        for (_, u) in gate_set() {
            let s = exp_synthesize(n, &u, true, true).unwrap();
            worst = worst.max(equiv_dense(&s.circuit, &cnu_unitary(n, &u).unwrap(), 1e-9).unwrap().max_dev);
        }
    }
    let (fast, e) = within(t, 60);
    outcome(
        worst <= 1e-9 && fast,
        format!("n=3..10 x 7 gates, max deviation {worst:.2e}, {:.1}s (limit 60s)", e.as_secs_f64()),
    )
}

fn c2_poly_correctness() -> Outcome {
    let t = Instant::now();
    let mut dense: f64 = 0.0;
    for n in 7..=11 {
        for (_, u) in gate_set() {
            let s = poly_synthesize(n, &u, ToffoliPolicy::Auto, true, true).unwrap();
            dense = dense.max(equiv_dense(&s.circuit, &cnu_unitary(n, &u).unwrap(), 1e-9).unwrap().max_dev);
        }
    }
    let mut sampled: f64 = 0.0;
    for n in 12..=16 {
        for (i, (_, u)) in gate_set().into_iter().enumerate() {
            let s = poly_synthesize(n, &u, ToffoliPolicy::Auto, true, true).unwrap();
            let opts = SampleOptions { trials: 32, seed: 100 + i as u64, tol: 1e-8, ..Default::default() };
            sampled = sampled.max(equiv_sampled_with(&s.circuit, n, &u, &opts).unwrap().max_dev);
        }
    }
    let (fast, e) = within(t, 120);
    outcome(
        dense <= 1e-9 && sampled <= 1e-8 && fast,
        format!(
            "dense n=7..11 max {dense:.2e}; sampled n=12..16 max {sampled:.2e}; {:.1}s (limit 120s)",
            e.as_secs_f64()
        ),
    )
}

fn c3_toffoli_law() -> Outcome {
    let mut bad = Vec::new();
    for n in 7..=20usize {
        let got = counts(&poly_blocks(n, &gate("H")).unwrap()).toffoli as i64;
        let m = n as i64;
        if got != 8 * m * m - 72 * m + 174 {
            bad.push(n);
        }
    }
    let at10 = counts(&poly_blocks(10, &gate("H")).unwrap()).toffoli;
    outcome(bad.is_empty(), format!("n=7..20 exact; n=10 -> {at10}; mismatches {bad:?}"))
}

fn c4_lattices() -> Outcome {
    let mut bad = Vec::new();
    for k in 7..=20 {
        let h = k / 2;
        if lambda_m1_net(k).unwrap().len() != 4 * h - 8 || lambda_m2_net(k).unwrap().len() != 4 * k - 4 * h - 12 {
            bad.push(format!("count k={k}"));
        }
        if k <= 11 {
            let p = lattice_params(k).unwrap();
            let c1: Vec<usize> = (1..=p.m1).collect();
            let mut c2: Vec<usize> = (p.m1 + 1..=k - 2).collect();
            c2.push(k);
            let ok1 = equiv_dense(&lambda_m1_net(k).unwrap(), &lambda_unitary(k, &c1, k).unwrap(), 1e-12).unwrap();
            let ok2 = equiv_dense(&lambda_m2_net(k).unwrap(), &lambda_unitary(k, &c2, k - 1).unwrap(), 1e-12).unwrap();
            if !ok1.equal || !ok2.equal {
                bad.push(format!("dense k={k}"));
            }
        }
    }
    outcome(bad.is_empty(), format!("counts k=7..20, dense k=7..11 with work wires restored; failures {bad:?}"))
}

fn c5_cmps() -> Outcome {
    let c = cmps_toffoli(3, 1, 2, 3).unwrap();
    let r = counts(&c);
    let m = circuit_unitary(&c).unwrap();
    let t = lambda_unitary(3, &[1, 2], 3).unwrap();
    let mut dev: f64 = 0.0;
    for col in 0..8 {
        // a, b, c are bits 2, 1, 0 of the basis index.
        let sign = if col & 0b110 == 0b100 && col & 1 == 1 { -1.0 } else { 1.0 };
        for row in 0..8 {
            dev = dev.max((m.entry(row, col) - t.entry(row, col) * sign).norm());
        }
    }
    let mut stages = Vec::new();
    let mut worst: f64 = 0.0;
    for n in 7..=10 {
        let s = poly_synthesize(n, &gate("H"), ToffoliPolicy::Auto, true, false).unwrap();
        worst = worst.max(equiv_dense(&s.circuit, &cnu_unitary(n, &gate("H")).unwrap(), 1e-9).unwrap().max_dev);
        stages.push(s.notes.len());
    }
    outcome(
        r.cnot + r.one_qubit == 7 && dev <= 1e-12 && worst <= 1e-9,
        format!(
            "7 basic ops; deviation from Toffoli x phase defect {dev:.1e}; substituted circuits n=7..10 dense max {worst:.2e} \
             (fallback stages taken per n: {stages:?}; licensed-only placement fails, see ledger)"
        ),
    )
}

fn c6_exp_counts() -> Outcome {
    let mut rows = Vec::new();
    let mut ok = true;
    for n in 3..=10 {
        let r = counts(&exp_synthesize(n, &gate("H"), true, true).unwrap().circuit);
        let p = formula_counts(n, Scheme::Exp).unwrap();
        let rel = |a: usize, b: i64| (a as f64 - b as f64).abs() / b as f64;
        ok &= rel(r.cnot, p.cnot) <= 0.15 && rel(r.one_qubit, p.one_qubit) <= 0.15;
        if (r.cnot as i64, r.one_qubit as i64) != (p.cnot, p.one_qubit) {
            rows.push(format!("n={n}: {}/{} vs {}/{}", r.cnot, r.one_qubit, p.cnot, p.one_qubit));
        }
    }
    let residual =
        if rows.is_empty() { "exact match n=3..10, no residual gate classes".to_string() } else { rows.join("; ") };
    outcome(ok, residual)
}

fn c7_poly_scaling() -> Outcome {
    let u = gate("H");
    let mut merged = Vec::new();
    let mut raw = Vec::new();
    for n in 10..=20usize {
        merged.push((n, counts(&poly_synthesize(n, &u, ToffoliPolicy::Auto, true, true).unwrap().circuit)));
        raw.push((n, counts(&poly_synthesize(n, &u, ToffoliPolicy::Auto, true, false).unwrap().circuit)));
    }
    let d2 = |rows: &[(usize, mcu_synth::circuit::CountReport)], f: fn(&mcu_synth::circuit::CountReport) -> usize| {
        let pts: Vec<(usize, i64)> = rows.iter().map(|(n, r)| (*n, f(r) as i64)).collect();
        second_differences(&pts).into_iter().filter(|p| p.0 >= 13).map(|p| p.1).collect::<Vec<_>>()
    };
    let (mc, mo) = (d2(&merged, |r| r.cnot), d2(&merged, |r| r.one_qubit));
    let (rc, ro) = (d2(&raw, |r| r.cnot), d2(&raw, |r| r.one_qubit));
    let worst = |rows: &[(usize, mcu_synth::circuit::CountReport)]| {
        rows.iter()
            .map(|(n, r)| {
                let p = formula_counts(*n, Scheme::Poly).unwrap();
                let a = (r.cnot as f64 / p.cnot as f64 - 1.0).abs();
                let b = (r.one_qubit as f64 / p.one_qubit as f64 - 1.0).abs();
                a.max(b)
            })
            .fold(0.0f64, f64::max)
    };
    let pass = mc.iter().all(|&d| d == 48) && mo.iter().all(|&d| d == 64) && worst(&merged) <= 0.10;
    outcome(
        pass,
        format!(
            "merged d2 cnot {mc:?} oneq {mo:?}, worst relative deviation {:.1}%; \
             unmerged d2 cnot {rc:?} oneq {ro:?}, worst {:.1}%",
            100.0 * worst(&merged),
            100.0 * worst(&raw)
        ),
    )
}

fn c8_crossover() -> Outcome {
    let t = Instant::now();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = mcu_synth::cli::run(
        ["mcu-synth", "table", "--n-min", "1", "--n-max", "20", "--format", "csv"],
        &mut out,
        &mut err,
    );
    let (fast, e) = within(t, 600);
    let out = String::from_utf8(out).unwrap();
    let err = String::from_utf8(err).unwrap();
    let rows = out.lines().count().saturating_sub(1);
    let lines: Vec<&str> = err.lines().filter(|l| l.starts_with("crossover")).collect();
    let formula10 = lines.len() == 2 && lines.iter().all(|l| l.contains("formulas n = 10"));
    let stated = lines.iter().all(|l| l.contains("stated n > 8"));
    outcome(
        code == 0 && rows == 40 && formula10 && stated && fast,
        format!("{rows} rows in {:.1}s (limit 600s); {}", e.as_secs_f64(), lines.join(" | ")),
    )
}

fn c9_properties() -> Outcome {
    let config = Config { cases: 1000, failure_persistence: None, ..Config::default() };
    let mut failures = Vec::new();
    let mut run = |name: &str, r: Result<(), String>| {
        if let Err(e) = r {
            failures.push(format!("{name}: {e}"));
        }
    };
    run("abc", TestRunner::new(config.clone()).run(&any::<u64>(), check_abc).map_err(|e| e.to_string()));
    run(
        "root",
        TestRunner::new(config.clone())
            .run(&(any::<u64>(), 0u32..=12), |(s, k)| check_root(s, k))
            .map_err(|e| e.to_string()),
    );
    run("gray", (1..=12).try_for_each(check_gray));
    run(
        "merge",
        TestRunner::new(config.clone())
            .run(&(mergeable_circuit(), any::<bool>()), |(c, a)| check_merge(&c, a))
            .map_err(|e| e.to_string()),
    );
    run(
        "json",
        TestRunner::new(config)
            .run(&(1usize..=8, 0usize..40, any::<u64>()), |(n, l, s)| check_json(n, l, s))
            .map_err(|e| e.to_string()),
    );
    outcome(
        failures.is_empty(),
        format!("1000 cases each: abc, roots, merge (n<=8), json; gray exhaustive beta<=12; failures {failures:?}"),
    )
}

fn c10_self_inverse() -> Outcome {
    let mut worst: f64 = 0.0;
    for name in ["X", "Z", "H"] {
        let u = gate(name);
        for n in 3..=9 {
            let id = DenseUnitary::identity(n).unwrap();
            let circuits: [Circuit; 2] = [
                exp_synthesize(n, &u, true, true).unwrap().circuit,
                poly_synthesize(n, &u, ToffoliPolicy::Auto, true, true).unwrap().circuit,
            ];
            for c in circuits {
                worst = worst.max(equiv_dense(&compose(&c, &c).unwrap(), &id, 1e-8).unwrap().max_dev);
            }
        }
    }
    outcome(worst <= 1e-8, format!("U in X, Z, H; n=3..9; both schemes; max deviation from I {worst:.2e}"))
}

fn main() {
    let criteria: [(&str, Criterion); 10] = [
        ("exponential correctness", c1_exp_correctness),
        ("polynomial correctness", c2_poly_correctness),
        ("Toffoli count law", c3_toffoli_law),
        ("lattice counts", c4_lattices),
        ("3-CNOT Toffoli", c5_cmps),
        ("exponential counts", c6_exp_counts),
        ("polynomial count scaling", c7_poly_scaling),
        ("crossover study", c8_crossover),
        ("property suites", c9_properties),
        ("self-inverse", c10_self_inverse),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.iter().any(|x| x == &id.to_string()) {
            continue;
        }
        let o = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            outcome(false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        if !o.pass {
            failed += 1;
        }
        println!("criterion {id:>2} {}: {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
