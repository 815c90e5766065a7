//! Property checks shared by the proptest suite and the acceptance run.
#![allow(dead_code)]

use mcu_synth::circuit::{emit_json, merge_pass, parse_json, Circuit, Gate};
use mcu_synth::graycode::{gamma, gray_sequence};
use mcu_synth::oracle::{circuit_unitary, cnu_unitary, random_circuit};
use mcu_synth::qmath::{abc_decompose, hadamard, named_gate, phase, principal_root, random_unitary, rx, Unitary2};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub fn gate(name: &str) -> Unitary2 {
    named_gate(name, None).unwrap()
}

/// Gates drawn from a small alphabet so that the merge rules fire often.
fn mergeable_gate(n: usize) -> impl Strategy<Value = Gate> {
    (0..6u8, 1..=n, 1..=n, -4.0..4.0f64, any::<u64>()).prop_map(move |(kind, a, b, t, seed)| match kind {
        0 => Gate::u(a, phase(t), "P"),
        1 => Gate::u(a, rx(t), "Rx"),
        2 => Gate::u(a, hadamard(), "H"),
        3 => Gate::u(a, random_unitary(seed), "U"),
        _ if a != b => Gate::cx(a, b),
        _ => Gate::u(a, phase(std::f64::consts::FRAC_PI_4), "T"),
    })
}

pub fn mergeable_circuit() -> impl Strategy<Value = Circuit> {
    (1..=8usize).prop_flat_map(|n| {
        (Just(n), prop::collection::vec(mergeable_gate(n), 0..48), -3.0..3.0f64).prop_map(|(n, ops, ph)| {
            let mut c = Circuit::from_gates(n, ops).unwrap();
            c.set_global_phase(ph);
            c
        })
    })
}

pub fn check_abc(seed: u64) -> Result<(), TestCaseError> {
    let v = random_unitary(seed);
    let p = abc_decompose(&v);
    prop_assert!(p.def_deviation() <= 1e-10, "DEF = I off by {}", p.def_deviation());
    prop_assert!(p.reconstruct().max_abs_diff(&v) <= 1e-10);
    let c = Circuit::from_gates(
        2,
        [
            Gate::u(2, p.f, "F"),
            Gate::cx(1, 2),
            Gate::u(2, p.e, "E"),
            Gate::cx(1, 2),
            Gate::u(2, p.d, "D"),
            Gate::u(1, p.g(), "G"),
        ],
    )
    .unwrap();
    let dev = circuit_unitary(&c).unwrap().max_abs_diff(&cnu_unitary(2, &v).unwrap()).unwrap();
    prop_assert!(dev <= 1e-10, "controlled form off by {dev}");
    Ok(())
}

pub fn check_root(seed: u64, k: u32) -> Result<(), TestCaseError> {
    let u = random_unitary(seed);
    let v = principal_root(&u, k);
    let dev = v.pow2(k).max_abs_diff(&u);
    prop_assert!(dev <= 1e-9, "V^(2^{k}) off by {dev}");
    Ok(())
}

pub fn check_merge(c: &Circuit, aggressive: bool) -> Result<(), TestCaseError> {
    let m = merge_pass(c, aggressive).unwrap();
    prop_assert!(m.len() <= c.len());
    let dev = circuit_unitary(&m).unwrap().max_abs_diff(&circuit_unitary(c).unwrap()).unwrap();
    prop_assert!(dev <= 1e-9, "merge changed the unitary by {dev}");
    Ok(())
}

pub fn check_json(n: usize, len: usize, seed: u64) -> Result<(), TestCaseError> {
    let c = random_circuit(n, len, seed, false);
    let back = parse_json(&emit_json(&c).unwrap()).unwrap();
    prop_assert_eq!(back, c);
    Ok(())
}

/// Consecutive codes, cyclically, differ in exactly the bit `gamma` names.
pub fn check_gray(beta: u32) -> Result<(), String> {
    let seq = gray_sequence(beta).map_err(|e| e.to_string())?;
    let len = seq.codes.len();
    for a in 1..=len {
        let diff = seq.codes[a - 1] ^ seq.codes[a % len];
        let g = gamma(a as u32, beta).map_err(|e| e.to_string())?;
        if diff.count_ones() != 1 || diff != 1 << (beta - g) {
            return Err(format!("beta={beta} alpha={a}: diff {diff:b}, gamma {g}"));
        }
    }
    Ok(())
}
