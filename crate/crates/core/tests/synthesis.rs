use mcu_synth::circuit::{counts, dagger, exact_toffoli, merge_pass, Circuit};
use mcu_synth::exp_synth::{exp_synthesize, MAX_N};
use mcu_synth::oracle::{
    circuit_unitary, cnu_unitary, equiv_dense, lambda_unitary, reference_lambda_network, DenseUnitary,
};
use mcu_synth::poly_synth::{c6_base, poly_blocks, poly_synthesize, ToffoliPolicy};
use mcu_synth::qmath::{hadamard, pauli_x, random_unitary, Unitary2};
use mcu_synth::Error;

fn dense_ok(c: &Circuit, n: usize, u: &Unitary2) -> bool {
    equiv_dense(c, &cnu_unitary(n, u).unwrap(), 1e-9).unwrap().equal
}

#[test]
fn exp_all_modes() {
    let u = random_unitary(21);
    for n in 1..=7 {
        for (flatten, merge) in [(false, false), (false, true), (true, false), (true, true)] {
            let s = exp_synthesize(n, &u, flatten, merge).unwrap();
            assert!(dense_ok(&s.circuit, n, &u), "n={n} flatten={flatten} merge={merge}");
            assert_eq!(s.circuit.is_basic(), flatten || n == 1);
        }
    }
}

#[test]
fn exp_limits() {
    assert!(matches!(exp_synthesize(0, &hadamard(), true, true), Err(Error::OutOfRange { .. })));
    assert!(exp_synthesize(MAX_N + 1, &hadamard(), true, true).is_err());
}

#[test]
fn poly_dense() {
    let u = random_unitary(4);
    for policy in [ToffoliPolicy::Exact, ToffoliPolicy::Cmps, ToffoliPolicy::Auto] {
        let s = poly_synthesize(7, &u, policy, true, true).unwrap();
        assert!(dense_ok(&s.circuit, 7, &u), "{policy:?}");
    }
    let blocks = poly_synthesize(8, &u, ToffoliPolicy::Auto, false, false).unwrap();
    assert!(dense_ok(&blocks.circuit, 8, &u));
    assert_eq!(counts(&blocks.circuit), counts(&poly_blocks(8, &u).unwrap()));
}

#[test]
fn exact_lowering_needs_no_fallback() {
    let s = poly_synthesize(8, &pauli_x(), ToffoliPolicy::Exact, true, false).unwrap();
    assert!(s.notes.is_empty(), "{:?}", s.notes);
    assert_eq!(counts(&s.circuit).toffoli, 0);
}

#[test]
fn reference_networks() {
    for m in 3..=5 {
        let n = 2 * m - 1;
        let controls: Vec<usize> = (1..=m).collect();
        let works: Vec<usize> = (m + 2..=n).collect();
        let c = reference_lambda_network(n, &controls, m + 1, &works).unwrap();
        assert_eq!(c.len(), 4 * (m - 2));
        assert!(equiv_dense(&c, &lambda_unitary(n, &controls, m + 1).unwrap(), 1e-12).unwrap().equal);

        // Relabelled wires give the relabelled gate.
        let controls: Vec<usize> = (0..m).map(|i| n - i).collect();
        let works: Vec<usize> = (1..m - 1).collect();
        let c = reference_lambda_network(n, &controls, m - 1, &works).unwrap();
        assert!(equiv_dense(&c, &lambda_unitary(n, &controls, m - 1).unwrap(), 1e-12).unwrap().equal);
    }
    assert!(reference_lambda_network(5, &[1, 2], 3, &[4]).is_err());
}

#[test]
fn c6_base_networks() {
    let w = random_unitary(8);
    assert!(dense_ok(&c6_base(6, &w).unwrap(), 6, &w));

    let id = c6_base(8, &Unitary2::IDENTITY).unwrap();
    assert!(equiv_dense(&id, &DenseUnitary::identity(8).unwrap(), 1e-10).unwrap().equal);
}

#[test]
fn toffoli_inverse() {
    let t = exact_toffoli(4, 2, 4, 1).unwrap();
    let both = mcu_synth::circuit::compose(&t, &dagger(&t)).unwrap();
    assert!(equiv_dense(&both, &DenseUnitary::identity(4).unwrap(), 1e-12).unwrap().equal);
    let m = circuit_unitary(&t).unwrap();
    assert!(m.max_abs_diff(&lambda_unitary(4, &[2, 4], 1).unwrap()).unwrap() < 1e-12);
    assert_eq!(merge_pass(&both, true).unwrap().len(), 0);
}
