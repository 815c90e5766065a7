//! Ground truth for verification: definitional unitaries, dense and sparse
//! simulation, equivalence checks and an independent Toffoli-network
//! generator.
//!
//! Basis index convention: wire 1 is the most significant bit, wire `n`
//! the least significant.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::circuit::{Circuit, Gate, Wire};
use crate::error::{Error, Result};
use crate::qmath::{Unitary2, C64};

mod sparse;

pub use sparse::SparseState;

pub const DEFAULT_DENSE_CAP: usize = 12;

/// Environment variable overriding [`DEFAULT_DENSE_CAP`].
pub const DENSE_CAP_ENV: &str = "MCU_SYNTH_DENSE_CAP";

/// The largest wire count for which dense matrices are built.
pub fn dense_cap() -> usize {
    std::env::var(DENSE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&c: &usize| (1..=20).contains(&c))
        .unwrap_or(DEFAULT_DENSE_CAP)
}

fn check_dense(n: usize) -> Result<()> {
    let cap = dense_cap();
    if n == 0 || n > cap {
        return Err(Error::DenseCap { n, cap });
    }
    Ok(())
}

pub(crate) fn bit(n: usize, w: Wire) -> u64 {
    1u64 << (n - w)
}

/// A `2^n × 2^n` complex matrix, stored column by column.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseUnitary {
    n: usize,
    dim: usize,
    cols: Vec<C64>,
}

impl DenseUnitary {
    pub fn identity(n: usize) -> Result<DenseUnitary> {
        check_dense(n)?;
        let dim = 1usize << n;
        let mut cols = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            cols[i * dim + i] = C64::new(1.0, 0.0);
        }
        Ok(DenseUnitary { n, dim, cols })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.cols[col * self.dim + row]
    }

    pub fn column(&self, col: usize) -> &[C64] {
        &self.cols[col * self.dim..(col + 1) * self.dim]
    }

    fn column_mut(&mut self, col: usize) -> &mut [C64] {
        &mut self.cols[col * self.dim..(col + 1) * self.dim]
    }

    pub fn max_abs_diff(&self, other: &DenseUnitary) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::WidthMismatch { left: self.n, right: other.n });
        }
        Ok(self.cols.iter().zip(&other.cols).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    pub fn adjoint(&self) -> DenseUnitary {
        let mut out = self.clone();
        for r in 0..self.dim {
            for c in 0..self.dim {
                out.cols[c * self.dim + r] = self.entry(c, r).conj();
            }
        }
        out
    }

    /// `‖M†M − I‖_max`.
    pub fn unitarity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let dot: C64 = self.column(i).iter().zip(self.column(j)).map(|(a, b)| a.conj() * b).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((dot - expect).norm());
            }
        }
        dev
    }
}

/// `C^n(U)`: identity except `U` on the last two basis states.
///
/// ```
/// use mcu_synth::oracle::cnu_unitary;
/// use mcu_synth::qmath::named_gate;
/// let m = cnu_unitary(3, &named_gate("Z", None).unwrap()).unwrap();
/// assert_eq!(m.entry(7, 7).re, -1.0);
/// assert_eq!(m.entry(6, 6).re, 1.0);
/// ```
pub fn cnu_unitary(n: usize, u: &Unitary2) -> Result<DenseUnitary> {
    let mut m = DenseUnitary::identity(n)?;
    let d = m.dim;
    for c in 0..2 {
        for r in 0..2 {
            m.cols[(d - 2 + c) * d + d - 2 + r] = u.entry(r, c);
        }
    }
    Ok(m)
}

fn check_disjoint(n: usize, wires: &[Wire]) -> Result<()> {
    for (i, &w) in wires.iter().enumerate() {
        if w == 0 || w > n {
            return Err(Error::Wires(format!("wire {w} outside 1..={n}")));
        }
        if wires[..i].contains(&w) {
            return Err(Error::Wires(format!("wire {w} used twice")));
        }
    }
    Ok(())
}

/// `Λ^m(X)`: flips `target` when every control is 1.
pub fn lambda_unitary(n: usize, controls: &[Wire], target: Wire) -> Result<DenseUnitary> {
    let mut all = controls.to_vec();
    all.push(target);
    check_disjoint(n, &all)?;
    let mut m = DenseUnitary::identity(n)?;
    let mask = controls.iter().fold(0u64, |acc, &w| acc | bit(n, w));
    let t = bit(n, target);
    for x in 0..m.dim as u64 {
        if x & mask == mask {
            let col = m.column_mut(x as usize);
            col[x as usize] = C64::new(0.0, 0.0);
            col[(x ^ t) as usize] = C64::new(1.0, 0.0);
        }
    }
    Ok(m)
}

/// The circuit's full matrix, including its global phase.
pub fn circuit_unitary(c: &Circuit) -> Result<DenseUnitary> {
    let mut m = DenseUnitary::identity(c.n())?;
    let mut s = SparseState::new(c.n());
    for x in 0..m.dim {
        s.reset_basis(x as u64);
        s.run(c);
        let col = m.column_mut(x);
        col.fill(C64::new(0.0, 0.0));
        for &(k, a) in s.entries() {
            col[k as usize] = a;
        }
    }
    Ok(m)
}

/// A normalized state on `n` wires.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn basis(n: usize, index: u64) -> StateVector {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[index as usize] = C64::new(1.0, 0.0);
        StateVector { n, amps }
    }

    pub fn from_amplitudes(n: usize, amps: Vec<C64>) -> Result<StateVector> {
        if amps.len() != 1 << n {
            return Err(Error::WidthMismatch { left: 1 << n, right: amps.len() });
        }
        let s = StateVector { n, amps };
        let norm = s.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Schema(format!("state norm {norm} is not 1")));
        }
        Ok(s)
    }

    /// Gaussian amplitudes, normalized; deterministic in `seed`.
    pub fn random(n: usize, seed: u64) -> StateVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        StateVector { n, amps: random_amplitudes(&mut rng, 1 << n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Applies `C^n(u)` in place.
    pub fn apply_cnu(&mut self, u: &Unitary2) {
        let d = self.amps.len();
        let (a0, a1) = if d == 2 { (0, 1) } else { (d - 2, d - 1) };
        let (x0, x1) = (self.amps[a0], self.amps[a1]);
        self.amps[a0] = u.entry(0, 0) * x0 + u.entry(0, 1) * x1;
        self.amps[a1] = u.entry(1, 0) * x0 + u.entry(1, 1) * x1;
    }

    fn apply_gate(&mut self, g: &Gate) {
        let n = self.n;
        match g {
            Gate::OneQubit { target, u, .. } => apply_controlled(&mut self.amps, 0, bit(n, *target), u),
            Gate::CNot { control, target } => apply_x(&mut self.amps, bit(n, *control), bit(n, *target)),
            Gate::Toffoli { c1, c2, target } => apply_x(&mut self.amps, bit(n, *c1) | bit(n, *c2), bit(n, *target)),
            Gate::ControlledU { control, target, u, .. } => {
                apply_controlled(&mut self.amps, bit(n, *control), bit(n, *target), u)
            }
        }
    }
}

fn random_amplitudes(rng: &mut ChaCha8Rng, len: usize) -> Vec<C64> {
    let mut amps: Vec<C64> =
        (0..len).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    amps
}

/// Calls `f(i0, i1)` for every index pair differing only in bit `t`.
#[inline]
fn for_pairs(len: usize, t: u64, mut f: impl FnMut(usize, usize)) {
    let t = t as usize;
    let low = t - 1;
    for k in 0..len / 2 {
        let i = ((k & !low) << 1) | (k & low);
        f(i, i | t);
    }
}

fn apply_x(amps: &mut [C64], ctrl: u64, t: u64) {
    let ctrl = ctrl as usize;
    for_pairs(amps.len(), t, |i, j| {
        if i & ctrl == ctrl {
            amps.swap(i, j);
        }
    });
}

fn apply_controlled(amps: &mut [C64], ctrl: u64, t: u64, u: &Unitary2) {
    let ctrl = ctrl as usize;
    let (m00, m01, m10, m11) = (u.entry(0, 0), u.entry(0, 1), u.entry(1, 0), u.entry(1, 1));
    if u.is_diagonal(0.0) {
        for_pairs(amps.len(), t, |i, j| {
            if i & ctrl == ctrl {
                amps[i] *= m00;
                amps[j] *= m11;
            }
        });
    } else {
        for_pairs(amps.len(), t, |i, j| {
            if i & ctrl == ctrl {
                let (a, b) = (amps[i], amps[j]);
                amps[i] = m00 * a + m01 * b;
                amps[j] = m10 * a + m11 * b;
            }
        });
    }
}

/// Runs the circuit on a dense state, including the global phase.
pub fn apply_circuit(c: &Circuit, s: &StateVector) -> Result<StateVector> {
    if c.n() != s.n {
        return Err(Error::WidthMismatch { left: c.n(), right: s.n });
    }
    let mut out = s.clone();
    for g in c.ops() {
        out.apply_gate(g);
    }
    if c.global_phase() != 0.0 {
        let p = C64::from_polar(1.0, c.global_phase());
        out.amps.iter_mut().for_each(|a| *a *= p);
    }
    Ok(out)
}

/// Outcome of an equivalence check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Equivalence {
    pub equal: bool,
    pub max_dev: f64,
}

impl Equivalence {
    fn from_dev(max_dev: f64, tol: f64) -> Equivalence {
        Equivalence { equal: max_dev <= tol, max_dev }
    }
}

/// Exact (phase-sensitive) comparison of the circuit's matrix with `m`,
/// one column at a time.
pub fn equiv_dense(c: &Circuit, m: &DenseUnitary, tol: f64) -> Result<Equivalence> {
    if c.n() != m.n {
        return Err(Error::WidthMismatch { left: c.n(), right: m.n });
    }
    let mut s = SparseState::new(c.n());
    let mut dev: f64 = 0.0;
    for x in 0..m.dim {
        s.reset_basis(x as u64);
        s.run(c);
        dev = dev.max(s.max_abs_diff_dense(m.column(x)));
    }
    Ok(Equivalence::from_dev(dev, tol))
}

/// `C^n(u)` applied to basis state `x`, as sorted sparse entries.
fn cnu_basis_image(n: usize, u: &Unitary2, x: u64) -> Vec<(u64, C64)> {
    let controls = (1u64 << n) - 2;
    if x & controls == controls {
        let b = (x & 1) as usize;
        let base = x & !1;
        vec![(base, u.entry(0, b)), (base | 1, u.entry(1, b))]
    } else {
        vec![(x, C64::new(1.0, 0.0))]
    }
}

/// Exhaustive comparison against `C^n(u)` over all `2^n` basis columns,
/// without building any matrix.
pub fn equiv_cnu_exhaustive(c: &Circuit, n: usize, u: &Unitary2, tol: f64) -> Result<Equivalence> {
    if c.n() != n {
        return Err(Error::WidthMismatch { left: c.n(), right: n });
    }
    if n > 26 {
        return Err(Error::OutOfRange { what: "wire count", value: n as i64, allowed: "1..=26".into() });
    }
    let mut s = SparseState::new(n);
    let mut dev: f64 = 0.0;
    for x in 0..1u64 << n {
        s.reset_basis(x);
        s.run(c);
        dev = dev.max(s.max_abs_diff_sparse(&cnu_basis_image(n, u, x)));
    }
    Ok(Equivalence::from_dev(dev, tol))
}

/// Settings for [`equiv_sampled_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleOptions {
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    /// Total `gates × 2^n` work allowed for random superpositions over the
    /// full register. Trials past the budget are spread over a random
    /// 4-wire subcube instead.
    pub dense_budget: u64,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions { trials: 32, seed: 0, tol: 1e-8, dense_budget: 1 << 28 }
    }
}

/// Sampled comparison against `C^n(u)`: the four basis states the gate can
/// move, `trials` random basis states and `trials` random superpositions.
pub fn equiv_sampled(c: &Circuit, n: usize, u: &Unitary2, trials: usize, seed: u64, tol: f64) -> Result<Equivalence> {
    equiv_sampled_with(c, n, u, &SampleOptions { trials, seed, tol, ..SampleOptions::default() })
}

pub fn equiv_sampled_with(c: &Circuit, n: usize, u: &Unitary2, opts: &SampleOptions) -> Result<Equivalence> {
    if c.n() != n {
        return Err(Error::WidthMismatch { left: c.n(), right: n });
    }
    if n == 0 || n > 26 {
        return Err(Error::OutOfRange { what: "wire count", value: n as i64, allowed: "1..=26".into() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let dim = 1u64 << n;
    let mut dev: f64 = 0.0;
    let mut s = SparseState::new(n);

    let top = if n >= 2 { ((1u64 << (n - 2)) - 1) << 2 } else { 0 };
    let mut basis: Vec<u64> = (0..dim.min(4)).map(|b| top | b).collect();
    basis.extend((0..opts.trials).map(|_| rng.random_range(0..dim)));
    for x in basis {
        s.reset_basis(x);
        s.run(c);
        dev = dev.max(s.max_abs_diff_sparse(&cnu_basis_image(n, u, x)));
    }

    let per_trial = (c.len() as u64).max(1).saturating_mul(dim);
    let dense_trials = opts.dense_budget / per_trial;
    for trial in 0..opts.trials as u64 {
        if trial < dense_trials {
            let input = StateVector { n, amps: random_amplitudes(&mut rng, dim as usize) };
            let got = apply_circuit(c, &input)?;
            let mut want = input;
            want.apply_cnu(u);
            dev = dev.max(got.max_abs_diff(&want));
        } else {
            let input = random_subcube(&mut rng, n);
            s.reset_entries(&input);
            s.run(c);
            let mut want = SparseState::new(n);
            want.reset_entries(&input);
            want.apply_cnu(u);
            dev = dev.max(s.max_abs_diff_sparse(want.entries()));
        }
    }
    Ok(Equivalence::from_dev(dev, opts.tol))
}

/// A random state supported on 16 basis states that agree outside four
/// random wires. Half the time the fixed wires are all 1, so the subcube
/// reaches the states `C^n(U)` acts on.
fn random_subcube(rng: &mut ChaCha8Rng, n: usize) -> Vec<(u64, C64)> {
    let free_count = n.min(4);
    let mut free: Vec<Wire> = Vec::with_capacity(free_count);
    while free.len() < free_count {
        let w = rng.random_range(1..=n);
        if !free.contains(&w) {
            free.push(w);
        }
    }
    let free_mask = free.iter().fold(0u64, |m, &w| m | bit(n, w));
    let base =
        if rng.random_bool(0.5) { ((1u64 << n) - 1) & !free_mask } else { rng.random_range(0..1u64 << n) & !free_mask };
    let amps = random_amplitudes(rng, 1 << free_count);
    let mut entries: Vec<(u64, C64)> = amps
        .into_iter()
        .enumerate()
        .map(|(k, a)| {
            let x = free.iter().enumerate().fold(base, |x, (i, &w)| if (k >> i) & 1 == 1 { x | bit(n, w) } else { x });
            (x, a)
        })
        .collect();
    entries.sort_unstable_by_key(|e| e.0);
    entries
}

/// How [`verify_cnu`] checks a circuit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    /// Exhaustive check up to this many wires, sampled above.
    pub exhaustive_max_n: usize,
    pub exhaustive_tol: f64,
    pub sampled: SampleOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { exhaustive_max_n: 11, exhaustive_tol: 1e-9, sampled: SampleOptions::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMethod {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Verification {
    pub method: VerifyMethod,
    pub result: Equivalence,
}

/// Checks that `c` implements `C^n(u)`, exhaustively for small `n` and by
/// sampling above.
pub fn verify_cnu(c: &Circuit, n: usize, u: &Unitary2, opts: &VerifyOptions) -> Result<Verification> {
    if n <= opts.exhaustive_max_n {
        Ok(Verification {
            method: VerifyMethod::Exhaustive,
            result: equiv_cnu_exhaustive(c, n, u, opts.exhaustive_tol)?,
        })
    } else {
        Ok(Verification { method: VerifyMethod::Sampled, result: equiv_sampled_with(c, n, u, &opts.sampled)? })
    }
}

/// `Λ^m(X)` from Toffolis and `m − 2` borrowed work wires: a descending
/// chain `T(c_m, w_{m−2} → target)`, …, `T(c_1, c_2 → w_1)`, the mirrored
/// ascent without its end points, and the whole vee once more.
/// Work wires may hold any value and are restored.
pub fn reference_lambda_network(n: usize, controls: &[Wire], target: Wire, works: &[Wire]) -> Result<Circuit> {
    let m = controls.len();
    if m < 3 {
        return Err(Error::Wires(format!("need at least 3 controls, got {m}")));
    }
    if works.len() < m - 2 {
        return Err(Error::Wires(format!("{m} controls need {} work wires, got {}", m - 2, works.len())));
    }
    let works = &works[..m - 2];
    let mut all: Vec<Wire> = controls.to_vec();
    all.push(target);
    all.extend_from_slice(works);
    check_disjoint(n, &all)?;

    // chain[0] targets `target`; chain[m−2] is T(c_1, c_2 → w_1).
    let mut chain = Vec::with_capacity(m - 1);
    chain.push(Gate::ccx(controls[m - 1], works[m - 3], target));
    for i in (1..m - 2).rev() {
        chain.push(Gate::ccx(controls[i + 1], works[i - 1], works[i]));
    }
    chain.push(Gate::ccx(controls[0], controls[1], works[0]));

    let mut vee = chain.clone();
    vee.extend(chain[1..m - 2].iter().rev().cloned());
    let mut ops = vee.clone();
    ops.extend(vee);
    Ok(Circuit::from_gates_unchecked(n, ops, 0.0))
}

/// A random circuit for tests: one-qubit gates and CNOTs, plus
/// controlled-U and Toffoli gates unless `basic_only`.
#[doc(hidden)]
pub fn random_circuit(n: usize, len: usize, seed: u64, basic_only: bool) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new(n);
    let pick = |rng: &mut ChaCha8Rng, k: usize| -> Vec<Wire> {
        let mut w: Vec<Wire> = Vec::new();
        while w.len() < k {
            let x = rng.random_range(1..=n);
            if !w.contains(&x) {
                w.push(x);
            }
        }
        w
    };
    for _ in 0..len {
        let kinds = match (n, basic_only) {
            (1, _) => 1,
            (_, true) => 2,
            (2, false) => 3,
            _ => 4,
        };
        let kind = rng.random_range(0..kinds);
        let u = crate::qmath::random_unitary(rng.random());
        let g = match kind {
            0 => Gate::u(pick(&mut rng, 1)[0], u, "U"),
            1 => {
                let w = pick(&mut rng, 2);
                Gate::cx(w[0], w[1])
            }
            2 => {
                let w = pick(&mut rng, 2);
                Gate::cu(w[0], w[1], u, "V")
            }
            _ => {
                let w = pick(&mut rng, 3);
                Gate::ccx(w[0], w[1], w[2])
            }
        };
        c.push_unchecked(g);
    }
    c.set_global_phase(rng.random_range(-PI..PI));
    c
}
