//! The polynomial construction: `O(n²)` CNOTs via Toffoli lattices.
//!
//! Level `k` flips wire `k − 1` by the AND of wires `1..k−2` with the
//! network `T_k = L1 L2 L1 L2`, using the other wires as borrowed work
//! space. Conjugating `C(k−1 → n, V^{±1})` by `T_k` peels one control off
//! at a time: levels `7..n` form a cascade on top of a fixed network for
//! the first six wires.
//!
//! Toffolis are lowered either exactly or with the 3-CNOT relative-phase
//! network; see [`ToffoliPolicy`].

use std::fmt;

pub use crate::circuit::{cmps_toffoli, exact_toffoli};
use crate::circuit::{expand_intermediates, merge_pass, Circuit, Gate, ToffoliKind, ToffoliMode, Wire};
use crate::error::{Error, Result};
use crate::exp_synth::exp_synthesize_with;
use crate::oracle::{verify_cnu, VerifyOptions};
use crate::qmath::{principal_root, Unitary2};
use crate::Synthesis;

/// Largest supported wire count.
pub const MAX_N: usize = 60;

/// Toffolis of the six-wire base network (1-based, in emission order)
/// whose relative phase cancels inside it.
pub const C6_LICENSED: [usize; 8] = [4, 6, 8, 10, 15, 20, 25, 30];

/// Sizes and index periods of level `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LatticeParams {
    pub k: usize,
    /// Controls of the first half: wires `1..=m1`.
    pub m1: usize,
    /// Controls of the second half: wires `m1+1..=k−2` and `k`.
    pub m2: usize,
    /// Period of the first lattice's index stream.
    pub d: usize,
    /// Period of the second lattice's index stream.
    pub d2: usize,
    pub i0: usize,
    pub j0: usize,
}

pub fn lattice_params(k: usize) -> Result<LatticeParams> {
    let (m1, m2) = split_m(k)?;
    Ok(LatticeParams { k, m1, m2, d: 2 * m1 - 4, d2: (2 * k).saturating_sub(2 * m1 + 6), i0: m1 - 1, j0: k - m1 - 2 })
}

/// `(⌊k/2⌋, k − ⌊k/2⌋ − 1)`.
///
/// ```
/// use mcu_synth::poly_synth::split_m;
/// assert_eq!(split_m(8).unwrap(), (4, 3));
/// assert_eq!(split_m(9).unwrap(), (4, 4));
/// ```
pub fn split_m(k: usize) -> Result<(usize, usize)> {
    if k < 4 {
        return Err(Error::OutOfRange { what: "level", value: k as i64, allowed: "4..".into() });
    }
    Ok((k / 2, k - k / 2 - 1))
}

fn index_error(what: &'static str, i: usize, max: usize) -> Error {
    Error::OutOfRange { what, value: i as i64, allowed: format!("1..={max}") }
}

/// Depth offset of Toffoli `i` in the first lattice of level `k`:
/// `|((i−1) mod d) + 1 − i0|`.
///
/// ```
/// use mcu_synth::poly_synth::dev_f;
/// assert_eq!([1, 2, 3, 4].map(|i| dev_f(i, 8).unwrap()), [2, 1, 0, 1]);
/// ```
pub fn dev_f(i: usize, k: usize) -> Result<usize> {
    let p = lattice_params(k)?;
    if p.m1 < 3 || i == 0 || i > 2 * p.d {
        return Err(index_error("lattice index", i, 2 * p.d));
    }
    Ok(((i - 1) % p.d + 1).abs_diff(p.i0))
}

/// Depth offset of Toffoli `j` in the second lattice of level `k`.
pub fn dev_g(j: usize, k: usize) -> Result<usize> {
    let p = lattice_params(k)?;
    if p.m2 < 3 || j == 0 || j > 2 * p.d2 {
        return Err(index_error("lattice index", j, 2 * p.d2));
    }
    Ok(((j - 1) % p.d2 + 1).abs_diff(p.j0))
}

/// Toffoli controls and target.
pub type Triple = (Wire, Wire, Wire);

fn m1_triples(k: usize) -> Vec<Triple> {
    let p = lattice_params(k).expect("k ≥ 6");
    let h = p.m1;
    (1..=2 * p.d)
        .map(|i| {
            let f = dev_f(i, k).expect("in range");
            let b = if i == p.i0 || i == p.i0 + p.d { 1 } else { 1 + k - h + f };
            (2 + f, b, k - h + 2 + f)
        })
        .collect()
}

fn m2_triples(k: usize) -> Vec<Triple> {
    let p = lattice_params(k).expect("k ≥ 7");
    let h = p.m1;
    (1..=2 * p.d2)
        .map(|j| {
            let g = dev_g(j, k).expect("in range");
            // 2h − 2k + 3 + g ≤ 0 here, so add before subtracting.
            let a = if j == p.j0 || j == p.j0 + p.d2 { k } else { (2 * h + 3 + g) - k };
            let c = if j == 1 || j == 2 * k - 2 * h - 5 { k - 1 } else { (2 * h + 4 + g) - k };
            (a, k - 2 - g, c)
        })
        .collect()
}

fn toffolis(k: usize, t: Vec<Triple>) -> Circuit {
    Circuit::from_gates_unchecked(k, t.into_iter().map(|(a, b, c)| Gate::ccx(a, b, c)).collect(), 0.0)
}

/// `Λ^{m1}(1..m1 → k)` on `k ≥ 6` wires, borrowing `m1+1..k−1`.
///
/// ```
/// use mcu_synth::poly_synth::lambda_m1_net;
/// use mcu_synth::circuit::Gate;
/// let c = lambda_m1_net(6).unwrap();
/// assert_eq!(c.ops(), &[Gate::ccx(3, 5, 6), Gate::ccx(2, 1, 5), Gate::ccx(3, 5, 6), Gate::ccx(2, 1, 5)]);
/// ```
pub fn lambda_m1_net(k: usize) -> Result<Circuit> {
    if k < 6 {
        return Err(Error::OutOfRange { what: "level", value: k as i64, allowed: "6..".into() });
    }
    Ok(toffolis(k, m1_triples(k)))
}

/// `Λ^{m2}({m1+1..k−2} ∪ {k} → k−1)` on `k ≥ 7` wires, borrowing low
/// wires.
pub fn lambda_m2_net(k: usize) -> Result<Circuit> {
    if k < 7 {
        return Err(Error::OutOfRange { what: "level", value: k as i64, allowed: "7..".into() });
    }
    Ok(toffolis(k, m2_triples(k)))
}

fn halves(k: usize) -> (Vec<Triple>, Vec<Triple>) {
    if k == 4 {
        return (Vec::new(), vec![(2, 1, 3)]);
    }
    let p = lattice_params(k).expect("k ≥ 4");
    let l1 = if p.m1 >= 3 { m1_triples(k) } else { vec![(2, 1, k)] };
    let l2 = if p.m2 >= 3 { m2_triples(k) } else { vec![(k, k - 2, k - 1)] };
    (l1, l2)
}

/// Toffolis of `T_k` in order. `k = 4` is a single gate.
pub fn t_level_triples(k: usize) -> Vec<Triple> {
    let (l1, l2) = halves(k);
    if k == 4 {
        return l2;
    }
    [&l1, &l2, &l1, &l2].into_iter().flatten().copied().collect()
}

/// `T_k` on `n` wires: flips `k − 1` by the AND of `1..k−2` and leaves
/// every other wire as it was.
pub fn t_level(k: usize, n: usize) -> Result<Circuit> {
    if k < 4 || k > n {
        return Err(Error::OutOfRange { what: "level", value: k as i64, allowed: format!("4..={n}") });
    }
    let ops = t_level_triples(k).into_iter().map(|(a, b, c)| Gate::ccx(a, b, c)).collect();
    Ok(Circuit::from_gates_unchecked(n, ops, 0.0))
}

/// Where a Toffoli sits in the full network.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct ToffoliSite {
    /// 1-based emission index.
    index: usize,
    level: usize,
    in_base: bool,
    triple: Triple,
}

struct Builder {
    n: usize,
    ops: Vec<Gate>,
    sites: Vec<ToffoliSite>,
    in_base: bool,
}

fn emit_level(b: &mut Builder, k: usize, w: &Unitary2, wl: &'static str) {
    let t = t_level_triples(k);
    let n = b.n;
    for inverse in [true, false] {
        for &(x, y, z) in &t {
            b.sites.push(ToffoliSite { index: b.sites.len() + 1, level: k, in_base: b.in_base, triple: (x, y, z) });
            b.ops.push(Gate::ccx(x, y, z));
        }
        b.ops.push(if inverse {
            Gate::cu(k - 1, n, w.adjoint(), format!("{wl}†"))
        } else {
            Gate::cu(k - 1, n, *w, wl)
        });
    }
}

fn base_into(b: &mut Builder, w: &Unitary2) {
    let n = b.n;
    let roots: Vec<Unitary2> = (0..=4).map(|j| principal_root(w, j)).collect();
    let w4 = roots[4];
    b.ops.extend([
        Gate::cu(2, n, w4, "W4"),
        Gate::cx(1, 2),
        Gate::cu(2, n, w4.adjoint(), "W4†"),
        Gate::cx(1, 2),
        Gate::cu(1, n, w4, "W4"),
    ]);
    b.in_base = true;
    for (k, j, name) in [(4, 3, "W3"), (5, 2, "W2"), (6, 1, "W1")] {
        emit_level(b, k, &roots[j], name);
    }
    b.in_base = false;
}

/// `C^6(W)` on wires `1..5` and target `n`, using wire 6 as a work wire
/// when `n > 6`: 30 Toffolis, 9 controlled gates and 2 CNOTs.
pub fn c6_base(n: usize, w: &Unitary2) -> Result<Circuit> {
    if !(6..=MAX_N).contains(&n) {
        return Err(Error::OutOfRange { what: "wire count", value: n as i64, allowed: format!("6..={MAX_N}") });
    }
    let mut b = Builder { n, ops: Vec::new(), sites: Vec::new(), in_base: false };
    base_into(&mut b, w);
    Ok(Circuit::from_gates_unchecked(n, b.ops, 0.0))
}

fn build(n: usize, u: &Unitary2) -> Builder {
    let mut b = Builder { n, ops: Vec::new(), sites: Vec::new(), in_base: false };
    base_into(&mut b, &principal_root(u, (n - 6) as u32));
    for k in 7..=n {
        emit_level(&mut b, k, &principal_root(u, (n - k + 1) as u32), "V");
    }
    b
}

/// Intermediate circuit for `n ≥ 6`: Toffolis, controlled gates, CNOTs.
pub fn poly_blocks(n: usize, u: &Unitary2) -> Result<Circuit> {
    check_poly_n(n)?;
    let b = build(n, u);
    Ok(Circuit::from_gates_unchecked(n, b.ops, 0.0))
}

fn check_poly_n(n: usize) -> Result<()> {
    if (6..=MAX_N).contains(&n) {
        Ok(())
    } else {
        Err(Error::OutOfRange { what: "wire count", value: n as i64, allowed: format!("6..={MAX_N}") })
    }
}

/// Which Toffolis get the 3-CNOT network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum ToffoliPolicy {
    /// Every Toffoli exact.
    Exact,
    /// Every Toffoli 3-CNOT.
    Cmps,
    /// The cascade plus [`C6_LICENSED`].
    #[default]
    Auto,
}

/// One concrete choice of 3-CNOT Toffolis, tried in order until one
/// verifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpsStage {
    All,
    Licensed,
    /// [`CmpsStage::Licensed`] with Toffolis that target the output wire
    /// made exact.
    LicensedExceptTarget,
    BaseOnly,
    None,
}

impl fmt::Display for CmpsStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CmpsStage::All => "all Toffolis 3-CNOT",
            CmpsStage::Licensed => "cascade and licensed base Toffolis 3-CNOT",
            CmpsStage::LicensedExceptTarget => "cascade and licensed base Toffolis 3-CNOT, output-target ones exact",
            CmpsStage::BaseOnly => "licensed base Toffolis 3-CNOT",
            CmpsStage::None => "all Toffolis exact",
        })
    }
}

const STAGES: [CmpsStage; 5] =
    [CmpsStage::All, CmpsStage::Licensed, CmpsStage::LicensedExceptTarget, CmpsStage::BaseOnly, CmpsStage::None];

impl ToffoliPolicy {
    /// The stages tried for this policy, first choice first.
    pub fn stages(self) -> &'static [CmpsStage] {
        match self {
            ToffoliPolicy::Exact => &STAGES[4..],
            ToffoliPolicy::Cmps => &STAGES[..],
            ToffoliPolicy::Auto => &STAGES[1..],
        }
    }
}

fn kinds(n: usize, sites: &[ToffoliSite], stage: CmpsStage) -> Vec<ToffoliKind> {
    sites
        .iter()
        .map(|s| {
            let licensed = !s.in_base || C6_LICENSED.contains(&s.index);
            let cmps = match stage {
                CmpsStage::All => true,
                CmpsStage::Licensed => licensed,
                CmpsStage::LicensedExceptTarget => licensed && s.triple.2 != n,
                CmpsStage::BaseOnly => C6_LICENSED.contains(&s.index),
                CmpsStage::None => false,
            };
            if cmps {
                ToffoliKind::Cmps
            } else {
                ToffoliKind::Exact
            }
        })
        .collect()
}

/// Flat circuit for one stage, before merging.
pub fn poly_flat(n: usize, u: &Unitary2, stage: CmpsStage) -> Result<Circuit> {
    check_poly_n(n)?;
    let b = build(n, u);
    let mode = ToffoliMode::PerGate(kinds(n, &b.sites, stage));
    Ok(expand_intermediates(&Circuit::from_gates_unchecked(n, b.ops, 0.0), &mode))
}

/// Synthesizes `C^n(U)` and verifies it with default options. For
/// `n ≤ 6` this is the exponential construction.
///
/// ```
/// use mcu_synth::poly_synth::{poly_synthesize, ToffoliPolicy};
/// use mcu_synth::qmath::named_gate;
/// let s = poly_synthesize(7, &named_gate("H", None).unwrap(), ToffoliPolicy::Auto, true, true).unwrap();
/// assert!(s.circuit.is_basic());
/// assert!(s.verification.result.equal);
/// ```
pub fn poly_synthesize(n: usize, u: &Unitary2, policy: ToffoliPolicy, flatten: bool, merge: bool) -> Result<Synthesis> {
    poly_synthesize_with(n, u, policy, flatten, merge, &VerifyOptions::default())
}

pub fn poly_synthesize_with(
    n: usize,
    u: &Unitary2,
    policy: ToffoliPolicy,
    flatten: bool,
    merge: bool,
    verify: &VerifyOptions,
) -> Result<Synthesis> {
    if n == 0 || n > MAX_N {
        return Err(Error::OutOfRange { what: "wire count", value: n as i64, allowed: format!("1..={MAX_N}") });
    }
    if n <= 6 {
        let mut s = exp_synthesize_with(n, u, flatten, merge, verify)?;
        s.notes.push(format!("n={n} uses the exponential construction"));
        return Ok(s);
    }
    let b = build(n, u);
    let blocks = Circuit::from_gates_unchecked(n, b.ops, 0.0);
    if !flatten {
        let verification = verify_cnu(&blocks, n, u, verify)?;
        if !verification.result.equal {
            return Err(Error::Verification(format!(
                "polynomial scheme n={n}, block level: deviation {:.3e}",
                verification.result.max_dev
            )));
        }
        return Ok(Synthesis { circuit: blocks, verification, notes: Vec::new() });
    }
    let mut notes = Vec::new();
    for &stage in policy.stages() {
        let mode = ToffoliMode::PerGate(kinds(n, &b.sites, stage));
        let mut circuit = expand_intermediates(&blocks, &mode);
        if merge {
            circuit = merge_pass(&circuit, true)?;
        }
        let verification = verify_cnu(&circuit, n, u, verify)?;
        if verification.result.equal {
            return Ok(Synthesis { circuit, verification, notes });
        }
        notes.push(format!("{stage}: deviation {:.3e}, falling back", verification.result.max_dev));
    }
    Err(Error::Verification(format!("polynomial scheme n={n}: {}", notes.join("; "))))
}
