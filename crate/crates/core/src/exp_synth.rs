//! The exponential construction: `2^n − 2` CNOTs and `2^n` one-qubit gates.
//!
//! With `k = n − 1` controls and `V = U^{1/2^{n−2}}`, `C^n(U)` is the
//! product over nonempty control subsets `S` of `V^{±1}` controlled on the
//! parity of `S`, with `+` for odd `|S|`. Subsets are visited in a Gray
//! order so that each parity is one CNOT away from the previous one. The
//! parity of `S` is held on wire `max(S)`.
//!
//! The walk starts with a fixed network over wires 1..3, then one level per
//! hold wire `j = β + 3`, made of `2^β` segments. A segment is an A block
//! (toggles `β+2, β+1, β+2`) followed by a B block (toggle `γ(α, β)`).

use crate::circuit::{merge_pass, Circuit, Gate, Wire};
use crate::error::{Error, Result};
use crate::graycode::gamma;
use crate::oracle::{verify_cnu, VerifyOptions};
use crate::qmath::{abc_decompose, phase, principal_root, AbcParts, Unitary2};
use crate::Synthesis;

/// Largest supported wire count.
pub const MAX_N: usize = 22;

/// One repair level: hold wire `β + 3`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpLevel {
    pub beta: usize,
    pub hold: Wire,
    pub root: Unitary2,
    pub parts: AbcParts,
}

/// Roots and factors used by one synthesis.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpPlan {
    pub n: usize,
    pub u: Unitary2,
    /// `V` with `V^(2^(n−2)) = U`, shared by every controlled gate.
    pub root: Unitary2,
    pub parts: AbcParts,
    /// The gate the three-control base network realizes (`V^4`).
    pub base_root: Unitary2,
    pub levels: Vec<ExpLevel>,
}

fn check_n(n: usize) -> Result<()> {
    if (1..=MAX_N).contains(&n) {
        Ok(())
    } else {
        Err(Error::OutOfRange { what: "wire count", value: n as i64, allowed: format!("1..={MAX_N}") })
    }
}

pub fn exp_plan(n: usize, u: &Unitary2) -> Result<ExpPlan> {
    check_n(n)?;
    let root = principal_root(u, n.saturating_sub(2) as u32);
    let parts = abc_decompose(&root);
    let base_root = if n >= 5 { principal_root(u, (n - 4) as u32) } else { *u };
    let levels = (1..=n.saturating_sub(4)).map(|beta| ExpLevel { beta, hold: beta + 3, root, parts }).collect();
    Ok(ExpPlan { n, u: *u, root, parts, base_root, levels })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    /// `CX(from → hold)`.
    Toggle { from: Wire, hold: Wire },
    /// Controlled `V` (or `V†`) from `hold` onto the target.
    Visit { hold: Wire, inverse: bool },
}

use Step::{Toggle, Visit};

/// Gray walk over the nonempty subsets of the first `k ≤ 3` controls.
fn base_steps(k: usize) -> Vec<Step> {
    let mut s = vec![Visit { hold: 1, inverse: false }];
    if k >= 2 {
        s.extend([
            Toggle { from: 1, hold: 2 },
            Visit { hold: 2, inverse: true },
            Toggle { from: 1, hold: 2 },
            Visit { hold: 2, inverse: false },
        ]);
    }
    if k >= 3 {
        s.extend([
            Toggle { from: 2, hold: 3 },
            Visit { hold: 3, inverse: true },
            Toggle { from: 1, hold: 3 },
            Visit { hold: 3, inverse: false },
            Toggle { from: 2, hold: 3 },
            Visit { hold: 3, inverse: true },
            Toggle { from: 1, hold: 3 },
            Visit { hold: 3, inverse: false },
        ]);
    }
    s
}

fn a_steps(beta: usize) -> [Step; 6] {
    let j = beta + 3;
    [
        Toggle { from: beta + 2, hold: j },
        Visit { hold: j, inverse: true },
        Toggle { from: beta + 1, hold: j },
        Visit { hold: j, inverse: false },
        Toggle { from: beta + 2, hold: j },
        Visit { hold: j, inverse: true },
    ]
}

fn b_steps(gamma_val: usize, beta: usize) -> [Step; 2] {
    let j = beta + 3;
    [Toggle { from: gamma_val, hold: j }, Visit { hold: j, inverse: false }]
}

fn block_gates(steps: &[Step], target: Wire, v: &Unitary2, out: &mut Vec<Gate>) {
    let vd = v.adjoint();
    for s in steps {
        out.push(match *s {
            Toggle { from, hold } => Gate::cx(from, hold),
            Visit { hold, inverse: false } => Gate::cu(hold, target, *v, "V"),
            Visit { hold, inverse: true } => Gate::cu(hold, target, vd, "V†"),
        });
    }
}

/// Emits one chain of controlled gates with the target's CNOT pairs
/// shared: between visits the target carries `X` raised to the value of
/// the current hold wire, so each visit costs one one-qubit gate on the
/// target plus the phase gate on the hold wire. `pre` and `post` close
/// the chain.
fn flat_chain(steps: &[Step], target: Wire, p: &AbcParts, pre: (Unitary2, &'static str), out: &mut Vec<Gate>) {
    let (e, ed) = (p.e, p.e.adjoint());
    let (g, gd) = (phase(p.a), phase(-p.a));
    out.push(Gate::u(target, pre.0, pre.1));
    let mut loaded: Option<Wire> = None;
    for s in steps {
        match *s {
            Toggle { from, hold } => match loaded {
                Some(h) if h == hold => {
                    out.push(Gate::cx(from, hold));
                    out.push(Gate::cx(from, target));
                }
                Some(h) if h == from => {
                    out.push(Gate::cx(hold, target));
                    out.push(Gate::cx(from, hold));
                    loaded = Some(hold);
                }
                Some(h) => unreachable!("toggle {from}→{hold} while holding {h}"),
                None => out.push(Gate::cx(from, hold)),
            },
            Visit { hold, inverse } => {
                if loaded.is_none() {
                    out.push(Gate::cx(hold, target));
                    loaded = Some(hold);
                }
                debug_assert_eq!(loaded, Some(hold));
                if inverse {
                    out.push(Gate::u(target, ed, "E†"));
                    out.push(Gate::u(hold, gd, "G†"));
                } else {
                    out.push(Gate::u(target, e, "E"));
                    out.push(Gate::u(hold, g, "G"));
                }
            }
        }
    }
    if let Some(h) = loaded {
        out.push(Gate::cx(h, target));
    }
    out.push(Gate::u(target, p.d, "D"));
}

/// `C^{n_base}(U)` at block level on controls `1..n_base−1`, acting on
/// `target_wire` of a `total_wires` circuit.
///
/// ```
/// use mcu_synth::exp_synth::exp_base;
/// use mcu_synth::circuit::counts;
/// use mcu_synth::qmath::named_gate;
/// let c = exp_base(4, &named_gate("X", None).unwrap(), 4, 4).unwrap();
/// let r = counts(&c);
/// assert_eq!((r.controlled_u, r.cnot), (7, 6));
/// ```
pub fn exp_base(n_base: usize, u: &Unitary2, total_wires: usize, target_wire: Wire) -> Result<Circuit> {
    if !(1..=4).contains(&n_base) {
        return Err(Error::OutOfRange { what: "base size", value: n_base as i64, allowed: "1..=4".into() });
    }
    if target_wire < n_base || target_wire > total_wires {
        return Err(Error::Wires(format!(
            "target {target_wire} must lie in {n_base}..={total_wires} for {} controls",
            n_base - 1
        )));
    }
    let mut ops = Vec::new();
    if n_base == 1 {
        ops.push(Gate::u(target_wire, *u, "U"));
    } else {
        let v = principal_root(u, (n_base - 2) as u32);
        block_gates(&base_steps(n_base - 1), target_wire, &v, &mut ops);
    }
    Ok(Circuit::from_gates_unchecked(total_wires, ops, 0.0))
}

fn check_level(beta: usize, n: usize, plan: &ExpPlan) -> Result<()> {
    if plan.n != n {
        return Err(Error::WidthMismatch { left: plan.n, right: n });
    }
    if beta == 0 || beta + 4 > n {
        return Err(Error::OutOfRange {
            what: "level",
            value: beta as i64,
            allowed: format!("1..={}", n.saturating_sub(4)),
        });
    }
    Ok(())
}

/// The A block of level `beta`, touching wires `β+1, β+2, β+3, n`.
pub fn a_block(beta: usize, n: usize, plan: &ExpPlan) -> Result<Circuit> {
    check_level(beta, n, plan)?;
    let mut ops = Vec::with_capacity(6);
    block_gates(&a_steps(beta), n, &plan.root, &mut ops);
    Ok(Circuit::from_gates_unchecked(n, ops, 0.0))
}

/// The B block of level `beta` for toggle wire `gamma_val`, touching
/// wires `γ, β+3, n`.
pub fn b_block(gamma_val: usize, beta: usize, n: usize, plan: &ExpPlan) -> Result<Circuit> {
    check_level(beta, n, plan)?;
    if gamma_val == 0 || gamma_val > beta {
        return Err(Error::OutOfRange { what: "B index", value: gamma_val as i64, allowed: format!("1..={beta}") });
    }
    let mut ops = Vec::with_capacity(2);
    block_gates(&b_steps(gamma_val, beta), n, &plan.root, &mut ops);
    Ok(Circuit::from_gates_unchecked(n, ops, 0.0))
}

/// The B-block indices of level `beta`, in order.
pub fn b_indices(beta: usize) -> Vec<usize> {
    (1..=1u32 << beta).map(|a| gamma(a, beta as u32).expect("beta checked") as usize).collect()
}

fn segments(n: usize) -> impl Iterator<Item = Vec<Step>> {
    (1..=n.saturating_sub(4)).flat_map(|beta| {
        b_indices(beta).into_iter().map(move |g| {
            let mut s = a_steps(beta).to_vec();
            s.extend(b_steps(g, beta));
            s
        })
    })
}

/// Block-level circuit: controlled-`V^{±1}` gates and CNOTs.
pub fn exp_blocks(plan: &ExpPlan) -> Circuit {
    let n = plan.n;
    if n == 1 {
        return Circuit::from_gates_unchecked(1, vec![Gate::u(1, plan.u, "U")], 0.0);
    }
    let mut ops = Vec::new();
    block_gates(&base_steps((n - 1).min(3)), n, &plan.root, &mut ops);
    for seg in segments(n) {
        block_gates(&seg, n, &plan.root, &mut ops);
    }
    Circuit::from_gates_unchecked(n, ops, 0.0)
}

/// Flat circuit of one-qubit gates and CNOTs, before merging.
///
/// Each controlled gate here is one of `V`, `V†` with the factors of `V`,
/// so the chains use `E` and `E†` on the target and keep `D`/`F` only at
/// chain ends. The base chain opens with `F`; each segment chain opens
/// with `D†` and closes with `D`.
pub fn exp_flat(plan: &ExpPlan) -> Circuit {
    let n = plan.n;
    if n == 1 {
        return exp_blocks(plan);
    }
    let p = &plan.parts;
    let mut ops = Vec::with_capacity(1 << (n + 1));
    flat_chain(&base_steps((n - 1).min(3)), n, p, (p.f, "F"), &mut ops);
    for seg in segments(n) {
        flat_chain(&seg, n, p, (p.d.adjoint(), "D†"), &mut ops);
    }
    Circuit::from_gates_unchecked(n, ops, 0.0)
}

/// Synthesizes `C^n(U)` and verifies the result with default options.
///
/// `merge` runs the aggressive merge pass on the flat circuit; it has no
/// effect at block level.
///
/// ```
/// use mcu_synth::exp_synth::exp_synthesize;
/// use mcu_synth::circuit::counts;
/// use mcu_synth::qmath::named_gate;
/// let s = exp_synthesize(4, &named_gate("X", None).unwrap(), true, true).unwrap();
/// let r = counts(&s.circuit);
/// assert_eq!((r.cnot, r.one_qubit), (14, 16));
/// assert!(s.verification.result.equal);
/// ```
pub fn exp_synthesize(n: usize, u: &Unitary2, flatten: bool, merge: bool) -> Result<Synthesis> {
    exp_synthesize_with(n, u, flatten, merge, &VerifyOptions::default())
}

pub fn exp_synthesize_with(
    n: usize,
    u: &Unitary2,
    flatten: bool,
    merge: bool,
    verify: &VerifyOptions,
) -> Result<Synthesis> {
    let plan = exp_plan(n, u)?;
    let mut circuit = if flatten { exp_flat(&plan) } else { exp_blocks(&plan) };
    if flatten && merge {
        circuit = merge_pass(&circuit, true)?;
    }
    let verification = verify_cnu(&circuit, n, u, verify)?;
    if !verification.result.equal {
        return Err(Error::Verification(format!(
            "exponential scheme n={n}: deviation {:.3e} ({:?})",
            verification.result.max_dev, verification.method
        )));
    }
    Ok(Synthesis { circuit, verification, notes: Vec::new() })
}
