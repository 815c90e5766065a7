use std::f64::consts::{FRAC_PI_4, PI};

use super::{Circuit, Gate, Wire};
use crate::error::Result;
use crate::qmath::{abc_decompose, hadamard, phase, ry};

/// How a single Toffoli is lowered to basic gates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ToffoliKind {
    /// Standard 6-CNOT network, exact.
    Exact,
    /// 3-CNOT network equal to Toffoli up to `−1` on `a=1, b=0, c=1`.
    Cmps,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ToffoliMode {
    Exact,
    Cmps,
    /// One entry per Toffoli in circuit order; missing entries are exact.
    PerGate(Vec<ToffoliKind>),
}

/// `R·CX(b→c)·R·CX(a→c)·R†·CX(b→c)·R†` on `c`, `R = Ry(π/4)`.
///
/// ```
/// use mcu_synth::circuit::{cmps_toffoli, counts};
/// let c = cmps_toffoli(3, 1, 2, 3).unwrap();
/// let r = counts(&c);
/// assert_eq!((r.cnot, r.one_qubit, r.total_basic()), (3, 4, Some(7)));
/// ```
pub fn cmps_toffoli(n: usize, a: Wire, b: Wire, c: Wire) -> Result<Circuit> {
    check_distinct(n, a, b, c)?;
    let mut ops = Vec::with_capacity(7);
    push_cmps(&mut ops, a, b, c);
    Ok(Circuit::from_gates_unchecked(n, ops, 0.0))
}

/// The standard H/T network with 6 CNOTs and 9 one-qubit gates.
pub fn exact_toffoli(n: usize, a: Wire, b: Wire, c: Wire) -> Result<Circuit> {
    check_distinct(n, a, b, c)?;
    let mut ops = Vec::with_capacity(15);
    push_exact(&mut ops, a, b, c);
    Ok(Circuit::from_gates_unchecked(n, ops, 0.0))
}

fn check_distinct(n: usize, a: Wire, b: Wire, c: Wire) -> Result<()> {
    Gate::ccx(a, b, c).check(n)
}

fn push_cmps(ops: &mut Vec<Gate>, a: Wire, b: Wire, c: Wire) {
    let r = ry(FRAC_PI_4);
    let rd = r.adjoint();
    ops.extend([
        Gate::u(c, r, "R"),
        Gate::cx(b, c),
        Gate::u(c, r, "R"),
        Gate::cx(a, c),
        Gate::u(c, rd, "R†"),
        Gate::cx(b, c),
        Gate::u(c, rd, "R†"),
    ]);
}

fn push_exact(ops: &mut Vec<Gate>, a: Wire, b: Wire, c: Wire) {
    let h = hadamard();
    let t = phase(PI / 4.0);
    let td = t.adjoint();
    ops.extend([
        Gate::u(c, h, "H"),
        Gate::cx(b, c),
        Gate::u(c, td, "T†"),
        Gate::cx(a, c),
        Gate::u(c, t, "T"),
        Gate::cx(b, c),
        Gate::u(c, td, "T†"),
        Gate::cx(a, c),
        Gate::u(b, t, "T"),
        Gate::u(c, t, "T"),
        Gate::u(c, h, "H"),
        Gate::cx(a, b),
        Gate::u(a, t, "T"),
        Gate::u(b, td, "T†"),
        Gate::cx(a, b),
    ]);
}

/// Lowers controlled-U and Toffoli gates to one-qubit gates and CNOTs.
///
/// A controlled-`V` becomes `F(t) CX E(t) CX D(t) G(c)` from
/// [`abc_decompose`], with `G = diag(1, e^{ia})`.
pub fn expand_intermediates(c: &Circuit, mode: &ToffoliMode) -> Circuit {
    let mut ops = Vec::with_capacity(c.len() * 2);
    let mut toffoli_index = 0;
    for g in c.ops() {
        match g {
            Gate::ControlledU { control, target, u, .. } => {
                let p = abc_decompose(u);
                ops.extend([
                    Gate::u(*target, p.f, "F"),
                    Gate::cx(*control, *target),
                    Gate::u(*target, p.e, "E"),
                    Gate::cx(*control, *target),
                    Gate::u(*target, p.d, "D"),
                    Gate::u(*control, p.g(), "G"),
                ]);
            }
            Gate::Toffoli { c1, c2, target } => {
                let kind = match mode {
                    ToffoliMode::Exact => ToffoliKind::Exact,
                    ToffoliMode::Cmps => ToffoliKind::Cmps,
                    ToffoliMode::PerGate(kinds) => kinds.get(toffoli_index).copied().unwrap_or(ToffoliKind::Exact),
                };
                toffoli_index += 1;
                match kind {
                    ToffoliKind::Exact => push_exact(&mut ops, *c1, *c2, *target),
                    ToffoliKind::Cmps => push_cmps(&mut ops, *c1, *c2, *target),
                }
            }
            g => ops.push(g.clone()),
        }
    }
    Circuit::from_gates_unchecked(c.n(), ops, c.global_phase())
}
