//! Circuit representation: gate lists on 1-based wires, executed left to
//! right, with an explicit global phase.

use std::borrow::Cow;
use std::fmt;
use std::ops::Deref;

use crate::error::{Error, Result};
use crate::qmath::Unitary2;

mod expand;
mod io;
mod merge;

pub use expand::{cmps_toffoli, exact_toffoli, expand_intermediates, ToffoliKind, ToffoliMode};
pub use io::{emit_json, emit_qasm, parse_json, JSON_VERSION};
pub use merge::merge_pass;

/// 1-based wire index.
pub type Wire = usize;

/// Short gate label, usually a static name such as `"E"` or `"R†"`.
pub type Label = Cow<'static, str>;

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    OneQubit { target: Wire, u: Unitary2, label: Label },
    CNot { control: Wire, target: Wire },
    Toffoli { c1: Wire, c2: Wire, target: Wire },
    ControlledU { control: Wire, target: Wire, u: Unitary2, label: Label },
}

/// The wires a gate touches, controls first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Wires {
    buf: [Wire; 3],
    len: usize,
}

impl Deref for Wires {
    type Target = [Wire];

    fn deref(&self) -> &[Wire] {
        &self.buf[..self.len]
    }
}

impl Gate {
    pub fn u(target: Wire, u: Unitary2, label: impl Into<Label>) -> Gate {
        Gate::OneQubit { target, u, label: label.into() }
    }

    pub fn cx(control: Wire, target: Wire) -> Gate {
        Gate::CNot { control, target }
    }

    pub fn ccx(c1: Wire, c2: Wire, target: Wire) -> Gate {
        Gate::Toffoli { c1, c2, target }
    }

    pub fn cu(control: Wire, target: Wire, u: Unitary2, label: impl Into<Label>) -> Gate {
        Gate::ControlledU { control, target, u, label: label.into() }
    }

    pub fn wires(&self) -> Wires {
        match *self {
            Gate::OneQubit { target, .. } => Wires { buf: [target, 0, 0], len: 1 },
            Gate::CNot { control, target } | Gate::ControlledU { control, target, .. } => {
                Wires { buf: [control, target, 0], len: 2 }
            }
            Gate::Toffoli { c1, c2, target } => Wires { buf: [c1, c2, target], len: 3 },
        }
    }

    pub fn target(&self) -> Wire {
        match *self {
            Gate::OneQubit { target, .. }
            | Gate::CNot { target, .. }
            | Gate::Toffoli { target, .. }
            | Gate::ControlledU { target, .. } => target,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Gate::OneQubit { .. } => "u",
            Gate::CNot { .. } => "cnot",
            Gate::Toffoli { .. } => "toffoli",
            Gate::ControlledU { .. } => "cu",
        }
    }

    pub fn is_basic(&self) -> bool {
        matches!(self, Gate::OneQubit { .. } | Gate::CNot { .. })
    }

    /// The inverse gate.
    pub fn dagger(&self) -> Gate {
        match self {
            Gate::OneQubit { target, u, label } => {
                Gate::OneQubit { target: *target, u: u.adjoint(), label: dagger_label(label) }
            }
            Gate::ControlledU { control, target, u, label } => {
                Gate::ControlledU { control: *control, target: *target, u: u.adjoint(), label: dagger_label(label) }
            }
            g => g.clone(),
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        let w = self.wires();
        for (i, &a) in w.iter().enumerate() {
            if a == 0 || a > n {
                return Err(Error::Wires(format!("wire {a} outside 1..={n} in {self}")));
            }
            if w[..i].contains(&a) {
                return Err(Error::Wires(format!("repeated wire {a} in {self}")));
            }
        }
        Ok(())
    }
}

fn dagger_label(label: &str) -> Label {
    match label.strip_suffix('†') {
        Some(base) => Cow::Owned(base.to_string()),
        None => Cow::Owned(format!("{label}†")),
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::OneQubit { target, label, .. } => write!(f, "{label}({target})"),
            Gate::CNot { control, target } => write!(f, "CX({control}→{target})"),
            Gate::Toffoli { c1, c2, target } => write!(f, "T({c1},{c2}→{target})"),
            Gate::ControlledU { control, target, label, .. } => {
                write!(f, "C{label}({control}→{target})")
            }
        }
    }
}

/// An ordered gate list on `n` wires plus a global phase in radians.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Circuit {
    n: usize,
    ops: Vec<Gate>,
    global_phase: f64,
}

impl Circuit {
    pub fn new(n: usize) -> Circuit {
        Circuit { n, ops: Vec::new(), global_phase: 0.0 }
    }

    pub fn from_gates(n: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Circuit> {
        let mut c = Circuit::new(n);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    /// Builds without checking wires. Callers construct gates from
    /// already-validated wire layouts.
    pub(crate) fn from_gates_unchecked(n: usize, ops: Vec<Gate>, global_phase: f64) -> Circuit {
        debug_assert!(ops.iter().all(|g| g.check(n).is_ok()));
        Circuit { n, ops, global_phase }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ops(&self) -> &[Gate] {
        &self.ops
    }

    pub fn into_ops(self) -> Vec<Gate> {
        self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn global_phase(&self) -> f64 {
        self.global_phase
    }

    pub fn set_global_phase(&mut self, phase: f64) {
        self.global_phase = phase;
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.check(self.n)?;
        self.ops.push(gate);
        Ok(())
    }

    pub(crate) fn push_unchecked(&mut self, gate: Gate) {
        debug_assert!(gate.check(self.n).is_ok(), "{gate} on {} wires", self.n);
        self.ops.push(gate);
    }

    #[cfg(test)]
    pub(crate) fn extend_unchecked(&mut self, other: Circuit) {
        debug_assert_eq!(self.n, other.n);
        self.ops.extend(other.ops);
        self.global_phase += other.global_phase;
    }

    /// Removes the gate at `index` (used by tests that break circuits).
    pub fn remove(&mut self, index: usize) -> Gate {
        self.ops.remove(index)
    }

    pub fn is_basic(&self) -> bool {
        self.ops.iter().all(Gate::is_basic)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for g in &self.ops {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

/// Concatenates `a` then `b`; phases add.
pub fn compose(a: &Circuit, b: &Circuit) -> Result<Circuit> {
    if a.n != b.n {
        return Err(Error::WidthMismatch { left: a.n, right: b.n });
    }
    let mut ops = Vec::with_capacity(a.len() + b.len());
    ops.extend_from_slice(&a.ops);
    ops.extend_from_slice(&b.ops);
    Ok(Circuit { n: a.n, ops, global_phase: a.global_phase + b.global_phase })
}

/// The inverse circuit: reversed order, each gate inverted, phase negated.
pub fn dagger(c: &Circuit) -> Circuit {
    Circuit { n: c.n, ops: c.ops.iter().rev().map(Gate::dagger).collect(), global_phase: -c.global_phase }
}

/// Gate tallies by kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize)]
pub struct CountReport {
    pub cnot: usize,
    pub one_qubit: usize,
    pub toffoli: usize,
    pub controlled_u: usize,
}

impl CountReport {
    /// `cnot + one_qubit`, defined once no Toffoli or controlled-U gates
    /// remain.
    pub fn total_basic(&self) -> Option<usize> {
        (self.toffoli == 0 && self.controlled_u == 0).then_some(self.cnot + self.one_qubit)
    }
}

impl fmt::Display for CountReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "cnot={} one_qubit={} toffoli={} controlled_u={}",
            self.cnot, self.one_qubit, self.toffoli, self.controlled_u
        )?;
        if let Some(t) = self.total_basic() {
            write!(f, " total_basic={t}")?;
        }
        Ok(())
    }
}

pub fn counts(c: &Circuit) -> CountReport {
    let mut r = CountReport::default();
    for g in &c.ops {
        match g {
            Gate::OneQubit { .. } => r.one_qubit += 1,
            Gate::CNot { .. } => r.cnot += 1,
            Gate::Toffoli { .. } => r.toffoli += 1,
            Gate::ControlledU { .. } => r.controlled_u += 1,
        }
    }
    r
}
