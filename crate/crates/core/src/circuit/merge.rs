use std::f64::consts::{PI, TAU};

use super::{Circuit, Gate, Label, Wire};
use crate::error::{Error, Result};
use crate::qmath::Unitary2;

const NONE: usize = usize::MAX;
const SCALAR_TOL: f64 = 1e-10;
const COMMUTE_TOL: f64 = 1e-12;
const WALK_LIMIT: usize = 64;
const MAX_SWEEPS: usize = 16;

/// Peephole simplification of a circuit of one-qubit gates and CNOTs.
///
/// Always applied:
/// - one-qubit gates with nothing between them on their wire are multiplied;
/// - products within 1e-10 of `e^{iθ}·I` are dropped, `θ` goes to the
///   global phase;
/// - identical CNOTs with nothing between them on either wire cancel.
///
/// With `aggressive`, one-qubit gates also slide back through CNOT controls
/// (diagonal gates) and CNOT targets (gates commuting with X), CNOT pairs
/// cancel across such gates, and three CNOTs acting back to back on at
/// most three wires are replaced by an equivalent pair or single CNOT
/// when one exists. Sweeps repeat until nothing changes.
///
/// ```
/// use mcu_synth::circuit::{merge_pass, Circuit, Gate};
/// let c = Circuit::from_gates(2, [Gate::cx(1, 2), Gate::cx(1, 2)]).unwrap();
/// assert!(merge_pass(&c, false).unwrap().is_empty());
/// ```
pub fn merge_pass(c: &Circuit, aggressive: bool) -> Result<Circuit> {
    if let Some(g) = c.ops().iter().find(|g| !g.is_basic()) {
        return Err(Error::IntermediateGates(g.kind_name()));
    }
    let mut ops = c.ops().to_vec();
    let mut phase = c.global_phase();
    for _ in 0..MAX_SWEEPS {
        let before = ops.len();
        let mut sweep = Sweep::new(c.n(), aggressive, before);
        for g in ops {
            sweep.push(g);
        }
        let (next, dphase) = sweep.finish();
        ops = next;
        phase += dphase;
        if ops.len() == before {
            break;
        }
    }
    Ok(Circuit::from_gates_unchecked(c.n(), ops, wrap(phase)))
}

fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

struct Slot {
    gate: Gate,
    alive: bool,
    /// Previous slot on each of the gate's wires, in `wires()` order.
    prev: [usize; 2],
}

struct Sweep {
    slots: Vec<Slot>,
    last: Vec<usize>,
    aggressive: bool,
    phase: f64,
}

impl Sweep {
    fn new(n: usize, aggressive: bool, cap: usize) -> Sweep {
        Sweep { slots: Vec::with_capacity(cap), last: vec![NONE; n + 1], aggressive, phase: 0.0 }
    }

    fn finish(self) -> (Vec<Gate>, f64) {
        let ops = self.slots.into_iter().filter(|s| s.alive).map(|s| s.gate).collect();
        (ops, self.phase)
    }

    fn prev_on(&self, idx: usize, w: Wire) -> usize {
        let s = &self.slots[idx];
        if s.gate.wires()[0] == w {
            s.prev[0]
        } else {
            s.prev[1]
        }
    }

    /// First live slot at or before `idx` on wire `w`.
    fn live_from(&self, mut idx: usize, w: Wire) -> usize {
        while idx != NONE && !self.slots[idx].alive {
            idx = self.prev_on(idx, w);
        }
        idx
    }

    fn last_live(&self, w: Wire) -> usize {
        self.live_from(self.last[w], w)
    }

    fn live_before(&self, idx: usize, w: Wire) -> usize {
        self.live_from(self.prev_on(idx, w), w)
    }

    fn append(&mut self, gate: Gate) {
        let idx = self.slots.len();
        let mut prev = [NONE; 2];
        for (i, &w) in gate.wires().iter().enumerate() {
            prev[i] = self.last[w];
            self.last[w] = idx;
        }
        self.slots.push(Slot { gate, alive: true, prev });
    }

    fn push(&mut self, gate: Gate) {
        match gate {
            Gate::OneQubit { target, u, label } => self.push_one(target, u, label),
            Gate::CNot { control, target } => self.push_cx(control, target),
            _ => unreachable!("checked by merge_pass"),
        }
    }

    fn push_one(&mut self, w: Wire, u: Unitary2, label: Label) {
        if let Some(p) = u.scalar_phase(SCALAR_TOL) {
            self.phase += p;
            return;
        }
        let mut idx = self.last_live(w);
        let mut steps = 0;
        while idx != NONE && steps < WALK_LIMIT {
            match self.slots[idx].gate {
                Gate::OneQubit { u: earlier, .. } => {
                    let merged = u * earlier;
                    if let Some(p) = merged.scalar_phase(SCALAR_TOL) {
                        self.phase += p;
                        self.slots[idx].alive = false;
                    } else {
                        self.slots[idx].gate = Gate::u(w, merged, "U");
                    }
                    return;
                }
                Gate::CNot { control, target } if self.aggressive => {
                    let slides =
                        (control == w && u.is_diagonal(COMMUTE_TOL)) || (target == w && u.commutes_with_x(COMMUTE_TOL));
                    if !slides {
                        break;
                    }
                    idx = self.live_before(idx, w);
                    steps += 1;
                }
                _ => break,
            }
        }
        self.append(Gate::OneQubit { target: w, u, label });
    }

    /// Walks back from the last live gate on `w`, skipping one-qubit gates
    /// that commute with a CNOT end on that wire (aggressive mode only).
    fn cx_partner(&self, w: Wire, is_control: bool) -> usize {
        let mut idx = self.last_live(w);
        if !self.aggressive {
            return idx;
        }
        let mut steps = 0;
        while idx != NONE && steps < WALK_LIMIT {
            match &self.slots[idx].gate {
                Gate::OneQubit { u, .. }
                    if (is_control && u.is_diagonal(COMMUTE_TOL))
                        || (!is_control && u.commutes_with_x(COMMUTE_TOL)) =>
                {
                    idx = self.live_before(idx, w);
                    steps += 1;
                }
                _ => break,
            }
        }
        idx
    }

    fn push_cx(&mut self, c: Wire, t: Wire) {
        let pc = self.cx_partner(c, true);
        if pc != NONE && pc == self.cx_partner(t, false) {
            if let Gate::CNot { control, target } = self.slots[pc].gate {
                if (control, target) == (c, t) {
                    self.slots[pc].alive = false;
                    return;
                }
            }
        }
        if self.aggressive {
            if let Some(replacement) = self.shorten_triple(c, t) {
                for (rc, rt) in replacement {
                    self.push_cx(rc, rt);
                }
                return;
            }
        }
        self.append(Gate::cx(c, t));
    }

    /// Looks for live CNOTs `x`, `y` such that `x y CX(c→t)` are the only
    /// gates touching their (at most three) wires from `x` onwards. If the
    /// three compose to something one or two CNOTs realize, kills `x` and
    /// `y` and returns the shorter sequence.
    fn shorten_triple(&mut self, c: Wire, t: Wire) -> Option<Vec<(Wire, Wire)>> {
        let (lc, lt) = (self.last_live(c), self.last_live(t));
        let y = match (lc, lt) {
            (NONE, NONE) => return None,
            (a, NONE) | (NONE, a) => a,
            (a, b) => a.max(b),
        };
        let Gate::CNot { control: yc, target: yt } = self.slots[y].gate else {
            return None;
        };
        let mut wires: Vec<Wire> = vec![c, t, yc, yt];
        wires.sort_unstable();
        wires.dedup();
        if wires.len() > 3 || self.last_live(yc) != y || self.last_live(yt) != y {
            return None;
        }
        let x = wires
            .iter()
            .map(|&w| if w == yc || w == yt { self.live_before(y, w) } else { self.last_live(w) })
            .filter(|&i| i != NONE)
            .max()?;
        let Gate::CNot { control: xc, target: xt } = self.slots[x].gate else {
            return None;
        };
        if !wires.contains(&xc) || !wires.contains(&xt) {
            return None;
        }
        let seq = [(xc, xt), (yc, yt), (c, t)];
        let target = linear_map(&wires, &seq);
        let best = shortest_realization(&wires, &target)?;
        self.slots[x].alive = false;
        self.slots[y].alive = false;
        Some(best)
    }
}

/// The GF(2) action of a CNOT list on the local wires, as a lookup table
/// over all `2^|wires|` inputs.
fn linear_map(wires: &[Wire], seq: &[(Wire, Wire)]) -> Vec<u8> {
    let pos = |w: Wire| wires.iter().position(|&v| v == w).unwrap();
    (0..1u8 << wires.len())
        .map(|mut v| {
            for &(c, t) in seq {
                v ^= ((v >> pos(c)) & 1) << pos(t);
            }
            v
        })
        .collect()
}

fn shortest_realization(wires: &[Wire], target: &[u8]) -> Option<Vec<(Wire, Wire)>> {
    let pairs: Vec<(Wire, Wire)> =
        wires.iter().flat_map(|&a| wires.iter().filter(move |&&b| b != a).map(move |&b| (a, b))).collect();
    if linear_map(wires, &[]) == target {
        return Some(Vec::new());
    }
    for &p in &pairs {
        if linear_map(wires, &[p]) == target {
            return Some(vec![p]);
        }
    }
    for &p in &pairs {
        for &q in &pairs {
            if linear_map(wires, &[p, q]) == target {
                return Some(vec![p, q]);
            }
        }
    }
    None
}
