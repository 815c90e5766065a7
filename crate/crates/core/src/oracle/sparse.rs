use super::bit;
use crate::circuit::{Circuit, Gate};
use crate::qmath::{Unitary2, C64};

/// Amplitudes at or below this modulus are dropped after mixing gates.
const PRUNE: f64 = 1e-15;

/// A state stored as `(basis index, amplitude)` pairs.
///
/// Synthesized circuits keep basis inputs on a handful of basis states, so
/// this runs wide circuits that a dense vector could not hold.
#[derive(Clone, Debug, Default)]
pub struct SparseState {
    n: usize,
    entries: Vec<(u64, C64)>,
    scratch: Vec<(u64, C64)>,
}

impl SparseState {
    pub fn new(n: usize) -> SparseState {
        SparseState { n, entries: Vec::new(), scratch: Vec::new() }
    }

    pub fn reset_basis(&mut self, x: u64) {
        self.entries.clear();
        self.entries.push((x, C64::new(1.0, 0.0)));
    }

    /// Replaces the state; `entries` must have distinct indices.
    pub fn reset_entries(&mut self, entries: &[(u64, C64)]) {
        self.entries.clear();
        self.entries.extend_from_slice(entries);
    }

    /// The entries, sorted by basis index after [`SparseState::run`].
    pub fn entries(&self) -> &[(u64, C64)] {
        &self.entries
    }

    /// Applies every gate and the global phase, then sorts the entries.
    pub fn run(&mut self, c: &Circuit) {
        for g in c.ops() {
            self.apply(g);
        }
        if c.global_phase() != 0.0 {
            let p = C64::from_polar(1.0, c.global_phase());
            self.entries.iter_mut().for_each(|e| e.1 *= p);
        }
        self.entries.sort_unstable_by_key(|e| e.0);
    }

    pub fn apply(&mut self, g: &Gate) {
        let n = self.n;
        match g {
            Gate::OneQubit { target, u, .. } => self.controlled(0, bit(n, *target), u),
            Gate::CNot { control, target } => self.flip(bit(n, *control), bit(n, *target)),
            Gate::Toffoli { c1, c2, target } => self.flip(bit(n, *c1) | bit(n, *c2), bit(n, *target)),
            Gate::ControlledU { control, target, u, .. } => self.controlled(bit(n, *control), bit(n, *target), u),
        }
    }

    /// `C^n(u)` on the last wire.
    pub fn apply_cnu(&mut self, u: &Unitary2) {
        let controls = if self.n >= 1 { (1u64 << self.n) - 2 } else { 0 };
        self.controlled(controls, 1, u);
        self.entries.sort_unstable_by_key(|e| e.0);
    }

    fn flip(&mut self, ctrl: u64, t: u64) {
        for e in self.entries.iter_mut() {
            if e.0 & ctrl == ctrl {
                e.0 ^= t;
            }
        }
    }

    fn controlled(&mut self, ctrl: u64, t: u64, u: &Unitary2) {
        let (m00, m01, m10, m11) = (u.entry(0, 0), u.entry(0, 1), u.entry(1, 0), u.entry(1, 1));
        if m01 == C64::new(0.0, 0.0) && m10 == C64::new(0.0, 0.0) {
            for e in self.entries.iter_mut() {
                if e.0 & ctrl == ctrl {
                    e.1 *= if e.0 & t == 0 { m00 } else { m11 };
                }
            }
            return;
        }
        if m00 == C64::new(0.0, 0.0) && m11 == C64::new(0.0, 0.0) {
            for e in self.entries.iter_mut() {
                if e.0 & ctrl == ctrl {
                    e.1 *= if e.0 & t == 0 { m10 } else { m01 };
                    e.0 ^= t;
                }
            }
            return;
        }
        // Put each |…0…⟩, |…1…⟩ pair next to each other.
        self.entries.sort_unstable_by_key(|e| ((e.0 & !t) << 1) | ((e.0 & t != 0) as u64));
        self.scratch.clear();
        let mut i = 0;
        while i < self.entries.len() {
            let (x, a) = self.entries[i];
            if x & ctrl != ctrl {
                self.scratch.push((x, a));
                i += 1;
                continue;
            }
            let x0 = x & !t;
            let (a0, a1, step) = if x & t != 0 {
                (C64::new(0.0, 0.0), a, 1)
            } else if i + 1 < self.entries.len() && self.entries[i + 1].0 == x0 | t {
                (a, self.entries[i + 1].1, 2)
            } else {
                (a, C64::new(0.0, 0.0), 1)
            };
            let b0 = m00 * a0 + m01 * a1;
            let b1 = m10 * a0 + m11 * a1;
            if b0.norm() > PRUNE {
                self.scratch.push((x0, b0));
            }
            if b1.norm() > PRUNE {
                self.scratch.push((x0 | t, b1));
            }
            i += step;
        }
        std::mem::swap(&mut self.entries, &mut self.scratch);
    }

    /// Largest `|self[k] − col[k]|` over all `k`; entries must be sorted.
    pub fn max_abs_diff_dense(&self, col: &[C64]) -> f64 {
        let mut dev: f64 = 0.0;
        let mut it = self.entries.iter().peekable();
        for (k, want) in col.iter().enumerate() {
            let got = match it.peek() {
                Some(&&(x, a)) if x == k as u64 => {
                    it.next();
                    a
                }
                _ => C64::new(0.0, 0.0),
            };
            dev = dev.max((got - want).norm());
        }
        dev
    }

    /// Largest difference against another sorted sparse state.
    pub fn max_abs_diff_sparse(&self, other: &[(u64, C64)]) -> f64 {
        let (a, b) = (&self.entries, other);
        let (mut i, mut j) = (0, 0);
        let mut dev: f64 = 0.0;
        while i < a.len() || j < b.len() {
            let d = match (a.get(i), b.get(j)) {
                (Some(&(x, p)), Some(&(y, q))) if x == y => {
                    i += 1;
                    j += 1;
                    (p - q).norm()
                }
                (Some(&(x, p)), Some(&(y, _))) if x < y => {
                    i += 1;
                    p.norm()
                }
                (Some(_), Some(&(_, q))) => {
                    j += 1;
                    q.norm()
                }
                (Some(&(_, p)), None) => {
                    i += 1;
                    p.norm()
                }
                (None, Some(&(_, q))) => {
                    j += 1;
                    q.norm()
                }
                (None, None) => unreachable!(),
            };
            dev = dev.max(d);
        }
        dev
    }
}
