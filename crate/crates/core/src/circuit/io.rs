use std::borrow::Cow;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize, Serializer};

use super::{Circuit, Gate, Label};
use crate::error::{Error, Result};
use crate::qmath::{zyz_angles, Mat2, Unitary2, C64};

pub const JSON_VERSION: u32 = 1;

/// Matrices read from JSON must be unitary to this tolerance.
const PARSE_UNITARY_TOL: f64 = 1e-10;

type MatrixDoc = [[[f64; 2]; 2]; 2];

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitDoc {
    version: u32,
    n: usize,
    #[serde(serialize_with = "compact_f64")]
    global_phase: f64,
    gates: Vec<GateDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateDoc {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    control: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    c1: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    c2: Option<usize>,
    target: usize,
    #[serde(skip_serializing_if = "Option::is_none", default, serialize_with = "compact_matrix")]
    matrix: Option<MatrixDoc>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    label: Option<String>,
}

/// Integral values print without a fractional part, so `0.0` becomes `0`.
fn compact_f64<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.fract() == 0.0 && x.abs() < 9.0e15 {
        s.serialize_i64(*x as i64)
    } else {
        s.serialize_f64(*x)
    }
}

fn compact_matrix<S: Serializer>(m: &Option<MatrixDoc>, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    struct Num(f64);
    impl Serialize for Num {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            compact_f64(&self.0, s)
        }
    }
    let m = m.as_ref().expect("skipped when None");
    let mut rows = s.serialize_seq(Some(2))?;
    for row in m {
        let row: Vec<[Num; 2]> = row.iter().map(|e| [Num(e[0]), Num(e[1])]).collect();
        rows.serialize_element(&row)?;
    }
    rows.end()
}

fn matrix_doc(u: &Unitary2) -> MatrixDoc {
    let m = &u.mat().0;
    let e = |z: C64| [z.re, z.im];
    [[e(m[0][0]), e(m[0][1])], [e(m[1][0]), e(m[1][1])]]
}

fn matrix_from_doc(d: &MatrixDoc) -> Result<Unitary2> {
    let e = |p: [f64; 2]| C64::new(p[0], p[1]);
    let m = Mat2::new(e(d[0][0]), e(d[0][1]), e(d[1][0]), e(d[1][1]));
    Unitary2::with_tol(m, PARSE_UNITARY_TOL)
}

fn gate_doc(g: &Gate) -> GateDoc {
    let mut d = GateDoc {
        kind: g.kind_name().to_string(),
        control: None,
        c1: None,
        c2: None,
        target: g.target(),
        matrix: None,
        label: None,
    };
    match g {
        Gate::OneQubit { u, label, .. } => {
            d.matrix = Some(matrix_doc(u));
            d.label = Some(label.to_string());
        }
        Gate::CNot { control, .. } => d.control = Some(*control),
        Gate::Toffoli { c1, c2, .. } => {
            d.c1 = Some(*c1);
            d.c2 = Some(*c2);
        }
        Gate::ControlledU { control, u, label, .. } => {
            d.control = Some(*control);
            d.matrix = Some(matrix_doc(u));
            d.label = Some(label.to_string());
        }
    }
    d
}

/// Serializes to the version-1 JSON schema.
///
/// ```
/// use mcu_synth::circuit::{emit_json, Circuit};
/// let json = emit_json(&Circuit::new(3)).unwrap();
/// assert_eq!(json, r#"{"version":1,"n":3,"global_phase":0,"gates":[]}"#);
/// ```
pub fn emit_json(c: &Circuit) -> Result<String> {
    let doc = CircuitDoc {
        version: JSON_VERSION,
        n: c.n(),
        global_phase: c.global_phase(),
        gates: c.ops().iter().map(gate_doc).collect(),
    };
    Ok(serde_json::to_string(&doc)?)
}

fn schema(msg: String) -> Error {
    Error::Schema(msg)
}

fn gate_from_doc(i: usize, d: GateDoc) -> Result<Gate> {
    let need =
        |v: Option<usize>, field: &str| v.ok_or_else(|| schema(format!("gate {i} ({}): missing `{field}`", d.kind)));
    let forbid = |present: bool, field: &str| {
        if present {
            Err(schema(format!("gate {i} ({}): unexpected `{field}`", d.kind)))
        } else {
            Ok(())
        }
    };
    let matrix = || -> Result<Unitary2> {
        let m = d.matrix.as_ref().ok_or_else(|| schema(format!("gate {i}: missing `matrix`")))?;
        matrix_from_doc(m).map_err(|e| schema(format!("gate {i}: {e}")))
    };
    let label = |default: &'static str| -> Label { d.label.clone().map(Cow::Owned).unwrap_or(Cow::Borrowed(default)) };
    match d.kind.as_str() {
        "u" => {
            forbid(d.control.is_some(), "control")?;
            forbid(d.c1.is_some() || d.c2.is_some(), "c1/c2")?;
            Ok(Gate::u(d.target, matrix()?, label("U")))
        }
        "cnot" => {
            forbid(d.c1.is_some() || d.c2.is_some(), "c1/c2")?;
            forbid(d.matrix.is_some(), "matrix")?;
            forbid(d.label.is_some(), "label")?;
            Ok(Gate::cx(need(d.control, "control")?, d.target))
        }
        "toffoli" => {
            forbid(d.control.is_some(), "control")?;
            forbid(d.matrix.is_some(), "matrix")?;
            forbid(d.label.is_some(), "label")?;
            Ok(Gate::ccx(need(d.c1, "c1")?, need(d.c2, "c2")?, d.target))
        }
        "cu" => {
            forbid(d.c1.is_some() || d.c2.is_some(), "c1/c2")?;
            Ok(Gate::cu(need(d.control, "control")?, d.target, matrix()?, label("V")))
        }
        other => Err(schema(format!("gate {i}: unknown kind `{other}`"))),
    }
}

/// Parses the version-1 JSON schema, checking wires and unitarity.
pub fn parse_json(text: &str) -> Result<Circuit> {
    let doc: CircuitDoc = serde_json::from_str(text)?;
    if doc.version != JSON_VERSION {
        return Err(schema(format!("unsupported version {}", doc.version)));
    }
    if !doc.global_phase.is_finite() {
        return Err(schema("global_phase is not finite".into()));
    }
    let mut c = Circuit::new(doc.n);
    c.set_global_phase(doc.global_phase);
    for (i, g) in doc.gates.into_iter().enumerate() {
        c.push(gate_from_doc(i, g)?)?;
    }
    Ok(c)
}

/// OpenQASM 2.0 text. One-qubit gates become `u3(γ,β,δ)`, or `u1(β)` when
/// `γ = 0`; the phase each drops is summed into a header comment.
///
/// ```
/// use mcu_synth::circuit::{emit_qasm, Circuit, Gate};
/// let c = Circuit::from_gates(2, [Gate::cx(1, 2)]).unwrap();
/// assert!(emit_qasm(&c).unwrap().contains("cx q[0],q[1];"));
/// ```
pub fn emit_qasm(c: &Circuit) -> Result<String> {
    let mut body = String::new();
    let mut phase = c.global_phase();
    for g in c.ops() {
        match g {
            Gate::CNot { control, target } => {
                writeln!(body, "cx q[{}],q[{}];", control - 1, target - 1).unwrap();
            }
            Gate::OneQubit { target, u, .. } => {
                let z = zyz_angles(u);
                // e^{iα}Rz(β)Ry(γ)Rz(δ) = e^{i(α−(β+δ)/2)}·u3(γ,β,δ)
                phase += z.alpha - (z.beta + z.delta) / 2.0;
                if z.gamma == 0.0 {
                    writeln!(body, "u1({}) q[{}];", z.beta, target - 1).unwrap();
                } else {
                    writeln!(body, "u3({},{},{}) q[{}];", z.gamma, z.beta, z.delta, target - 1).unwrap();
                }
            }
            g => return Err(Error::IntermediateGates(g.kind_name())),
        }
    }
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    writeln!(out, "// global phase: {phase}").unwrap();
    writeln!(out, "qreg q[{}];", c.n()).unwrap();
    out.push_str(&body);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{named_gate, phase};

    #[test]
    fn json_shapes() {
        let c = Circuit::from_gates(2, [Gate::cx(1, 2)]).unwrap();
        let s = emit_json(&c).unwrap();
        assert!(s.contains(r#"{"kind":"cnot","control":1,"target":2}"#), "{s}");
        let x = named_gate("X", None).unwrap();
        let c = Circuit::from_gates(1, [Gate::u(1, x, "X")]).unwrap();
        let s = emit_json(&c).unwrap();
        assert!(s.contains(r#""matrix":[[[0,0],[1,0]],[[1,0],[0,0]]],"label":"X""#), "{s}");
    }

    #[test]
    fn json_round_trip() {
        let h = named_gate("H", None).unwrap();
        let mut c = Circuit::from_gates(
            3,
            [
                Gate::u(2, h, "H"),
                Gate::cx(1, 3),
                Gate::ccx(1, 2, 3),
                Gate::cu(3, 1, named_gate("random", Some(4.0)).unwrap(), "V†"),
            ],
        )
        .unwrap();
        c.set_global_phase(0.123456789);
        assert_eq!(parse_json(&emit_json(&c).unwrap()).unwrap(), c);
    }

    #[test]
    fn json_rejects() {
        for bad in [
            r#"{"version":2,"n":1,"global_phase":0,"gates":[]}"#,
            r#"{"version":1,"n":2,"global_phase":0,"gates":[{"kind":"cnot","target":2}]}"#,
            r#"{"version":1,"n":2,"global_phase":0,"gates":[{"kind":"cnot","control":3,"target":2}]}"#,
            r#"{"version":1,"n":1,"global_phase":0,"gates":[{"kind":"u","target":1,"matrix":[[[1,0],[0,0]],[[0,0],[2,0]]]}]}"#,
            r#"{"version":1,"n":1,"global_phase":0,"gates":[{"kind":"swap","target":1}]}"#,
            r#"{"version":1,"n":1,"global_phase":0,"gates":[],"extra":1}"#,
            r#"{"version":1,"n":1,"global_phase":0,"gates":["#,
        ] {
            assert!(parse_json(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn qasm_forms() {
        let a = 0.625;
        let c = Circuit::from_gates(2, [Gate::u(2, phase(a), "G")]).unwrap();
        let q = emit_qasm(&c).unwrap();
        assert!(q.contains("u1(0.625) q[1];"), "{q}");
        assert!(q.contains("qreg q[2];"));
        let c = Circuit::from_gates(3, [Gate::ccx(1, 2, 3)]).unwrap();
        assert!(emit_qasm(&c).is_err());
    }
}
