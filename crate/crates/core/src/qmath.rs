//! Two-by-two unitary algebra: named gates, principal roots, Euler angles
//! and the controlled-gate factorization `V = e^{ia}·D·X·E·X·F`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Default tolerance for accepting a matrix as unitary.
pub const UNITARY_TOL: f64 = 1e-12;

/// A row-major 2x2 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);

    pub const fn new(m00: C64, m01: C64, m10: C64, m11: C64) -> Self {
        Mat2([[m00, m01], [m10, m11]])
    }

    pub fn from_real(m00: f64, m01: f64, m10: f64, m11: f64) -> Self {
        Mat2::new(m00.into(), m01.into(), m10.into(), m11.into())
    }

    pub fn adjoint(&self) -> Mat2 {
        let m = &self.0;
        Mat2::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn det(&self) -> C64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, s: C64) -> Mat2 {
        let m = &self.0;
        Mat2::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut d: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                d = d.max((self.0[r][c] - other.0[r][c]).norm());
            }
        }
        d
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[ZERO; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Mat2(out)
    }
}

/// Checks `‖M†M − I‖_max ≤ tol`, returning the verdict and the deviation.
pub fn validate_unitary(m: &Mat2, tol: f64) -> (bool, f64) {
    let dev = (m.adjoint() * *m).max_abs_diff(&Mat2::IDENTITY);
    (dev <= tol, dev)
}

/// A 2x2 matrix known to be unitary.
///
/// Construction through [`Unitary2::new`] validates the input, so the
/// operations in this module take `&Unitary2` and cannot see a
/// non-unitary matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unitary2(Mat2);

impl Unitary2 {
    pub const IDENTITY: Unitary2 = Unitary2(Mat2::IDENTITY);

    pub fn new(m: Mat2) -> Result<Self> {
        Self::with_tol(m, UNITARY_TOL)
    }

    pub fn with_tol(m: Mat2, tol: f64) -> Result<Self> {
        match validate_unitary(&m, tol) {
            (true, _) => Ok(Unitary2(m)),
            (false, deviation) => Err(Error::NotUnitary { deviation, tol }),
        }
    }

    /// Wraps a product of unitaries. Rounding drift is tiny, so the check
    /// is only a debug assertion.
    pub(crate) fn from_product(m: Mat2) -> Self {
        debug_assert!(validate_unitary(&m, 1e-8).0, "drifted off unitary: {m:?}");
        Unitary2(m)
    }

    pub fn mat(&self) -> &Mat2 {
        &self.0
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.0 .0[row][col]
    }

    pub fn adjoint(&self) -> Unitary2 {
        Unitary2(self.0.adjoint())
    }

    pub fn det(&self) -> C64 {
        self.0.det()
    }

    pub fn max_abs_diff(&self, other: &Unitary2) -> f64 {
        self.0.max_abs_diff(&other.0)
    }

    /// Multiplies by the scalar `e^{iθ}`.
    pub fn with_phase(&self, theta: f64) -> Unitary2 {
        Unitary2(self.0.scale(C64::from_polar(1.0, theta)))
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.entry(0, 1).norm() <= tol && self.entry(1, 0).norm() <= tol
    }

    /// True when the matrix commutes with Pauli-X (equal diagonals, equal
    /// off-diagonals).
    pub fn commutes_with_x(&self, tol: f64) -> bool {
        (self.entry(0, 0) - self.entry(1, 1)).norm() <= tol && (self.entry(0, 1) - self.entry(1, 0)).norm() <= tol
    }

    /// If the matrix is `e^{iθ}·I` within `tol`, returns `θ`.
    pub fn scalar_phase(&self, tol: f64) -> Option<f64> {
        let d = self.entry(0, 0);
        if self.is_diagonal(tol) && (d - self.entry(1, 1)).norm() <= tol {
            Some(d.arg())
        } else {
            None
        }
    }

    /// `self^(2^k)` by repeated squaring.
    pub fn pow2(&self, k: u32) -> Unitary2 {
        let mut m = *self;
        for _ in 0..k {
            m = m * m;
        }
        m
    }
}

impl Mul for Unitary2 {
    type Output = Unitary2;

    fn mul(self, rhs: Unitary2) -> Unitary2 {
        Unitary2::from_product(self.0 * rhs.0)
    }
}

impl fmt::Display for Unitary2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0 .0;
        write!(f, "[[{:.6}, {:.6}], [{:.6}, {:.6}]]", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

pub fn pauli_x() -> Unitary2 {
    Unitary2(Mat2::from_real(0.0, 1.0, 1.0, 0.0))
}

pub fn pauli_y() -> Unitary2 {
    Unitary2(Mat2::new(ZERO, -C64::i(), C64::i(), ZERO))
}

pub fn pauli_z() -> Unitary2 {
    Unitary2(Mat2::from_real(1.0, 0.0, 0.0, -1.0))
}

pub fn hadamard() -> Unitary2 {
    let h = FRAC_1_SQRT_2;
    Unitary2(Mat2::from_real(h, h, h, -h))
}

/// `diag(1, e^{iθ})`.
pub fn phase(theta: f64) -> Unitary2 {
    Unitary2(Mat2::new(ONE, ZERO, ZERO, C64::from_polar(1.0, theta)))
}

pub fn rz(theta: f64) -> Unitary2 {
    Unitary2(Mat2::new(C64::from_polar(1.0, -theta / 2.0), ZERO, ZERO, C64::from_polar(1.0, theta / 2.0)))
}

pub fn ry(theta: f64) -> Unitary2 {
    let (s, c) = (theta / 2.0).sin_cos();
    Unitary2(Mat2::from_real(c, -s, s, c))
}

pub fn rx(theta: f64) -> Unitary2 {
    let (s, c) = (theta / 2.0).sin_cos();
    let ms = C64::new(0.0, -s);
    Unitary2(Mat2::new(c.into(), ms, ms, c.into()))
}

/// Haar-random unitary, deterministic in `seed`.
pub fn random_unitary(seed: u64) -> Unitary2 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = [0.0f64; 4];
    let norm = loop {
        for x in q.iter_mut() {
            *x = rng.sample(StandardNormal);
        }
        let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            break norm;
        }
    };
    let a = C64::new(q[0], q[1]) / norm;
    let b = C64::new(q[2], q[3]) / norm;
    let phi: f64 = rng.random_range(-PI..PI);
    let m = Mat2::new(a, -b.conj(), b, a.conj());
    Unitary2(m.scale(C64::from_polar(1.0, phi)))
}

/// Looks up a gate by name.
///
/// Fixed gates: `I X Y Z H S T`. Parameterized: `phase rx ry rz` take an
/// angle, `random` takes a non-negative integer seed.
///
/// ```
/// use mcu_synth::qmath::named_gate;
/// let g = named_gate("phase", Some(std::f64::consts::PI)).unwrap();
/// assert!(g.max_abs_diff(&named_gate("Z", None).unwrap()) < 1e-15);
/// ```
pub fn named_gate(name: &str, param: Option<f64>) -> Result<Unitary2> {
    let fixed = |u: Unitary2| match param {
        None => Ok(u),
        Some(_) => Err(Error::GateParameter { name: name.to_string(), reason: "takes no parameter".into() }),
    };
    let angle =
        || param.ok_or_else(|| Error::GateParameter { name: name.to_string(), reason: "requires an angle".into() });
    match name {
        "I" => fixed(Unitary2::IDENTITY),
        "X" => fixed(pauli_x()),
        "Y" => fixed(pauli_y()),
        "Z" => fixed(pauli_z()),
        "H" => fixed(hadamard()),
        "S" => fixed(phase(PI / 2.0)),
        "T" => fixed(phase(PI / 4.0)),
        "phase" => Ok(phase(angle()?)),
        "rx" => Ok(rx(angle()?)),
        "ry" => Ok(ry(angle()?)),
        "rz" => Ok(rz(angle()?)),
        "random" => {
            let s = angle()?;
            if s < 0.0 || s.fract() != 0.0 || s > u64::MAX as f64 {
                return Err(Error::GateParameter {
                    name: name.to_string(),
                    reason: format!("seed must be a non-negative integer, got {s}"),
                });
            }
            Ok(random_unitary(s as u64))
        }
        _ => Err(Error::UnknownGate(name.to_string())),
    }
}

/// Wraps an angle into `(−π, π]`. Values within 1e-12 of `−π` go to `π`
/// so that an eigenvalue of `−1` always gets phase `+π`.
fn wrap_angle(x: f64) -> f64 {
    let mut y = x.rem_euclid(TAU);
    if y > PI {
        y -= TAU;
    }
    if y <= -PI + 1e-12 {
        y += TAU;
    }
    y
}

/// Below this `sin θ` the matrix is treated as a scalar.
const DEGENERATE: f64 = 1e-12;

/// The principal `2^k`-th root: each eigenphase, taken in `(−π, π]`, is
/// divided by `2^k`.
///
/// Works on the form `U = e^{iφ}(cos θ·I + i sin θ·N)` with `N` Hermitian,
/// traceless and `N² = I`, so no eigenvector solve is needed.
///
/// ```
/// use mcu_synth::qmath::{named_gate, principal_root};
/// let z = named_gate("Z", None).unwrap();
/// let s = named_gate("S", None).unwrap();
/// assert!(principal_root(&z, 1).max_abs_diff(&s) < 1e-12);
/// ```
pub fn principal_root(u: &Unitary2, k: u32) -> Unitary2 {
    if k == 0 {
        return *u;
    }
    let scale = (k as f64).exp2();
    let m = u.mat();
    let phi = m.det().arg() / 2.0;
    let t = m.trace() / 2.0;
    let traceless = Mat2::new(m.0[0][0] - t, m.0[0][1], m.0[1][0], m.0[1][1] - t);
    let frob = traceless.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let unphased = C64::from_polar(1.0, -phi);
    let theta = (frob / 2f64.sqrt()).atan2((t * unphased).re);
    if theta.sin() < DEGENERATE {
        let p = wrap_angle(t.arg()) / scale;
        return Unitary2::IDENTITY.with_phase(p);
    }
    let n = traceless.scale(unphased / (C64::i() * theta.sin()));
    let q_plus = wrap_angle(phi + theta) / scale;
    let q_minus = wrap_angle(phi - theta) / scale;
    let half = (q_plus - q_minus) / 2.0;
    let (s, c) = half.sin_cos();
    let body = Mat2::IDENTITY.scale(c.into());
    let body = Mat2::new(
        body.0[0][0] + C64::i() * s * n.0[0][0],
        C64::i() * s * n.0[0][1],
        C64::i() * s * n.0[1][0],
        body.0[1][1] + C64::i() * s * n.0[1][1],
    );
    let root = body.scale(C64::from_polar(1.0, (q_plus + q_minus) / 2.0));
    Unitary2::from_product(root)
}

/// Euler angles with `V = e^{iα}·Rz(β)·Ry(γ)·Rz(δ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZyzAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl ZyzAngles {
    pub fn to_unitary(&self) -> Unitary2 {
        (rz(self.beta) * ry(self.gamma) * rz(self.delta)).with_phase(self.alpha)
    }
}

/// ZYZ Euler decomposition with `γ ∈ [0, π]`. When `γ` is 0 or `π` the
/// redundant angle is pinned to `δ = 0`.
pub fn zyz_angles(v: &Unitary2) -> ZyzAngles {
    let alpha = v.det().arg() / 2.0;
    let w = v.mat().scale(C64::from_polar(1.0, -alpha));
    let (w00, w10) = (w.0[0][0], w.0[1][0]);
    let gamma = 2.0 * w10.norm().atan2(w00.norm());
    let (sin_half, cos_half) = (gamma / 2.0).sin_cos();
    let (beta, gamma, delta) = if sin_half < DEGENERATE {
        (-2.0 * w00.arg(), 0.0, 0.0)
    } else if cos_half < DEGENERATE {
        (2.0 * w10.arg(), PI, 0.0)
    } else {
        (w10.arg() - w00.arg(), gamma, -w00.arg() - w10.arg())
    };
    let mut angles = ZyzAngles { alpha, beta, gamma, delta };
    // β is fixed only modulo 4π by W; pull it back towards (−π, π] and
    // move the resulting sign into α.
    if angles.beta > PI {
        angles.beta -= TAU;
        angles.alpha += PI;
    } else if angles.beta <= -PI {
        angles.beta += TAU;
        angles.alpha += PI;
    }
    angles.alpha = wrap_angle(angles.alpha);
    angles
}

/// The factorization `V = e^{ia}·D·X·E·X·F` with `D·E·F = I`.
///
/// In a circuit `F` acts first, so a controlled-`V` is
/// `F(t) CX E(t) CX D(t)` followed by `diag(1, e^{ia})` on the control.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AbcParts {
    pub a: f64,
    pub d: Unitary2,
    pub e: Unitary2,
    pub f: Unitary2,
}

impl AbcParts {
    /// The control-wire phase gate `diag(1, e^{ia})`.
    pub fn g(&self) -> Unitary2 {
        phase(self.a)
    }

    /// Parts for the inverse gate: `(F†, E†, D†, −a)`.
    pub fn inverse(&self) -> AbcParts {
        AbcParts { a: -self.a, d: self.f.adjoint(), e: self.e.adjoint(), f: self.d.adjoint() }
    }

    /// Maximum deviation of `D·E·F` from `I`.
    pub fn def_deviation(&self) -> f64 {
        (self.d * self.e * self.f).max_abs_diff(&Unitary2::IDENTITY)
    }

    /// `e^{ia}·D·X·E·X·F`.
    pub fn reconstruct(&self) -> Unitary2 {
        let x = pauli_x();
        (self.d * x * self.e * x * self.f).with_phase(self.a)
    }
}

/// Builds the controlled-gate factors from the ZYZ angles:
/// `D = Rz(β)Ry(γ/2)`, `E = Ry(−γ/2)Rz(−(δ+β)/2)`, `F = Rz((δ−β)/2)`, `a = α`.
///
/// ```
/// use mcu_synth::qmath::{abc_decompose, random_unitary};
/// let v = random_unitary(7);
/// let p = abc_decompose(&v);
/// assert!(p.def_deviation() < 1e-10);
/// assert!(p.reconstruct().max_abs_diff(&v) < 1e-10);
/// ```
pub fn abc_decompose(v: &Unitary2) -> AbcParts {
    let ZyzAngles { alpha, beta, gamma, delta } = zyz_angles(v);
    AbcParts {
        a: alpha,
        d: rz(beta) * ry(gamma / 2.0),
        e: ry(-gamma / 2.0) * rz(-(delta + beta) / 2.0),
        f: rz((delta - beta) / 2.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn validate_reports_deviation() {
        assert_eq!(validate_unitary(&Mat2::IDENTITY, 1e-12), (true, 0.0));
        assert!(validate_unitary(hadamard().mat(), 1e-12).0);
        let (ok, dev) = validate_unitary(&Mat2::from_real(1.0, 0.0, 0.0, 2.0), 1e-12);
        assert!(!ok);
        assert_eq!(dev, 3.0);
        assert!(Unitary2::new(Mat2::from_real(1.0, 0.0, 0.0, 2.0)).is_err());
    }

    #[test]
    fn named_gates() {
        assert_eq!(named_gate("X", None).unwrap().mat(), &Mat2::from_real(0.0, 1.0, 1.0, 0.0));
        let a = 0.3;
        let g = named_gate("phase", Some(a)).unwrap();
        assert!((g.entry(1, 1) - C64::from_polar(1.0, a)).norm() < 1e-15);
        let r = named_gate("ry", Some(PI / 4.0)).unwrap();
        let (s, co) = (PI / 8.0).sin_cos();
        assert!(r.mat().max_abs_diff(&Mat2::from_real(co, -s, s, co)) < 1e-15);
        assert!(named_gate("Q", None).is_err());
        assert!(named_gate("X", Some(1.0)).is_err());
        assert!(named_gate("rz", None).is_err());
        assert!(named_gate("random", Some(1.5)).is_err());
        assert_eq!(named_gate("random", Some(3.0)).unwrap(), named_gate("random", Some(3.0)).unwrap());
    }

    #[test]
    fn roots_of_paulis() {
        for k in 0..6 {
            assert!(principal_root(&Unitary2::IDENTITY, k).max_abs_diff(&Unitary2::IDENTITY) < 1e-15);
        }
        let s = principal_root(&pauli_z(), 1);
        assert!(s.mat().max_abs_diff(&Mat2::new(ONE, ZERO, ZERO, C64::i())) < 1e-12);
        let v = principal_root(&pauli_x(), 1);
        let expect = Mat2::new(c(1.0, 1.0), c(1.0, -1.0), c(1.0, -1.0), c(1.0, 1.0)).scale(c(0.5, 0.0));
        assert!(v.mat().max_abs_diff(&expect) < 1e-12);
        assert!((v * v).max_abs_diff(&pauli_x()) < 1e-12);
    }

    #[test]
    fn root_of_scalar() {
        let u = Unitary2::IDENTITY.with_phase(PI);
        let r = principal_root(&u, 2);
        assert!(r.max_abs_diff(&Unitary2::IDENTITY.with_phase(PI / 4.0)) < 1e-12);
    }

    #[test]
    fn zyz_examples() {
        let z = zyz_angles(&Unitary2::IDENTITY);
        assert_eq!((z.alpha, z.beta, z.gamma, z.delta), (0.0, 0.0, 0.0, 0.0));
        for theta in [-3.0, -1.0, 0.2, 2.5] {
            let z = zyz_angles(&rz(theta));
            assert!(z.alpha.abs() < 1e-12, "{z:?}");
            assert!((z.beta - theta).abs() < 1e-12);
            assert_eq!((z.gamma, z.delta), (0.0, 0.0));
        }
        for u in [pauli_x(), pauli_y(), hadamard(), phase(0.4)] {
            let z = zyz_angles(&u);
            assert!(z.to_unitary().max_abs_diff(&u) < 1e-10, "{u}");
            assert!((0.0..=PI).contains(&z.gamma));
        }
    }

    #[test]
    fn abc_examples() {
        let p = abc_decompose(&Unitary2::IDENTITY);
        assert_eq!(p.a, 0.0);
        for m in [p.d, p.e, p.f] {
            assert!(m.max_abs_diff(&Unitary2::IDENTITY) < 1e-15);
        }
        for v in [pauli_z(), principal_root(&pauli_x(), 3)] {
            let p = abc_decompose(&v);
            assert!(p.def_deviation() < 1e-10);
            assert!(p.reconstruct().max_abs_diff(&v) < 1e-10);
            let q = p.inverse();
            assert!(q.reconstruct().max_abs_diff(&v.adjoint()) < 1e-10);
        }
    }
}
