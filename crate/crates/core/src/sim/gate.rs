use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    X,
    H,
    Rx,
    Ry,
    Rz,
    Cx,
    Rzz,
    /// Partial iSWAP generated by XX+YY: `exp(-i θ/4 (XX + YY))`.
    Xy,
}

impl GateKind {
    pub const ALL: [GateKind; 8] = [
        GateKind::X,
        GateKind::H,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::Cx,
        GateKind::Rzz,
        GateKind::Xy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::H => "H",
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::Cx => "CX",
            GateKind::Rzz => "RZZ",
            GateKind::Xy => "XY",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::Cx | GateKind::Rzz | GateKind::Xy => 2,
            _ => 1,
        }
    }

    pub fn is_parameterized(self) -> bool {
        !matches!(self, GateKind::X | GateKind::H | GateKind::Cx)
    }

    /// Dense unitary in the local basis `|q1 q0>` with the first listed qubit
    /// as the least-significant bit.
    pub fn matrix(self, theta: f64) -> Vec<Vec<Complex64>> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let (co, si) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        match self {
            GateKind::X => vec![vec![c(0., 0.), c(1., 0.)], vec![c(1., 0.), c(0., 0.)]],
            GateKind::H => {
                let h = FRAC_1_SQRT_2;
                vec![vec![c(h, 0.), c(h, 0.)], vec![c(h, 0.), c(-h, 0.)]]
            }
            GateKind::Rx => vec![vec![c(co, 0.), c(0., -si)], vec![c(0., -si), c(co, 0.)]],
            GateKind::Ry => vec![vec![c(co, 0.), c(-si, 0.)], vec![c(si, 0.), c(co, 0.)]],
            GateKind::Rz => vec![vec![c(co, -si), c(0., 0.)], vec![c(0., 0.), c(co, si)]],
            GateKind::Cx => {
                // control = first qubit (bit 0), target = second (bit 1)
                let mut m = vec![vec![c(0., 0.); 4]; 4];
                m[0][0] = c(1., 0.);
                m[2][2] = c(1., 0.);
                m[3][1] = c(1., 0.);
                m[1][3] = c(1., 0.);
                m
            }
            GateKind::Rzz => {
                let mut m = vec![vec![c(0., 0.); 4]; 4];
                for (i, row) in m.iter_mut().enumerate() {
                    let parity = (i & 1) ^ (i >> 1);
                    row[i] = if parity == 0 { c(co, -si) } else { c(co, si) };
                }
                m
            }
            GateKind::Xy => {
                let mut m = vec![vec![c(0., 0.); 4]; 4];
                m[0][0] = c(1., 0.);
                m[3][3] = c(1., 0.);
                m[1][1] = c(co, 0.);
                m[2][2] = c(co, 0.);
                m[1][2] = c(0., -si);
                m[2][1] = c(0., -si);
                m
            }
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        GateKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown gate {s:?}"))
    }
}

/// Rotation angle of a parameterized gate. A slot angle resolves to
/// `scale * params[index]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    Fixed(f64),
    Slot { index: usize, scale: f64 },
}

impl Angle {
    pub fn slot(index: usize) -> Self {
        Angle::Slot { index, scale: 1.0 }
    }

    pub fn resolve(&self, binding: Option<f64>) -> Result<f64> {
        match *self {
            Angle::Fixed(v) => Ok(v),
            Angle::Slot { scale, .. } => binding
                .map(|b| scale * b)
                .ok_or(Error::UnboundParameter),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    kind: GateKind,
    qubits: [usize; 2],
    angle: Option<Angle>,
}

impl GateOp {
    pub fn new(kind: GateKind, qubits: &[usize], angle: Option<Angle>) -> Result<Self> {
        if qubits.len() != kind.arity() {
            return Err(Error::GateArity {
                kind: kind.name(),
                expected: kind.arity(),
                got: qubits.len(),
            });
        }
        if kind.arity() == 2 && qubits[0] == qubits[1] {
            return Err(Error::RepeatedQubit(qubits[0]));
        }
        match (kind.is_parameterized(), angle) {
            (true, None) => {
                return Err(Error::GateAngle {
                    kind: kind.name(),
                    reason: "rotation gate needs an angle",
                })
            }
            (false, Some(_)) => {
                return Err(Error::GateAngle {
                    kind: kind.name(),
                    reason: "fixed gate takes no angle",
                })
            }
            _ => {}
        }
        let second = if kind.arity() == 2 { qubits[1] } else { qubits[0] };
        Ok(Self {
            kind,
            qubits: [qubits[0], second],
            angle,
        })
    }

    pub fn x(q: usize) -> Self {
        Self::new(GateKind::X, &[q], None).expect("valid")
    }

    pub fn h(q: usize) -> Self {
        Self::new(GateKind::H, &[q], None).expect("valid")
    }

    pub fn rx(q: usize, angle: Angle) -> Self {
        Self::new(GateKind::Rx, &[q], Some(angle)).expect("valid")
    }

    pub fn ry(q: usize, angle: Angle) -> Self {
        Self::new(GateKind::Ry, &[q], Some(angle)).expect("valid")
    }

    pub fn rz(q: usize, angle: Angle) -> Self {
        Self::new(GateKind::Rz, &[q], Some(angle)).expect("valid")
    }

    pub fn cx(control: usize, target: usize) -> Result<Self> {
        Self::new(GateKind::Cx, &[control, target], None)
    }

    pub fn rzz(a: usize, b: usize, angle: Angle) -> Result<Self> {
        Self::new(GateKind::Rzz, &[a, b], Some(angle))
    }

    pub fn xy(a: usize, b: usize, angle: Angle) -> Result<Self> {
        Self::new(GateKind::Xy, &[a, b], Some(angle))
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }

    pub fn angle(&self) -> Option<Angle> {
        self.angle
    }

    pub fn slot(&self) -> Option<usize> {
        match self.angle {
            Some(Angle::Slot { index, .. }) => Some(index),
            _ => None,
        }
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        for q in self.qubits() {
            write!(f, " {q}")?;
        }
        match self.angle {
            None => Ok(()),
            Some(Angle::Fixed(v)) => write!(f, " {v:?}"),
            Some(Angle::Slot { index, scale: 1.0 }) => write!(f, " p{index}"),
            Some(Angle::Slot { index, scale }) => write!(f, " p{index}*{scale:?}"),
        }
    }
}
