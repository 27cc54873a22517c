use std::fmt;

use serde::{Deserialize, Serialize};

use super::pauli::{Letter, PauliOp, Qubit};

/// Stable identifier of a gate event inside a scheduled circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LocationId(pub u32);

impl fmt::Display for LocationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}", self.0)
    }
}

/// Single-qubit measurement or preparation basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    X,
    Z,
}

impl Basis {
    pub fn letter(self) -> Letter {
        match self {
            Basis::X => Letter::X,
            Basis::Z => Letter::Z,
        }
    }

    pub fn other(self) -> Basis {
        match self {
            Basis::X => Basis::Z,
            Basis::Z => Basis::X,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    InitZ(Qubit),
    InitX(Qubit),
    Hadamard(Qubit),
    Cnot { control: Qubit, target: Qubit },
    Swap(Qubit, Qubit),
    MeasZ(Qubit),
    MeasX(Qubit),
    Idle(Qubit),
}

impl GateKind {
    pub fn qubits(&self) -> Vec<Qubit> {
        match *self {
            GateKind::Cnot { control, target } => vec![control, target],
            GateKind::Swap(a, b) => vec![a, b],
            GateKind::InitZ(q)
            | GateKind::InitX(q)
            | GateKind::Hadamard(q)
            | GateKind::MeasZ(q)
            | GateKind::MeasX(q)
            | GateKind::Idle(q) => vec![q],
        }
    }

    pub fn is_unitary(&self) -> bool {
        matches!(self, GateKind::Hadamard(_) | GateKind::Cnot { .. } | GateKind::Swap(..) | GateKind::Idle(_))
    }

    pub fn measurement(&self) -> Option<(Basis, Qubit)> {
        match *self {
            GateKind::MeasZ(q) => Some((Basis::Z, q)),
            GateKind::MeasX(q) => Some((Basis::X, q)),
            _ => None,
        }
    }

    pub fn init(&self) -> Option<(Basis, Qubit)> {
        match *self {
            GateKind::InitZ(q) => Some((Basis::Z, q)),
            GateKind::InitX(q) => Some((Basis::X, q)),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::InitZ(_) => "INIT_Z",
            GateKind::InitX(_) => "INIT_X",
            GateKind::Hadamard(_) => "HADAMARD",
            GateKind::Cnot { .. } => "CNOT",
            GateKind::Swap(..) => "SWAP",
            GateKind::MeasZ(_) => "MEAS_Z",
            GateKind::MeasX(_) => "MEAS_X",
            GateKind::Idle(_) => "IDLE",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let qs = self.qubits();
        write!(f, "{}", self.name())?;
        for q in qs {
            write!(f, " {q}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GateEvent {
    pub kind: GateKind,
    pub time: u32,
    pub location: LocationId,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GateError {
    #[error("cannot conjugate through non-unitary gate {0}")]
    NotUnitary(GateKind),
    #[error("two-qubit gate {0} acts on the same qubit twice")]
    RepeatedQubit(GateKind),
}

/// Symplectic bits of `p` on qubit `q`.
#[inline]
fn bits(p: &PauliOp, q: Qubit) -> (bool, bool) {
    p.letter(q).map_or((false, false), Letter::bits)
}

/// Returns `g · p · g†` for a unitary gate.
pub fn conjugate_through(p: &PauliOp, g: &GateKind) -> Result<PauliOp, GateError> {
    let mut out = p.clone();
    match *g {
        GateKind::Idle(_) => {}
        GateKind::Hadamard(q) => {
            let (x, z) = bits(p, q);
            out.set(q, Letter::from_bits(z, x));
            if x && z {
                out = out.negated();
            }
        }
        GateKind::Cnot { control: c, target: t } => {
            if c == t {
                return Err(GateError::RepeatedQubit(*g));
            }
            let (xc, zc) = bits(p, c);
            let (xt, zt) = bits(p, t);
            if xc && zt && !(xt ^ zc) {
                out = out.negated();
            }
            out.set(c, Letter::from_bits(xc, zc ^ zt));
            out.set(t, Letter::from_bits(xt ^ xc, zt));
        }
        GateKind::Swap(a, b) => {
            if a == b {
                return Err(GateError::RepeatedQubit(*g));
            }
            let la = p.letter(a);
            out.set(a, p.letter(b));
            out.set(b, la);
        }
        _ => return Err(GateError::NotUnitary(*g)),
    }
    Ok(out)
}
