//! Pauli operators, Clifford gate events and a stabilizer tableau.

mod gate;
mod pauli;
mod tableau;

pub use gate::{conjugate_through, Basis, GateError, GateEvent, GateKind, LocationId};
pub use pauli::{pauli_multiply, Letter, ParsePauliError, PauliOp, Phase, PhasedPauli, Qubit};
pub use tableau::{Measurement, Tableau, TableauError};
