use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Index of a physical qubit inside a scheduled circuit.
pub type Qubit = u32;

/// A non-identity single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    X,
    Y,
    Z,
}

impl Letter {
    pub const ALL: [Letter; 3] = [Letter::X, Letter::Y, Letter::Z];

    /// Symplectic `(x, z)` bits.
    #[inline]
    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    #[inline]
    pub fn from_bits(x: bool, z: bool) -> Option<Letter> {
        match (x, z) {
            (false, false) => None,
            (true, false) => Some(Letter::X),
            (true, true) => Some(Letter::Y),
            (false, true) => Some(Letter::Z),
        }
    }

    #[inline]
    pub fn commutes_with(self, other: Letter) -> bool {
        self == other
    }

    fn as_char(self) -> char {
        match self {
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

/// Exponent `k` (mod 4) such that `a·b = i^k · c` for single-qubit letters.
#[inline]
fn letter_product(a: Letter, b: Letter) -> (u8, Option<Letter>) {
    use Letter::*;
    match (a, b) {
        (X, X) | (Y, Y) | (Z, Z) => (0, None),
        (X, Y) => (1, Some(Z)),
        (Y, Z) => (1, Some(X)),
        (Z, X) => (1, Some(Y)),
        (Y, X) => (3, Some(Z)),
        (Z, Y) => (3, Some(X)),
        (X, Z) => (3, Some(Y)),
    }
}

/// A power of `i`: the global phase of a product of Paulis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: u8) -> Phase {
        Phase(k % 4)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }
}

impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

/// Hermitian multi-qubit Pauli operator with a `±1` sign.
///
/// The support map never stores identities; a qubit absent from the map
/// carries `I`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct PauliOp {
    support: BTreeMap<Qubit, Letter>,
    negative: bool,
}

impl PauliOp {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn single(qubit: Qubit, letter: Letter) -> Self {
        let mut support = BTreeMap::new();
        support.insert(qubit, letter);
        Self { support, negative: false }
    }

    /// Same letter on every listed qubit.
    pub fn uniform<I: IntoIterator<Item = Qubit>>(letter: Letter, qubits: I) -> Self {
        Self::from_letters(qubits.into_iter().map(|q| (q, letter)))
    }

    /// Builds a positive operator. Repeated qubits are multiplied together,
    /// so the input must describe a Hermitian product (the phase is dropped
    /// only when it is real).
    pub fn from_letters<I: IntoIterator<Item = (Qubit, Letter)>>(letters: I) -> Self {
        let mut out = PhasedPauli::identity();
        for (q, l) in letters {
            out = out * &PauliOp::single(q, l);
        }
        out.into_hermitian().expect("letters must multiply to a Hermitian operator")
    }

    pub fn with_sign(mut self, negative: bool) -> Self {
        self.negative = negative;
        self
    }

    pub fn negated(mut self) -> Self {
        self.negative = !self.negative;
        self
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    /// `+1` or `-1`.
    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn letter(&self, qubit: Qubit) -> Option<Letter> {
        self.support.get(&qubit).copied()
    }

    pub fn support(&self) -> impl Iterator<Item = (Qubit, Letter)> + '_ {
        self.support.iter().map(|(&q, &l)| (q, l))
    }

    pub fn qubits(&self) -> impl Iterator<Item = Qubit> + '_ {
        self.support.keys().copied()
    }

    pub fn weight(&self) -> usize {
        self.support.len()
    }

    pub fn is_identity(&self) -> bool {
        self.support.is_empty()
    }

    /// Unsigned copy.
    pub fn unsigned(&self) -> PauliOp {
        PauliOp { support: self.support.clone(), negative: false }
    }

    /// Replaces the letter on one qubit (`None` clears it).
    pub fn set(&mut self, qubit: Qubit, letter: Option<Letter>) {
        match letter {
            Some(l) => {
                self.support.insert(qubit, l);
            }
            None => {
                self.support.remove(&qubit);
            }
        }
    }

    pub fn remove(&mut self, qubit: Qubit) -> Option<Letter> {
        self.support.remove(&qubit)
    }

    pub fn commutes_with(&self, other: &PauliOp) -> bool {
        let (small, large) = if self.weight() <= other.weight() { (self, other) } else { (other, self) };
        let anti = small
            .support
            .iter()
            .filter(|(q, l)| large.support.get(q).is_some_and(|m| !l.commutes_with(*m)))
            .count();
        anti % 2 == 0
    }

    /// Group product `self · other`, including any `±i` phase.
    pub fn multiply(&self, other: &PauliOp) -> PhasedPauli {
        PhasedPauli::from(self.clone()) * other
    }
}

impl fmt::Display for PauliOp {
    /// `+X0 Z3`, `-Y2`, or `+I`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.negative { "-" } else { "+" })?;
        if self.support.is_empty() {
            return f.write_str("I");
        }
        for (n, (q, l)) in self.support.iter().enumerate() {
            if n > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}{}", l.as_char(), q)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse Pauli operator from {0:?}")]
pub struct ParsePauliError(String);

impl FromStr for PauliOp {
    type Err = ParsePauliError;

    /// Parses the [`Display`](fmt::Display) form; the leading sign is optional.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParsePauliError(s.to_string());
        let s = s.trim();
        let (negative, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let body = body.trim();
        if body == "I" || body.is_empty() {
            return Ok(PauliOp::identity().with_sign(negative));
        }
        let mut letters = Vec::new();
        for tok in body.split_whitespace() {
            let mut chars = tok.chars();
            let letter = match chars.next() {
                Some('X') => Letter::X,
                Some('Y') => Letter::Y,
                Some('Z') => Letter::Z,
                _ => return Err(err()),
            };
            let q: Qubit = chars.as_str().parse().map_err(|_| err())?;
            letters.push((q, letter));
        }
        let mut seen = std::collections::BTreeSet::new();
        if !letters.iter().all(|(q, _)| seen.insert(*q)) {
            return Err(err());
        }
        Ok(PauliOp::from_letters(letters).with_sign(negative))
    }
}

impl Serialize for PauliOp {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliOp {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A Pauli string with an arbitrary `i^k` phase. Only appears as the
/// intermediate result of multiplication.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PhasedPauli {
    pub phase: Phase,
    /// Always stored with positive sign; the sign lives in `phase`.
    pub op: PauliOp,
}

impl PhasedPauli {
    pub fn identity() -> Self {
        Self { phase: Phase::ONE, op: PauliOp::identity() }
    }

    /// Collapses to a signed Hermitian operator, or `None` if the phase is `±i`.
    pub fn into_hermitian(self) -> Option<PauliOp> {
        match self.phase {
            Phase::ONE => Some(self.op.with_sign(false)),
            Phase::MINUS_ONE => Some(self.op.with_sign(true)),
            _ => None,
        }
    }
}

impl From<PauliOp> for PhasedPauli {
    fn from(op: PauliOp) -> Self {
        let phase = if op.negative { Phase::MINUS_ONE } else { Phase::ONE };
        Self { phase, op: op.with_sign(false) }
    }
}

impl Mul<&PauliOp> for PhasedPauli {
    type Output = PhasedPauli;

    fn mul(mut self, rhs: &PauliOp) -> PhasedPauli {
        let mut k = self.phase.exponent() + if rhs.negative { 2 } else { 0 };
        for (&q, &b) in &rhs.support {
            match self.op.support.get(&q).copied() {
                None => {
                    self.op.support.insert(q, b);
                }
                Some(a) => {
                    let (e, c) = letter_product(a, b);
                    k += e;
                    self.op.set(q, c);
                }
            }
        }
        self.phase = Phase::from_exponent(k);
        self
    }
}

impl Mul<&PhasedPauli> for PhasedPauli {
    type Output = PhasedPauli;

    fn mul(self, rhs: &PhasedPauli) -> PhasedPauli {
        let phase = rhs.phase;
        let mut out = self * &rhs.op;
        out.phase = out.phase * phase;
        out
    }
}

/// Group product of two Hermitian Paulis.
pub fn pauli_multiply(a: &PauliOp, b: &PauliOp) -> PhasedPauli {
    a.multiply(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliOp {
        s.parse().unwrap()
    }

    /// 2x2 complex matrices as [[re, im]; 4], row-major.
    type M2 = [[f64; 2]; 4];

    fn mat(l: Option<Letter>) -> M2 {
        match l {
            None => [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]],
            Some(Letter::X) => [[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [0.0, 0.0]],
            Some(Letter::Y) => [[0.0, 0.0], [0.0, -1.0], [0.0, 1.0], [0.0, 0.0]],
            Some(Letter::Z) => [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [-1.0, 0.0]],
        }
    }

    fn matmul(a: &M2, b: &M2) -> M2 {
        let mut out = [[0.0; 2]; 4];
        for r in 0..2 {
            for c in 0..2 {
                for k in 0..2 {
                    let (x, y) = (a[r * 2 + k], b[k * 2 + c]);
                    out[r * 2 + c][0] += x[0] * y[0] - x[1] * y[1];
                    out[r * 2 + c][1] += x[0] * y[1] + x[1] * y[0];
                }
            }
        }
        out
    }

    fn scale(m: &M2, phase: Phase) -> M2 {
        let (re, im) = match phase.exponent() {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        };
        let mut out = *m;
        for e in out.iter_mut() {
            *e = [e[0] * re - e[1] * im, e[0] * im + e[1] * re];
        }
        out
    }

    #[test]
    fn single_qubit_products_match_matrices() {
        let letters = [None, Some(Letter::X), Some(Letter::Y), Some(Letter::Z)];
        for a in letters {
            for b in letters {
                let pa = a.map_or_else(PauliOp::identity, |l| PauliOp::single(0, l));
                let pb = b.map_or_else(PauliOp::identity, |l| PauliOp::single(0, l));
                let prod = pauli_multiply(&pa, &pb);
                let expected = matmul(&mat(a), &mat(b));
                let got = scale(&mat(prod.op.letter(0)), prod.phase);
                for (g, e) in got.iter().zip(expected.iter()) {
                    assert!((g[0] - e[0]).abs() < 1e-12 && (g[1] - e[1]).abs() < 1e-12, "{a:?}*{b:?}");
                }
            }
        }
    }

    #[test]
    fn disjoint_product_is_tensor() {
        let r = pauli_multiply(&p("X0"), &p("X1")).into_hermitian().unwrap();
        assert_eq!(r, p("+X0 X1"));
    }

    #[test]
    fn involution() {
        let r = pauli_multiply(&p("X0"), &p("X0")).into_hermitian().unwrap();
        assert_eq!(r, PauliOp::identity());
        assert_eq!(r.sign(), 1);
    }

    #[test]
    fn xz_and_zx_differ_by_minus_one() {
        let xz = pauli_multiply(&p("X0"), &p("Z0"));
        let zx = pauli_multiply(&p("Z0"), &p("X0"));
        assert_eq!(xz.op, zx.op);
        assert_eq!(xz.phase * Phase::MINUS_ONE, zx.phase);
        assert_eq!(xz.phase, Phase::MINUS_I);
        assert!(!p("X0").commutes_with(&p("Z0")));
    }

    #[test]
    fn display_roundtrip() {
        for s in ["+I", "-I", "+X0 Z3", "-Y2", "+X1 Y4 Z7"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert!("+Q1".parse::<PauliOp>().is_err());
        assert!("X1 Z1".parse::<PauliOp>().is_err());
    }
}
