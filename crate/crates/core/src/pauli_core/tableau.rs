//! Stabilizer tableau in the Aaronson–Gottesman layout.
//!
//! Rows `0..n` are destabilizers, rows `n..2n` stabilizers and row `2n` is
//! scratch space for deterministic measurements. Each row stores packed `x`
//! and `z` bit vectors plus a sign bit.

use rand::Rng;

use super::gate::{Basis, GateKind};
use super::pauli::{Letter, PauliOp, Qubit};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TableauError {
    #[error("qubit {qubit} out of range for a {n}-qubit tableau")]
    OutOfRange { qubit: Qubit, n: usize },
    #[error("measurement {0} must go through Tableau::measure")]
    Measurement(GateKind),
    #[error("two-qubit gate {0} acts on the same qubit twice")]
    RepeatedQubit(GateKind),
}

/// Outcome of a measurement: `value` is `+1` or `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Measurement {
    pub value: i8,
    pub deterministic: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    words: usize,
    xs: Vec<u64>,
    zs: Vec<u64>,
    signs: Vec<bool>,
}

impl Tableau {
    /// The all-`|0⟩` state on `n` qubits.
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        let rows = 2 * n + 1;
        let mut t = Tableau { n, words, xs: vec![0; rows * words], zs: vec![0; rows * words], signs: vec![false; rows] };
        for q in 0..n {
            t.set_x(q, q, true);
            t.set_z(n + q, q, true);
        }
        t
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    fn get_x(&self, row: usize, q: usize) -> bool {
        self.xs[row * self.words + q / 64] >> (q % 64) & 1 == 1
    }

    #[inline]
    fn get_z(&self, row: usize, q: usize) -> bool {
        self.zs[row * self.words + q / 64] >> (q % 64) & 1 == 1
    }

    #[inline]
    fn set_x(&mut self, row: usize, q: usize, v: bool) {
        let w = &mut self.xs[row * self.words + q / 64];
        *w = (*w & !(1 << (q % 64))) | ((v as u64) << (q % 64));
    }

    #[inline]
    fn set_z(&mut self, row: usize, q: usize, v: bool) {
        let w = &mut self.zs[row * self.words + q / 64];
        *w = (*w & !(1 << (q % 64))) | ((v as u64) << (q % 64));
    }

    fn check(&self, q: Qubit) -> Result<usize, TableauError> {
        let q = q as usize;
        if q < self.n {
            Ok(q)
        } else {
            Err(TableauError::OutOfRange { qubit: q as Qubit, n: self.n })
        }
    }

    fn hadamard(&mut self, q: usize) {
        for row in 0..2 * self.n {
            let (x, z) = (self.get_x(row, q), self.get_z(row, q));
            self.signs[row] ^= x & z;
            self.set_x(row, q, z);
            self.set_z(row, q, x);
        }
    }

    /// Phase gate `S`. Not part of the circuit vocabulary; kept for
    /// generating random Clifford circuits in tests.
    pub fn phase(&mut self, q: Qubit) -> Result<(), TableauError> {
        let q = self.check(q)?;
        for row in 0..2 * self.n {
            let (x, z) = (self.get_x(row, q), self.get_z(row, q));
            self.signs[row] ^= x & z;
            self.set_z(row, q, z ^ x);
        }
        Ok(())
    }

    fn cnot(&mut self, c: usize, t: usize) {
        for row in 0..2 * self.n {
            let (xc, zc) = (self.get_x(row, c), self.get_z(row, c));
            let (xt, zt) = (self.get_x(row, t), self.get_z(row, t));
            self.signs[row] ^= xc & zt & !(xt ^ zc);
            self.set_x(row, t, xt ^ xc);
            self.set_z(row, c, zc ^ zt);
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        for row in 0..2 * self.n {
            let (xa, za) = (self.get_x(row, a), self.get_z(row, a));
            let (xb, zb) = (self.get_x(row, b), self.get_z(row, b));
            self.set_x(row, a, xb);
            self.set_z(row, a, zb);
            self.set_x(row, b, xa);
            self.set_z(row, b, za);
        }
    }

    /// Applies a unitary or initialization event. Initialization resets the
    /// qubit, so it consumes randomness when the qubit was entangled.
    pub fn apply<R: Rng + ?Sized>(&mut self, g: &GateKind, rng: &mut R) -> Result<(), TableauError> {
        match *g {
            GateKind::Idle(q) => {
                self.check(q)?;
            }
            GateKind::Hadamard(q) => {
                let q = self.check(q)?;
                self.hadamard(q);
            }
            GateKind::Cnot { control, target } => {
                let (c, t) = (self.check(control)?, self.check(target)?);
                if c == t {
                    return Err(TableauError::RepeatedQubit(*g));
                }
                self.cnot(c, t);
            }
            GateKind::Swap(a, b) => {
                let (a, b) = (self.check(a)?, self.check(b)?);
                if a == b {
                    return Err(TableauError::RepeatedQubit(*g));
                }
                self.swap(a, b);
            }
            GateKind::InitZ(q) => self.reset(Basis::Z, q, rng)?,
            GateKind::InitX(q) => self.reset(Basis::X, q, rng)?,
            GateKind::MeasZ(_) | GateKind::MeasX(_) => return Err(TableauError::Measurement(*g)),
        }
        Ok(())
    }

    /// Prepares `q` in the `+1` eigenstate of the basis operator.
    pub fn reset<R: Rng + ?Sized>(&mut self, basis: Basis, q: Qubit, rng: &mut R) -> Result<(), TableauError> {
        let m = self.measure(basis, q, rng)?;
        if m.value < 0 {
            let flip = PauliOp::single(q, basis.other().letter());
            self.apply_pauli(&flip);
        }
        Ok(())
    }

    pub fn measure<R: Rng + ?Sized>(&mut self, basis: Basis, q: Qubit, rng: &mut R) -> Result<Measurement, TableauError> {
        self.check(q)?;
        Ok(self.measure_pauli(&PauliOp::single(q, basis.letter()), rng))
    }

    /// `true` if row anticommutes with `p`.
    fn row_anticommutes(&self, row: usize, p: &PauliOp) -> bool {
        let mut parity = false;
        for (q, l) in p.support() {
            let q = q as usize;
            let (px, pz) = l.bits();
            parity ^= (self.get_x(row, q) & pz) ^ (self.get_z(row, q) & px);
        }
        parity
    }

    /// Row `h` ← row `i` · row `h`, keeping the sign exact whenever the two
    /// rows commute.
    fn rowsum(&mut self, h: usize, i: usize) {
        let w = self.words;
        let mut plus = 0u32;
        let mut minus = 0u32;
        for k in 0..w {
            let (x1, z1) = (self.xs[i * w + k], self.zs[i * w + k]);
            let (x2, z2) = (self.xs[h * w + k], self.zs[h * w + k]);
            // Phase exponent of the single-qubit product (x1,z1)·(x2,z2).
            let p = (x1 & !z1 & x2 & z2) | (x1 & z1 & !x2 & z2) | (!x1 & z1 & x2 & !z2);
            let m = (x1 & !z1 & !x2 & z2) | (x1 & z1 & x2 & !z2) | (!x1 & z1 & x2 & z2);
            plus += p.count_ones();
            minus += m.count_ones();
        }
        let total = 2 * (self.signs[h] as u32) + 2 * (self.signs[i] as u32) + plus + 3 * minus;
        self.signs[h] = total % 4 == 2;
        for k in 0..w {
            self.xs[h * w + k] ^= self.xs[i * w + k];
            self.zs[h * w + k] ^= self.zs[i * w + k];
        }
    }

    fn copy_row(&mut self, dst: usize, src: usize) {
        let w = self.words;
        self.xs.copy_within(src * w..(src + 1) * w, dst * w);
        self.zs.copy_within(src * w..(src + 1) * w, dst * w);
        self.signs[dst] = self.signs[src];
    }

    fn write_row(&mut self, row: usize, p: &PauliOp) {
        let w = self.words;
        self.xs[row * w..(row + 1) * w].fill(0);
        self.zs[row * w..(row + 1) * w].fill(0);
        for (q, l) in p.support() {
            let (x, z) = l.bits();
            self.set_x(row, q as usize, x);
            self.set_z(row, q as usize, z);
        }
        self.signs[row] = p.is_negative();
    }

    fn clear_row(&mut self, row: usize) {
        self.write_row(row, &PauliOp::identity());
    }

    fn row_op(&self, row: usize) -> PauliOp {
        let mut out = PauliOp::identity().with_sign(self.signs[row]);
        for q in 0..self.n {
            out.set(q as Qubit, Letter::from_bits(self.get_x(row, q), self.get_z(row, q)));
        }
        out
    }

    /// First stabilizer row anticommuting with `p`, if any.
    fn pivot(&self, p: &PauliOp) -> Option<usize> {
        (self.n..2 * self.n).find(|&r| self.row_anticommutes(r, p))
    }

    /// Deterministic sign of `p` (ignoring its own sign) via the scratch row.
    fn scratch_sign(&mut self, p: &PauliOp) -> bool {
        let scratch = 2 * self.n;
        self.clear_row(scratch);
        for i in 0..self.n {
            if self.row_anticommutes(i, p) {
                self.rowsum(scratch, self.n + i);
            }
        }
        self.signs[scratch]
    }

    /// Measures a Hermitian multi-qubit Pauli. The outcome is reported
    /// relative to `p` including its sign.
    pub fn measure_pauli<R: Rng + ?Sized>(&mut self, p: &PauliOp, rng: &mut R) -> Measurement {
        let unsigned = p.unsigned();
        match self.pivot(&unsigned) {
            Some(piv) => {
                for row in 0..2 * self.n {
                    if row != piv && self.row_anticommutes(row, &unsigned) {
                        self.rowsum(row, piv);
                    }
                }
                self.copy_row(piv - self.n, piv);
                let negative: bool = rng.random();
                self.write_row(piv, &unsigned.clone().with_sign(negative));
                let v = if negative { -1 } else { 1 };
                Measurement { value: v * p.sign(), deterministic: false }
            }
            None => {
                let negative = self.scratch_sign(&unsigned);
                let v = if negative { -1 } else { 1 };
                Measurement { value: v * p.sign(), deterministic: true }
            }
        }
    }

    /// Expectation of `p` if it is `±1` on the current state, `None` when
    /// the outcome would be random.
    pub fn expectation(&mut self, p: &PauliOp) -> Option<i8> {
        let unsigned = p.unsigned();
        if self.pivot(&unsigned).is_some() {
            return None;
        }
        let negative = self.scratch_sign(&unsigned);
        Some(if negative { -p.sign() } else { p.sign() })
    }

    /// Applies a Pauli operator as a gate (sign is irrelevant).
    pub fn apply_pauli(&mut self, p: &PauliOp) {
        for row in 0..2 * self.n {
            if self.row_anticommutes(row, p) {
                self.signs[row] ^= true;
            }
        }
    }

    /// The signed stabilizer generator that `measure_pauli(p)` would pivot
    /// on, or `None` if the outcome is deterministic.
    pub fn anticommuting_stabilizer(&self, p: &PauliOp) -> Option<PauliOp> {
        self.pivot(&p.unsigned()).map(|r| self.row_op(r))
    }

    pub fn stabilizers(&self) -> Vec<PauliOp> {
        (self.n..2 * self.n).map(|r| self.row_op(r)).collect()
    }

    pub fn destabilizers(&self) -> Vec<PauliOp> {
        (0..self.n).map(|r| self.row_op(r)).collect()
    }

    /// Checks the symplectic structure of the rows.
    pub fn is_consistent(&self) -> bool {
        let stab = self.stabilizers();
        let destab = self.destabilizers();
        for i in 0..self.n {
            for j in 0..self.n {
                if !stab[i].commutes_with(&stab[j]) {
                    return false;
                }
                if destab[i].commutes_with(&stab[j]) == (i == j) {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn init_then_measure_is_deterministic() {
        let mut r = rng();
        let mut t = Tableau::new(1);
        t.apply(&GateKind::InitZ(0), &mut r).unwrap();
        assert_eq!(t.measure(Basis::Z, 0, &mut r).unwrap(), Measurement { value: 1, deterministic: true });
        t.apply(&GateKind::InitX(0), &mut r).unwrap();
        t.apply(&GateKind::Hadamard(0), &mut r).unwrap();
        assert_eq!(t.measure(Basis::Z, 0, &mut r).unwrap(), Measurement { value: 1, deterministic: true });
    }

    #[test]
    fn bell_pair_outcomes_agree() {
        let mut r = rng();
        for _ in 0..50 {
            let mut t = Tableau::new(2);
            t.apply(&GateKind::InitX(0), &mut r).unwrap();
            t.apply(&GateKind::Cnot { control: 0, target: 1 }, &mut r).unwrap();
            let a = t.measure(Basis::Z, 0, &mut r).unwrap();
            let b = t.measure(Basis::Z, 1, &mut r).unwrap();
            assert!(!a.deterministic && b.deterministic);
            assert_eq!(a.value, b.value);
        }
    }

    #[test]
    fn repeated_x_measurement() {
        let mut r = rng();
        let mut t = Tableau::new(1);
        let a = t.measure(Basis::X, 0, &mut r).unwrap();
        let b = t.measure(Basis::X, 0, &mut r).unwrap();
        assert!(!a.deterministic);
        assert_eq!(b, Measurement { value: a.value, deterministic: true });
        assert!(t.is_consistent());
    }

    #[test]
    fn out_of_range() {
        let mut t = Tableau::new(2);
        assert!(t.apply(&GateKind::Hadamard(2), &mut rng()).is_err());
        assert!(t.measure(Basis::Z, 5, &mut rng()).is_err());
    }

    #[test]
    fn negative_product_expectation() {
        let mut r = rng();
        let mut t = Tableau::new(2);
        t.apply_pauli(&"X0".parse().unwrap());
        assert_eq!(t.expectation(&"Z0 Z1".parse().unwrap()), Some(-1));
        assert_eq!(t.expectation(&"-Z0".parse().unwrap()), Some(1));
        assert_eq!(t.expectation(&"X1".parse().unwrap()), None);
        let m = t.measure_pauli(&"-Z0 Z1".parse().unwrap(), &mut r);
        assert_eq!(m, Measurement { value: 1, deterministic: true });
    }
}
