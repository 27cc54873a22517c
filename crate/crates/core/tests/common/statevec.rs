//! Dense state-vector simulator used as an oracle for the tableau.

use gatecheck::pauli_core::{Basis, GateKind, Letter, PauliOp, Tableau};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct C(pub f64, pub f64);

impl C {
    fn mul(self, o: C) -> C {
        C(self.0 * o.0 - self.1 * o.1, self.0 * o.1 + self.1 * o.0)
    }
    fn add(self, o: C) -> C {
        C(self.0 + o.0, self.1 + o.1)
    }
    fn scale(self, s: f64) -> C {
        C(self.0 * s, self.1 * s)
    }
    fn conj(self) -> C {
        C(self.0, -self.1)
    }
    fn norm2(self) -> f64 {
        self.0 * self.0 + self.1 * self.1
    }
}

pub struct StateVec {
    pub n: usize,
    pub amp: Vec<C>,
}

impl StateVec {
    pub fn new(n: usize) -> Self {
        let mut amp = vec![C(0.0, 0.0); 1 << n];
        amp[0] = C(1.0, 0.0);
        StateVec { n, amp }
    }

    pub fn h(&mut self, q: usize) {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for b in 0..self.amp.len() {
            if b >> q & 1 == 0 {
                let (a0, a1) = (self.amp[b], self.amp[b | 1 << q]);
                self.amp[b] = a0.add(a1).scale(s);
                self.amp[b | 1 << q] = a0.add(a1.scale(-1.0)).scale(s);
            }
        }
    }

    pub fn s(&mut self, q: usize) {
        for b in 0..self.amp.len() {
            if b >> q & 1 == 1 {
                self.amp[b] = self.amp[b].mul(C(0.0, 1.0));
            }
        }
    }

    pub fn cnot(&mut self, c: usize, t: usize) {
        for b in 0..self.amp.len() {
            if b >> c & 1 == 1 && b >> t & 1 == 0 {
                self.amp.swap(b, b | 1 << t);
            }
        }
    }

    pub fn swap(&mut self, a: usize, b: usize) {
        for i in 0..self.amp.len() {
            if i >> a & 1 == 1 && i >> b & 1 == 0 {
                self.amp.swap(i, i ^ (1 << a) ^ (1 << b));
            }
        }
    }

    /// `P|ψ⟩` for a signed Hermitian Pauli.
    pub fn apply_pauli(&self, p: &PauliOp) -> Vec<C> {
        let (mut xm, mut zm, mut ny) = (0usize, 0usize, 0u32);
        for (q, l) in p.support() {
            let (x, z) = l.bits();
            if x {
                xm |= 1 << q;
            }
            if z {
                zm |= 1 << q;
            }
            if l == Letter::Y {
                ny += 1;
            }
        }
        let base = [C(1.0, 0.0), C(0.0, 1.0), C(-1.0, 0.0), C(0.0, -1.0)][(ny % 4) as usize].scale(p.sign() as f64);
        let mut out = vec![C(0.0, 0.0); self.amp.len()];
        for b in 0..self.amp.len() {
            let sign = if (b & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            out[b ^ xm] = out[b ^ xm].add(self.amp[b].mul(base).scale(sign));
        }
        out
    }

    pub fn expectation(&self, p: &PauliOp) -> f64 {
        let v = self.apply_pauli(p);
        self.amp.iter().zip(&v).map(|(a, b)| a.conj().mul(*b).0).sum()
    }

    /// Projects onto the `outcome` eigenspace of `p` and renormalizes.
    pub fn project(&mut self, p: &PauliOp, outcome: i8) {
        let v = self.apply_pauli(p);
        let s = outcome as f64;
        for (a, pv) in self.amp.iter_mut().zip(&v) {
            *a = a.add(pv.scale(s)).scale(0.5);
        }
        let norm: f64 = self.amp.iter().map(|a| a.norm2()).sum::<f64>().sqrt();
        assert!(norm > 1e-9, "projected onto a zero-probability outcome");
        for a in self.amp.iter_mut() {
            *a = a.scale(1.0 / norm);
        }
    }
}

/// Outcome statistics from one random circuit.
#[derive(Default, Debug, Clone, Copy)]
pub struct OracleStats {
    pub deterministic: usize,
    pub random: usize,
    pub random_plus: usize,
}

fn random_pauli(n: usize, rng: &mut ChaCha8Rng) -> PauliOp {
    loop {
        let letters: Vec<_> = (0..n)
            .filter_map(|q| match rng.random_range(0..4) {
                0 => None,
                1 => Some((q as u32, Letter::X)),
                2 => Some((q as u32, Letter::Y)),
                _ => Some((q as u32, Letter::Z)),
            })
            .collect();
        if !letters.is_empty() {
            return PauliOp::from_letters(letters).with_sign(rng.random());
        }
    }
}

/// Runs one random Clifford circuit on both simulators and panics on any
/// disagreement. Returns measurement statistics.
pub fn compare_random_circuit(seed: u64) -> OracleStats {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=8usize);
    let gates = rng.random_range(1..=50usize);
    let mut t = Tableau::new(n);
    let mut sv = StateVec::new(n);
    let mut stats = OracleStats::default();

    let measure = |t: &mut Tableau, sv: &mut StateVec, p: &PauliOp, rng: &mut ChaCha8Rng, stats: &mut OracleStats| -> i8 {
        let e = sv.expectation(p);
        let m = t.measure_pauli(p, rng);
        if m.deterministic {
            assert!((e - m.value as f64).abs() < 1e-9, "seed {seed}: deterministic {p} = {} but oracle <P> = {e}", m.value);
            stats.deterministic += 1;
        } else {
            assert!(e.abs() < 1e-9, "seed {seed}: random {p} but oracle <P> = {e}");
            stats.random += 1;
            if m.value > 0 {
                stats.random_plus += 1;
            }
        }
        sv.project(p, m.value);
        m.value
    };

    for _ in 0..gates {
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n);
        if n > 1 {
            while b == a {
                b = rng.random_range(0..n);
            }
        }
        match rng.random_range(0..9) {
            0 => {
                t.apply(&GateKind::Hadamard(a as u32), &mut rng).unwrap();
                sv.h(a);
            }
            1 => {
                t.phase(a as u32).unwrap();
                sv.s(a);
            }
            2 if n > 1 => {
                t.apply(&GateKind::Cnot { control: a as u32, target: b as u32 }, &mut rng).unwrap();
                sv.cnot(a, b);
            }
            3 if n > 1 => {
                t.apply(&GateKind::Swap(a as u32, b as u32), &mut rng).unwrap();
                sv.swap(a, b);
            }
            4 | 5 => {
                let basis = if rng.random() { Basis::X } else { Basis::Z };
                let p = PauliOp::single(a as u32, basis.letter());
                measure(&mut t, &mut sv, &p, &mut rng, &mut stats);
            }
            6 => {
                let p = random_pauli(n, &mut rng);
                measure(&mut t, &mut sv, &p, &mut rng, &mut stats);
            }
            7 => {
                let basis = if rng.random() { Basis::X } else { Basis::Z };
                let p = PauliOp::single(a as u32, basis.letter());
                let v = measure(&mut t, &mut sv, &p, &mut rng, &mut stats);
                if v < 0 {
                    let fix = PauliOp::single(a as u32, basis.other().letter());
                    t.apply_pauli(&fix);
                    sv.amp = sv.apply_pauli(&fix);
                }
            }
            _ => {
                let p = random_pauli(n, &mut rng);
                t.apply_pauli(&p);
                sv.amp = sv.apply_pauli(&p);
            }
        }
        assert!(t.is_consistent(), "seed {seed}: tableau lost its symplectic structure");
    }
    for s in t.stabilizers() {
        let e = sv.expectation(&s);
        assert!((e - 1.0).abs() < 1e-9, "seed {seed}: final stabilizer {s} has oracle <S> = {e}");
    }
    stats
}

/// Pearson χ² of the `+1` count against a fair coin.
pub fn coin_chi2(plus: usize, total: usize) -> f64 {
    let expected = total as f64 / 2.0;
    let d = plus as f64 - expected;
    2.0 * d * d / expected
}
