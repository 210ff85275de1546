//! Pauli operators in the symplectic (X | Z) bit representation.
//!
//! An operator on `n` qubits is stored as two packed `n`-bit blocks plus a
//! phase `i^phase`. Each qubit carries the Hermitian single-qubit Pauli
//! selected by its `(x, z)` pair, with `Y = iXZ`, so an operator whose phase is
//! even is Hermitian and its sign is `(-1)^(phase / 2)`.

use std::fmt;
use std::str::FromStr;

use crate::bits::BitVec;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' | '.' | '_' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOp {
    x: BitVec,
    z: BitVec,
    phase: u8,
}

impl PauliOp {
    pub fn identity(n: usize) -> Self {
        Self { x: BitVec::zeros(n), z: BitVec::zeros(n), phase: 0 }
    }

    pub fn from_bits(x: BitVec, z: BitVec) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::Dimension { expected: x.len(), found: z.len() });
        }
        Ok(Self { x, z, phase: 0 })
    }

    /// Builds a `+` signed operator from `(qubit, Pauli)` pairs. A repeated
    /// qubit keeps its last entry.
    pub fn from_sparse(n: usize, terms: impl IntoIterator<Item = (usize, Pauli)>) -> Self {
        let mut op = Self::identity(n);
        for (q, p) in terms {
            op.set(q, p);
        }
        op
    }

    /// Packs a `2n`-bit `(X | Z)` row into an operator with sign `+`.
    pub fn from_symplectic(row: &BitVec) -> Self {
        assert!(row.len().is_multiple_of(2));
        let n = row.len() / 2;
        Self { x: row.slice(0, n), z: row.slice(n, n), phase: 0 }
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.x.len()
    }

    pub fn x_bits(&self) -> &BitVec {
        &self.x
    }

    pub fn z_bits(&self) -> &BitVec {
        &self.z
    }

    /// Phase exponent `k` in `i^k`; even for Hermitian operators.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_multiple_of(2)
    }

    /// Overall sign of a Hermitian operator; `None` for `±i` multiples.
    pub fn sign(&self) -> Option<Sign> {
        match self.phase {
            0 => Some(Sign::Plus),
            2 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn with_sign(mut self, sign: Sign) -> Self {
        self.phase = match sign {
            Sign::Plus => 0,
            Sign::Minus => 2,
        };
        self
    }

    pub fn negate(&mut self) {
        self.phase = (self.phase + 2) % 4;
    }

    pub fn negated(mut self) -> Self {
        self.negate();
        self
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x.get(q), self.z.get(q))
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        let (x, z) = p.bits();
        self.x.set(q, x);
        self.z.set(q, z);
    }

    /// Support mask: qubits acted on non-trivially.
    pub fn support(&self) -> BitVec {
        self.x.or(&self.z)
    }

    pub fn weight(&self) -> usize {
        self.support().count_ones()
    }

    pub fn count_y(&self) -> usize {
        self.x.and_count(&self.z)
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// The `2n`-bit `(X | Z)` row, signs dropped.
    pub fn symplectic_row(&self) -> BitVec {
        self.x.concat(&self.z)
    }

    /// `(X ∧ mask | Z ∧ mask)` without building an intermediate operator.
    pub fn masked_row(&self, mask: &BitVec) -> BitVec {
        self.x.and(mask).concat(&self.z.and(mask))
    }

    /// `true` iff the two operators anticommute.
    pub fn symplectic_product(&self, other: &PauliOp) -> Result<bool> {
        self.check_len(other)?;
        Ok(self.anticommutes(other))
    }

    /// Unchecked variant of [`PauliOp::symplectic_product`]; panics in debug
    /// builds on a length mismatch.
    #[inline]
    pub fn anticommutes(&self, other: &PauliOp) -> bool {
        debug_assert_eq!(self.num_qubits(), other.num_qubits());
        self.x.dot(&other.z) ^ self.z.dot(&other.x)
    }

    #[inline]
    pub fn commutes_with(&self, other: &PauliOp) -> bool {
        !self.anticommutes(other)
    }

    /// Zeroes the operator outside `mask`; the phase is preserved.
    pub fn restrict(&self, mask: &BitVec) -> PauliOp {
        assert_eq!(mask.len(), self.num_qubits());
        PauliOp { x: self.x.and(mask), z: self.z.and(mask), phase: self.phase }
    }

    /// Operator product `self · other`, phase tracked mod 4.
    pub fn multiply(&self, other: &PauliOp) -> Result<PauliOp> {
        self.check_len(other)?;
        let mut out = self.clone();
        out.mul_assign_right(other);
        Ok(out)
    }

    /// `self ← self · other`.
    pub fn mul_assign_right(&mut self, other: &PauliOp) {
        debug_assert_eq!(self.num_qubits(), other.num_qubits());
        // per qubit: i^{x1 z1} X^x1 Z^z1 · i^{x2 z2} X^x2 Z^z2
        //          = i^{x1 z1 + x2 z2 + 2 z1 x2 - x3 z3} · (Hermitian form of x3, z3)
        let y1 = self.x.and_count(&self.z) as i64;
        let y2 = other.x.and_count(&other.z) as i64;
        let cross = self.z.and_count(&other.x) as i64;
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
        let y3 = self.x.and_count(&self.z) as i64;
        let exp = self.phase as i64 + other.phase as i64 + y1 + y2 + 2 * cross - y3;
        self.phase = exp.rem_euclid(4) as u8;
    }

    /// Pauli string without the sign, e.g. `XIZY`.
    pub fn pauli_string(&self) -> String {
        (0..self.num_qubits()).map(|q| self.get(q).symbol()).collect()
    }

    /// Sparse listing of the non-identity factors.
    pub fn sparse_terms(&self) -> Vec<(usize, Pauli)> {
        self.support().iter_ones().map(|q| (q, self.get(q))).collect()
    }

    fn check_len(&self, other: &PauliOp) -> Result<()> {
        if self.num_qubits() != other.num_qubits() {
            return Err(Error::Dimension { expected: self.num_qubits(), found: other.num_qubits() });
        }
        Ok(())
    }
}

/// Free-function form of [`PauliOp::symplectic_product`].
pub fn symplectic_product(p: &PauliOp, q: &PauliOp) -> Result<bool> {
    p.symplectic_product(q)
}

/// Free-function form of [`PauliOp::multiply`].
pub fn multiply(p: &PauliOp, q: &PauliOp) -> Result<PauliOp> {
    p.multiply(q)
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{prefix}{}", self.pauli_string())
    }
}

impl fmt::Debug for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOp({self})")
    }
}

impl FromStr for PauliOp {
    type Err = Error;

    /// Parses `[+|-][i]` followed by `I/X/Y/Z` symbols (`.` and `_` also mean `I`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (mut phase, rest) = match s.as_bytes().first() {
            Some(b'+') => (0u8, &s[1..]),
            Some(b'-') => (2u8, &s[1..]),
            _ => (0u8, s),
        };
        let rest = if let Some(r) = rest.strip_prefix('i') {
            phase += 1;
            r
        } else {
            rest
        };
        let paulis: Vec<Pauli> = rest
            .chars()
            .map(|c| Pauli::from_symbol(c).ok_or_else(|| Error::Parse(format!("bad Pauli symbol `{c}` in `{s}`"))))
            .collect::<Result<_>>()?;
        let mut op = PauliOp::identity(paulis.len());
        for (q, p) in paulis.into_iter().enumerate() {
            op.set(q, p);
        }
        op.phase = phase % 4;
        Ok(op)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> PauliOp {
        s.parse().unwrap()
    }

    #[test]
    fn single_qubit_anticommutation() {
        assert!(symplectic_product(&p("XI"), &p("ZI")).unwrap());
        assert!(!symplectic_product(&p("XX"), &p("ZZ")).unwrap());
        assert!(symplectic_product(&p("YI"), &p("XI")).unwrap());
    }

    #[test]
    fn length_mismatch_is_a_dimension_error() {
        assert!(matches!(p("XI").symplectic_product(&p("X")), Err(Error::Dimension { .. })));
        assert!(matches!(p("XI").multiply(&p("X")), Err(Error::Dimension { .. })));
    }

    #[test]
    fn restrict_masks_and_keeps_sign() {
        let op = p("-XZX");
        let r = op.restrict(&BitVec::from_indices(3, [0]));
        assert_eq!(r, p("-XII"));
        assert_eq!(op.restrict(&BitVec::ones(3)), op);
        assert!(op.restrict(&BitVec::zeros(3)).is_identity());
    }

    #[test]
    fn multiply_examples() {
        assert_eq!(p("XZY").multiply(&p("III")).unwrap(), p("XZY"));
        let xz = p("XI").multiply(&p("ZI")).unwrap();
        assert_eq!(xz.get(0), Pauli::Y);
        // XZ = -iY
        assert_eq!(xz.phase(), 3);
        assert_eq!(xz.sign(), None);
        let zx = p("ZI").multiply(&p("XI")).unwrap();
        assert_eq!(zx.phase(), 1);
    }

    #[test]
    fn commuting_products_stay_hermitian() {
        // (XX)(ZZ) = (XZ)(XZ) = (-iY)(-iY) = -YY
        let prod = p("XX").multiply(&p("ZZ")).unwrap();
        assert_eq!(prod, p("-YY"));
        // YY · XX = (YX)(YX) = (-iZ)(-iZ) = -ZZ
        assert_eq!(p("YY").multiply(&p("XX")).unwrap(), p("-ZZ"));
    }

    #[test]
    fn display_roundtrip() {
        for s in ["+XYZI", "-IIII", "+iXZ", "-iY"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert!("XQ".parse::<PauliOp>().is_err());
    }

    fn arb_op(n: usize) -> impl Strategy<Value = PauliOp> {
        (proptest::collection::vec(0u8..4, n), 0u8..4).prop_map(|(v, ph)| {
            let mut op = PauliOp::identity(v.len());
            for (q, k) in v.into_iter().enumerate() {
                op.set(q, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][k as usize]);
            }
            op.phase = ph;
            op
        })
    }

    proptest! {
        #[test]
        fn symplectic_product_is_symmetric(a in arb_op(70), b in arb_op(70)) {
            prop_assert_eq!(a.anticommutes(&b), b.anticommutes(&a));
        }

        #[test]
        fn multiplication_is_associative_and_self_inverse(a in arb_op(40), b in arb_op(40), c in arb_op(40)) {
            let ab_c = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let a_bc = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            prop_assert_eq!(&ab_c, &a_bc);
            // bit level: (a·b)·b = a
            let back = a.multiply(&b).unwrap().multiply(&b).unwrap();
            prop_assert_eq!(back.x_bits(), a.x_bits());
            prop_assert_eq!(back.z_bits(), a.z_bits());
            // Hermitian b squares to +I, so the phase returns too
            let mut bh = b.clone();
            bh.phase = 0;
            prop_assert_eq!(a.multiply(&bh).unwrap().multiply(&bh).unwrap(), a);
        }

        #[test]
        fn product_phase_matches_commutation(a in arb_op(30), b in arb_op(30)) {
            let mut a = a; a.phase = 0;
            let mut b = b; b.phase = 0;
            let ab = a.multiply(&b).unwrap();
            let ba = b.multiply(&a).unwrap();
            // ab = ±ba according to the symplectic product
            let diff = (ab.phase() + 4 - ba.phase()) % 4;
            prop_assert_eq!(diff == 2, a.anticommutes(&b));
            prop_assert_eq!(ab.is_hermitian(), a.commutes_with(&b));
        }
    }
}
