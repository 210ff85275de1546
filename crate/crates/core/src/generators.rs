//! Independent, mutually commuting generator lists.

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::gf2::{Echelon, Gf2Matrix};
use crate::pauli::PauliOp;

/// A stabilizer group presentation: independent, pairwise commuting rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    n: usize,
    rows: Vec<PauliOp>,
}

impl GeneratorSet {
    /// Validates commutation, independence and Hermiticity.
    pub fn new(n: usize, rows: Vec<PauliOp>) -> Result<Self> {
        for (i, r) in rows.iter().enumerate() {
            if r.num_qubits() != n {
                return Err(Error::Dimension { expected: n, found: r.num_qubits() });
            }
            if !r.is_hermitian() {
                return Err(Error::NotStabilizer(format!("row {i} ({r}) is not Hermitian")));
            }
        }
        if let Some((i, j)) = first_anticommuting_pair(&rows) {
            return Err(Error::NotStabilizer(format!("rows {i} and {j} anticommute")));
        }
        let mut ech = Echelon::new(2 * n);
        for (i, r) in rows.iter().enumerate() {
            if !ech.insert(r.symplectic_row()) {
                return Err(Error::NotStabilizer(format!("row {i} is dependent on earlier rows")));
            }
        }
        Ok(Self { n, rows })
    }

    pub(crate) fn new_unchecked(n: usize, rows: Vec<PauliOp>) -> Self {
        Self { n, rows }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[PauliOp] {
        &self.rows
    }

    pub fn is_pure(&self) -> bool {
        self.rows.len() == self.n
    }

    pub fn require_pure(&self) -> Result<()> {
        if self.is_pure() {
            Ok(())
        } else {
            Err(Error::NotPure { generators: self.rows.len(), qubits: self.n })
        }
    }

    /// The `k × 2n` matrix `(X block | Z block)`.
    pub fn matrix(&self) -> Gf2Matrix {
        Gf2Matrix::from_rows(2 * self.n, self.rows.iter().map(PauliOp::symplectic_row).collect())
    }

    /// Rank of the generator matrix with columns outside `mask` zeroed.
    pub fn restricted_rank(&self, mask: &BitVec) -> usize {
        let mut ech = Echelon::new(2 * self.n);
        let cap = 2 * mask.count_ones();
        for r in &self.rows {
            ech.insert(r.masked_row(mask));
            if ech.rank() == cap {
                break;
            }
        }
        ech.rank()
    }

    /// Flips the sign of every row anticommuting with `op`.
    pub fn conjugate_signs(&mut self, op: &PauliOp) {
        for r in &mut self.rows {
            if r.anticommutes(op) {
                r.negate();
            }
        }
    }

    pub fn into_rows(self) -> Vec<PauliOp> {
        self.rows
    }
}

pub(crate) fn first_anticommuting_pair(rows: &[PauliOp]) -> Option<(usize, usize)> {
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            if rows[i].anticommutes(&rows[j]) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Basis of the symplectic complement of `rows`: every Pauli (as a `2n`-bit
/// row) commuting with all of them.
pub fn centralizer_basis(n: usize, rows: &[PauliOp]) -> Vec<BitVec> {
    let mut ech = Echelon::new(2 * n);
    for r in rows {
        // ω(r, v) = r_x·v_z + r_z·v_x, i.e. the dot product with (r_z | r_x)
        ech.insert(r.z_bits().concat(r.x_bits()));
    }
    ech.nullspace()
}

/// Extends a commuting, independent list to a pure-state presentation by
/// repeatedly adding a centralizer element outside the current group.
pub fn symplectic_completion(n: usize, rows: Vec<PauliOp>) -> Result<GeneratorSet> {
    let mut set = GeneratorSet::new(n, rows)?;
    while set.rows.len() < n {
        let mut group = Echelon::new(2 * n);
        for r in &set.rows {
            group.insert(r.symplectic_row());
        }
        let pick = centralizer_basis(n, &set.rows)
            .into_iter()
            .filter(|v| !group.contains(v))
            .min_by_key(|v| v.count_ones())
            .ok_or_else(|| Error::Consistency("centralizer exhausted before reaching a pure state".into()))?;
        set.rows.push(PauliOp::from_symplectic(&pick));
    }
    Ok(set)
}
