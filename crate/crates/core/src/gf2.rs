//! Linear algebra over GF(2) on packed rows.
//!
//! [`Echelon`] keeps an incrementally built basis in fully reduced row echelon
//! form, so membership tests, rank, and solving `x · M = v` all reduce to the
//! same pivot sweep. It can optionally track, for each basis row, which input
//! rows were XORed together to produce it.

use crate::bits::BitVec;

/// A dense GF(2) matrix stored row-major with packed rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Matrix {
    cols: usize,
    rows: Vec<BitVec>,
}

impl Gf2Matrix {
    pub fn new(cols: usize) -> Self {
        Self { cols, rows: Vec::new() }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "row length must equal column count");
        Self { cols, rows }
    }

    pub fn identity(k: usize) -> Self {
        Self::from_rows(k, (0..k).map(|i| BitVec::from_indices(k, [i])).collect())
    }

    pub fn push_row(&mut self, row: BitVec) {
        assert_eq!(row.len(), self.cols);
        self.rows.push(row);
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    /// Rank over GF(2). The matrix itself is left untouched.
    pub fn rank(&self) -> usize {
        rank_of(self.cols, self.rows.iter())
    }

    /// Basis of `{ v : M v = 0 }`.
    pub fn nullspace(&self) -> Vec<BitVec> {
        let mut ech = Echelon::new(self.cols);
        for r in &self.rows {
            ech.insert(r.clone());
        }
        ech.nullspace()
    }
}

/// Rank of a GF(2) matrix; input is not mutated.
pub fn gf2_rank(m: &Gf2Matrix) -> usize {
    m.rank()
}

/// Rank of an arbitrary collection of rows of length `cols`.
pub fn rank_of<'a>(cols: usize, rows: impl IntoIterator<Item = &'a BitVec>) -> usize {
    let mut ech = Echelon::new(cols);
    for r in rows {
        ech.insert(r.clone());
        if ech.rank() == cols {
            break;
        }
    }
    ech.rank()
}

/// Incremental reduced row echelon basis.
#[derive(Clone, Debug)]
pub struct Echelon {
    cols: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
    // combos[i] records which inserted inputs sum to rows[i]
    combos: Option<Vec<BitVec>>,
    capacity: usize,
    inserted: usize,
}

impl Echelon {
    pub fn new(cols: usize) -> Self {
        Self { cols, rows: Vec::new(), pivots: Vec::new(), combos: None, capacity: 0, inserted: 0 }
    }

    /// Like [`Echelon::new`], but remembers how each basis row was built from
    /// the (at most `capacity`) inserted inputs so that [`Echelon::express`]
    /// can return a combination.
    pub fn tracking(cols: usize, capacity: usize) -> Self {
        Self { combos: Some(Vec::new()), capacity, ..Self::new(cols) }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Reduce `v` against the basis. Returns the residual and, when tracking,
    /// the combination of inputs that was subtracted.
    pub fn reduce(&self, v: &BitVec) -> (BitVec, Option<BitVec>) {
        assert_eq!(v.len(), self.cols);
        let mut residual = v.clone();
        let mut combo = self.combos.as_ref().map(|_| BitVec::zeros(self.capacity));
        for (i, (row, &p)) in self.rows.iter().zip(&self.pivots).enumerate() {
            if residual.get(p) {
                residual.xor_assign(row);
                if let (Some(c), Some(cs)) = (combo.as_mut(), self.combos.as_ref()) {
                    c.xor_assign(&cs[i]);
                }
            }
        }
        (residual, combo)
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).0.is_zero()
    }

    /// Inserts `v`; returns `true` if it was independent of the basis.
    pub fn insert(&mut self, v: BitVec) -> bool {
        let input_index = self.inserted;
        self.inserted += 1;
        let (residual, combo) = self.reduce(&v);
        let Some(p) = residual.first_one() else {
            return false;
        };
        let combo = combo.map(|mut c| {
            assert!(input_index < self.capacity, "echelon tracking capacity exceeded");
            c.flip(input_index);
            c
        });
        for i in 0..self.rows.len() {
            if self.rows[i].get(p) {
                self.rows[i].xor_assign(&residual);
                if let (Some(cs), Some(c)) = (self.combos.as_mut(), combo.as_ref()) {
                    cs[i].xor_assign(c);
                }
            }
        }
        self.rows.push(residual);
        self.pivots.push(p);
        if let (Some(cs), Some(c)) = (self.combos.as_mut(), combo) {
            cs.push(c);
        }
        true
    }

    /// Combination of inserted inputs that XORs to `v`, if `v` is in the span.
    /// Requires a tracking echelon.
    pub fn express(&self, v: &BitVec) -> Option<BitVec> {
        assert!(self.combos.is_some(), "express() needs Echelon::tracking");
        let (residual, combo) = self.reduce(v);
        residual.is_zero().then(|| combo.expect("tracking enabled"))
    }

    /// Basis of the solutions of `row · x = 0` for every basis row.
    pub fn nullspace(&self) -> Vec<BitVec> {
        let pivot_set = BitVec::from_indices(self.cols, self.pivots.iter().copied());
        let mut out = Vec::with_capacity(self.cols - self.rows.len());
        for f in 0..self.cols {
            if pivot_set.get(f) {
                continue;
            }
            let mut v = BitVec::zeros(self.cols);
            v.set(f, true);
            for (row, &p) in self.rows.iter().zip(&self.pivots) {
                if row.get(f) {
                    v.set(p, true);
                }
            }
            out.push(v);
        }
        out
    }
}

/// Solves `A v = b` where `a_rows[i] · v = b[i]`. Returns one solution (free
/// variables set to zero) or `None` if the system is inconsistent.
pub fn solve_system(cols: usize, a_rows: &[BitVec], b: &BitVec) -> Option<BitVec> {
    assert_eq!(a_rows.len(), b.len());
    let mut ech = Echelon::new(cols + 1);
    for (i, row) in a_rows.iter().enumerate() {
        let mut aug = row.concat(&BitVec::zeros(1));
        aug.set(cols, b.get(i));
        ech.insert(aug);
    }
    let mut v = BitVec::zeros(cols);
    for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
        if p == cols {
            return None;
        }
        if row.get(cols) {
            v.set(p, true);
        }
    }
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Unpacked Gaussian elimination over `Vec<Vec<u8>>`, independent of the
    /// packed implementation.
    fn naive_rank(m: &[Vec<u8>]) -> usize {
        let mut m: Vec<Vec<u8>> = m.to_vec();
        let rows = m.len();
        let cols = if rows == 0 { 0 } else { m[0].len() };
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..rows).find(|&r| m[r][c] == 1) else { continue };
            m.swap(rank, p);
            let pivot = m[rank].clone();
            for (r, row) in m.iter_mut().enumerate() {
                if r != rank && row[c] == 1 {
                    row.iter_mut().zip(&pivot).for_each(|(a, b)| *a ^= b);
                }
            }
            rank += 1;
        }
        rank
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, density: f64) -> (Gf2Matrix, Vec<Vec<u8>>) {
        let raw: Vec<Vec<u8>> =
            (0..rows).map(|_| (0..cols).map(|_| u8::from(rng.random_bool(density))).collect()).collect();
        let packed = raw
            .iter()
            .map(|r| BitVec::from_bools(&r.iter().map(|&b| b == 1).collect::<Vec<_>>()))
            .collect();
        (Gf2Matrix::from_rows(cols, packed), raw)
    }

    #[test]
    fn identity_has_full_rank() {
        for k in [1, 5, 64, 65, 130] {
            assert_eq!(gf2_rank(&Gf2Matrix::identity(k)), k);
        }
    }

    #[test]
    fn duplicate_rows_have_rank_one() {
        let r = BitVec::from_indices(10, [1, 3, 7]);
        let m = Gf2Matrix::from_rows(10, vec![r.clone(), r]);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn random_20x40_matches_naive_elimination() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for density in [0.1, 0.3, 0.5] {
            for _ in 0..20 {
                let (m, raw) = random_matrix(&mut rng, 20, 40, density);
                assert_eq!(m.rank(), naive_rank(&raw));
            }
        }
        // low-rank instances: rows are combinations of a few seeds
        for _ in 0..20 {
            let (seeds, _) = random_matrix(&mut rng, 4, 40, 0.5);
            let rows: Vec<BitVec> = (0..20)
                .map(|_| {
                    let mut acc = BitVec::zeros(40);
                    for s in seeds.rows() {
                        if rng.random_bool(0.5) {
                            acc.xor_assign(s);
                        }
                    }
                    acc
                })
                .collect();
            let raw: Vec<Vec<u8>> = rows.iter().map(|r| (0..40).map(|c| u8::from(r.get(c))).collect()).collect();
            assert_eq!(Gf2Matrix::from_rows(40, rows).rank(), naive_rank(&raw));
        }
    }

    #[test]
    fn nullspace_vectors_are_annihilated() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (m, _) = random_matrix(&mut rng, 12, 30, 0.4);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 30 - m.rank());
        for v in &ns {
            for r in m.rows() {
                assert!(!r.dot(v));
            }
        }
        assert_eq!(rank_of(30, ns.iter()), ns.len());
    }

    #[test]
    fn express_recovers_a_valid_combination() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (m, _) = random_matrix(&mut rng, 15, 25, 0.4);
        let mut ech = Echelon::tracking(25, m.nrows());
        for r in m.rows() {
            ech.insert(r.clone());
        }
        let mut target = BitVec::zeros(25);
        for (i, r) in m.rows().iter().enumerate() {
            if i % 3 == 0 {
                target.xor_assign(r);
            }
        }
        let combo = ech.express(&target).expect("target lies in the row span");
        let mut rebuilt = BitVec::zeros(25);
        for i in combo.iter_ones() {
            rebuilt.xor_assign(&m.rows()[i]);
        }
        assert_eq!(rebuilt, target);
    }

    #[test]
    fn solve_system_finds_solutions_and_detects_inconsistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (m, _) = random_matrix(&mut rng, 10, 30, 0.4);
        let truth = BitVec::from_indices(30, [0, 4, 9, 17, 29]);
        let b = BitVec::from_bools(&m.rows().iter().map(|r| r.dot(&truth)).collect::<Vec<_>>());
        let v = solve_system(30, m.rows(), &b).expect("consistent");
        for (i, r) in m.rows().iter().enumerate() {
            assert_eq!(r.dot(&v), b.get(i));
        }
        let dup = vec![BitVec::from_indices(3, [0]), BitVec::from_indices(3, [0])];
        assert!(solve_system(3, &dup, &BitVec::from_indices(2, [1])).is_none());
    }

    #[test]
    fn express_rejects_vectors_outside_span() {
        let mut ech = Echelon::tracking(4, 2);
        ech.insert(BitVec::from_indices(4, [0, 1]));
        ech.insert(BitVec::from_indices(4, [1, 2]));
        assert!(ech.express(&BitVec::from_indices(4, [3])).is_none());
        assert!(ech.express(&BitVec::from_indices(4, [0, 2])).is_some());
    }
}
