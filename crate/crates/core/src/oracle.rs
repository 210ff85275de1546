//! Dense state-vector ground truth for small generator sets.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::generators::{symplectic_completion, GeneratorSet};
use crate::gf2::Echelon;
use crate::lattice::{Coord, DefectLattice, GeneratorKind, Rect};
use crate::pauli::PauliOp;

pub const DEFAULT_CAP: usize = 16;

const NORM_FLOOR: f64 = 1e-10;
const EIGEN_FLOOR: f64 = 1e-12;

/// Amplitudes over the computational basis; bit `q` of an index is qubit `q`.
#[derive(Clone, Debug)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `|⟨self|other⟩|`.
    pub fn overlap(&self, other: &DenseState) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum::<Complex64>().norm()
    }

    /// `op |ψ⟩`.
    pub fn apply(&self, op: &PauliOp) -> DenseState {
        let x = word(op.x_bits());
        let z = word(op.z_bits());
        // i^phase · Y-count turns the Hermitian Y factors back into X·Z
        let k = (op.phase() as u32 + (x & z).count_ones()) % 4;
        let global = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, -1.0)]
            [k as usize];
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (b, a) in self.amps.iter().enumerate() {
            let sign = if (z & b as u64).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            out[b ^ x as usize] = global * a * sign;
        }
        DenseState { n: self.n, amps: out }
    }

    fn normalize(&mut self) -> f64 {
        let norm = self.norm();
        if norm > 0.0 {
            for a in &mut self.amps {
                *a /= norm;
            }
        }
        norm
    }
}

fn word(bits: &BitVec) -> u64 {
    bits.words().first().copied().unwrap_or(0)
}

fn references(n: usize) -> Vec<DenseState> {
    let dim = 1usize << n;
    let mut zero = vec![Complex64::new(0.0, 0.0); dim];
    zero[0] = Complex64::new(1.0, 0.0);
    let plus = vec![Complex64::new((dim as f64).sqrt().recip(), 0.0); dim];
    let mut rng = ChaCha8Rng::seed_from_u64(0x07ee_5eed);
    let random = (0..dim).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    [zero, plus, random].into_iter().map(|amps| DenseState { n, amps }).collect()
}

/// The unique state with `g|ψ⟩ = |ψ⟩` for every row, by applying `∏(1+g)/2`
/// to reference vectors until one survives.
pub fn project_state(generators: &GeneratorSet, cap: usize) -> Result<DenseState> {
    let n = generators.num_qubits();
    if n > cap || n > 30 {
        return Err(Error::OracleSize { n, cap });
    }
    generators.require_pure()?;
    for mut psi in references(n) {
        for g in generators.rows() {
            let moved = psi.apply(g);
            for (a, b) in psi.amps.iter_mut().zip(&moved.amps) {
                *a = (*a + b) * 0.5;
            }
        }
        if psi.normalize() < NORM_FLOOR {
            continue;
        }
        for (i, g) in generators.rows().iter().enumerate() {
            if psi.overlap(&psi.apply(g)) < 1.0 - 1e-9 {
                return Err(Error::Consistency(format!("projected state is not fixed by row {i}")));
            }
        }
        return Ok(psi);
    }
    Err(Error::Contradiction)
}

#[derive(Clone, Debug)]
pub struct OracleEntropy {
    pub entropy_bits: f64,
    /// Nonzero eigenvalues of the reduced density matrix, ascending.
    pub spectrum: Vec<f64>,
}

impl OracleEntropy {
    /// Largest over smallest nonzero eigenvalue.
    pub fn flatness_ratio(&self) -> f64 {
        match (self.spectrum.first(), self.spectrum.last()) {
            (Some(lo), Some(hi)) => hi / lo,
            _ => 1.0,
        }
    }
}

/// Von Neumann entropy (bits) and spectrum of the reduced state on `region`.
pub fn oracle_entropy(state: &DenseState, region: &BitVec) -> Result<OracleEntropy> {
    if region.len() != state.n {
        return Err(Error::Dimension { expected: state.n, found: region.len() });
    }
    // both sides share a spectrum; diagonalise the smaller one
    let inside: Vec<usize> = region.iter_ones().collect();
    let outside: Vec<usize> = region.not().iter_ones().collect();
    let (keep, trace) = if inside.len() <= outside.len() { (inside, outside) } else { (outside, inside) };
    let (rows, cols) = (1usize << keep.len(), 1usize << trace.len());
    let mut m = DMatrix::<Complex64>::zeros(rows, cols);
    for (b, a) in state.amps.iter().enumerate() {
        let r = keep.iter().enumerate().fold(0, |acc, (k, &q)| acc | (((b >> q) & 1) << k));
        let c = trace.iter().enumerate().fold(0, |acc, (k, &q)| acc | (((b >> q) & 1) << k));
        m[(r, c)] = *a;
    }
    let rho = &m * m.adjoint();
    let mut spectrum: Vec<f64> =
        rho.symmetric_eigen().eigenvalues.iter().copied().filter(|&l| l > EIGEN_FLOOR).collect();
    spectrum.sort_by(f64::total_cmp);
    let entropy_bits = -spectrum.iter().map(|&l| l * l.log2()).sum::<f64>();
    Ok(OracleEntropy { entropy_bits, spectrum })
}

/// Open-boundary patch cut out of a lattice: the local terms lying wholly in
/// a window, completed to a pure state on the window's qubits.
#[derive(Clone, Debug)]
pub struct Surrogate {
    pub window: Rect,
    pub coords: Vec<Coord>,
    pub generators: GeneratorSet,
    /// Local terms of each kind that made it into the patch.
    pub pentagons: usize,
    pub merged: usize,
}

pub fn surrogate_patch(lattice: &DefectLattice, window: Rect) -> Result<Surrogate> {
    let mask = lattice.rect_mask(&[window]);
    let qubits: Vec<usize> = mask.iter_ones().collect();
    let m = qubits.len();
    if m == 0 {
        return Err(Error::Geometry("surrogate window holds no qubits".into()));
    }
    let mut rows = Vec::new();
    let mut ech = Echelon::new(2 * m);
    let (mut pentagons, mut merged) = (0, 0);
    for g in lattice.generators() {
        if !g.op.support().is_subset_of(&mask) {
            continue;
        }
        let mut op = PauliOp::identity(m);
        for (k, &q) in qubits.iter().enumerate() {
            op.set(k, g.op.get(q));
        }
        if ech.insert(op.symplectic_row()) {
            match g.kind {
                GeneratorKind::Twist => pentagons += 1,
                GeneratorKind::Merged => merged += 1,
                GeneratorKind::Plaquette => {}
            }
            rows.push(op);
        }
    }
    let generators = symplectic_completion(m, rows)?;
    Ok(Surrogate { window, coords: qubits.iter().map(|&q| lattice.coord(q)).collect(), generators, pentagons, merged })
}
