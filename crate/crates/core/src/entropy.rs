//! Region entropies from GF(2) ranks, the seven-term combinations, fusion
//! predictions and quantum-dimension extraction.

use rayon::prelude::*;
use serde::Serialize;

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::generators::GeneratorSet;
use crate::gf2::Echelon;
use crate::regions::{PartitionKind, Region, RegionPartition};

fn check_mask(state: &GeneratorSet, region: &BitVec) -> Result<()> {
    if region.len() != state.num_qubits() {
        return Err(Error::Dimension { expected: state.num_qubits(), found: region.len() });
    }
    state.require_pure()
}

/// Entropy in bits of `region` for a pure state: `|A| − (n − rank M|Ā)`.
pub fn region_entropy(state: &GeneratorSet, region: &BitVec) -> Result<usize> {
    check_mask(state, region)?;
    let n = state.num_qubits();
    let inside_group = n - state.restricted_rank(&region.not());
    Ok(region.count_ones() - inside_group)
}

/// Same entropy from the other side of the cut: `rank M|A − |A|`.
pub fn region_entropy_direct(state: &GeneratorSet, region: &BitVec) -> Result<usize> {
    check_mask(state, region)?;
    Ok(state.restricted_rank(region) - region.count_ones())
}

/// Half the rank of the commutation matrix of the restrictions to `region`:
/// the number of Bell pairs shared across the cut.
pub fn bell_pair_count(state: &GeneratorSet, region: &BitVec) -> Result<usize> {
    check_mask(state, region)?;
    let outside = region.not();
    let crossing: Vec<_> = state
        .rows()
        .iter()
        .filter(|r| {
            let s = r.support();
            s.intersects(region) && s.intersects(&outside)
        })
        .map(|r| r.restrict(region))
        .collect();
    let mut ech = Echelon::new(crossing.len());
    for a in &crossing {
        ech.insert(BitVec::from_bools(&crossing.iter().map(|b| a.anticommutes(b)).collect::<Vec<_>>()));
    }
    let rank = ech.rank();
    if !rank.is_multiple_of(2) {
        return Err(Error::Consistency(format!("commutation matrix has odd rank {rank}")));
    }
    Ok(rank / 2)
}

/// Seven region entropies and their alternating sum.
#[derive(Clone, Debug, Serialize)]
pub struct Combination {
    pub kind: PartitionKind,
    /// `(label, |R|, S_R)` for `A, B, C, AB, BC, CA, ABC`.
    pub terms: Vec<(String, usize, usize)>,
    pub value: i64,
}

const SIGNS: [i64; 7] = [1, 1, 1, -1, -1, -1, 1];

/// `S_A + S_B + S_C − S_AB − S_BC − S_CA + S_ABC`, entropies evaluated in parallel.
pub fn seven_term(state: &GeneratorSet, partition: &RegionPartition) -> Result<Combination> {
    let regions = partition.combination_regions();
    let entropies: Vec<usize> =
        regions.par_iter().map(|r| region_entropy(state, r.mask())).collect::<Result<_>>()?;
    let value = entropies.iter().zip(SIGNS).map(|(&s, sign)| sign * s as i64).sum();
    let terms = regions.iter().zip(&entropies).map(|(r, &s)| (r.name().to_string(), r.len(), s)).collect();
    Ok(Combination { kind: partition.kind(), terms, value })
}

/// Topological entanglement entropy of a three-sector disk.
pub fn s_topo(state: &GeneratorSet, partition: &RegionPartition) -> Result<Combination> {
    if partition.kind() != PartitionKind::Tripartite {
        return Err(Error::Geometry("S_topo needs a tripartite disk".into()));
    }
    seven_term(state, partition)
}

/// Annular combination on the three arcs of an annulus.
pub fn s_ann(state: &GeneratorSet, partition: &RegionPartition) -> Result<Combination> {
    if partition.kind() != PartitionKind::Annular {
        return Err(Error::Geometry("S_ann needs an annular partition".into()));
    }
    seven_term(state, partition)
}

/// One fusion outcome: probability and the quantum dimensions of the charges
/// left in the inner and outer disks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FusionOutcome {
    pub probability: f64,
    pub d_inner: f64,
    pub d_outer: f64,
}

impl FusionOutcome {
    pub const fn new(probability: f64, d_inner: f64, d_outer: f64) -> Self {
        Self { probability, d_inner, d_outer }
    }
}

/// `−2 log₂ D − Σ P log₂(P / (d₁ d₂))`.
pub fn predict_s_ann(table: &[FusionOutcome], total_dimension: f64) -> Result<f64> {
    if table.is_empty() {
        return Err(Error::FusionTable("empty fusion table".into()));
    }
    if total_dimension.is_nan() || total_dimension <= 0.0 {
        return Err(Error::FusionTable(format!("total dimension {total_dimension} must be positive")));
    }
    let mut total = 0.0;
    let mut acc = 0.0;
    for o in table {
        if !(0.0..=1.0).contains(&o.probability) {
            return Err(Error::FusionTable(format!("probability {} outside [0, 1]", o.probability)));
        }
        if o.d_inner < 1.0 || o.d_outer < 1.0 {
            return Err(Error::FusionTable(format!("dimensions ({}, {}) below 1", o.d_inner, o.d_outer)));
        }
        total += o.probability;
        if o.probability > 0.0 {
            acc += o.probability * (o.probability / (o.d_inner * o.d_outer)).log2();
        }
    }
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::FusionTable(format!("probabilities sum to {total}")));
    }
    Ok(-2.0 * total_dimension.log2() - acc)
}

/// `d = D · 2^{S_ann / 2}`.
pub fn extract_dimension(s_ann: f64, total_dimension: f64) -> f64 {
    total_dimension * (s_ann / 2.0).exp2()
}

/// Fusion tables of the Ising theory for the bundled configurations.
pub mod ising {
    use super::FusionOutcome;

    pub const TOTAL_DIMENSION: f64 = 2.0;
    pub const D_SIGMA: f64 = std::f64::consts::SQRT_2;

    /// No charge in either disk.
    pub fn vacuum() -> Vec<FusionOutcome> {
        vec![FusionOutcome::new(1.0, 1.0, 1.0)]
    }

    /// One `σ` in each disk.
    pub fn sigma_pair() -> Vec<FusionOutcome> {
        vec![FusionOutcome::new(1.0, D_SIGMA, D_SIGMA)]
    }

    /// Two `σ` in each disk, inner pair fusing to the vacuum with certainty.
    pub fn sigma_quartet_definite() -> Vec<FusionOutcome> {
        vec![FusionOutcome::new(1.0, 1.0, 1.0)]
    }

    /// Two `σ` in each disk, inner pair fusing to `1` or `ψ` with equal weight.
    pub fn sigma_quartet_mixed() -> Vec<FusionOutcome> {
        vec![FusionOutcome::new(0.5, 1.0, 1.0), FusionOutcome::new(0.5, 1.0, 1.0)]
    }

    /// A fermion in each disk, fusing to the vacuum.
    pub fn fermion_pair() -> Vec<FusionOutcome> {
        vec![FusionOutcome::new(1.0, 1.0, 1.0)]
    }

    pub fn by_name(name: &str) -> Option<Vec<FusionOutcome>> {
        Some(match name {
            "vacuum" => vacuum(),
            "sigma-pair" => sigma_pair(),
            "sigma-quartet-definite" => sigma_quartet_definite(),
            "sigma-quartet-mixed" => sigma_quartet_mixed(),
            "fermion-pair" => fermion_pair(),
            _ => return None,
        })
    }

    pub const NAMES: [&str; 5] =
        ["vacuum", "sigma-pair", "sigma-quartet-definite", "sigma-quartet-mixed", "fermion-pair"];
}

/// How flatness of the entanglement spectrum was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FlatnessMethod {
    /// Reduced density matrix diagonalised numerically.
    Oracle,
    /// Von Neumann and 2-Rényi entropies counted from the same subgroup agree.
    Structural,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub entropy_bits: usize,
    pub flat: bool,
    pub method: FlatnessMethod,
    /// Number of nonzero eigenvalues (expected `2^S`).
    pub support: usize,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

/// Checks that the reduced state on `region` is `2^S` equal eigenvalues.
/// Diagonalises densely when the state has at most `oracle_cap` qubits.
pub fn spectrum_flatness(state: &GeneratorSet, region: &BitVec, oracle_cap: usize) -> Result<SpectrumReport> {
    let s = region_entropy(state, region)?;
    if state.num_qubits() <= oracle_cap {
        let dense = crate::oracle::project_state(state, oracle_cap)?;
        let spec = crate::oracle::oracle_entropy(&dense, region)?;
        let min = spec.spectrum.iter().copied().fold(f64::INFINITY, f64::min);
        let max = spec.spectrum.iter().copied().fold(0.0, f64::max);
        let flat = spec.spectrum.len() == 1usize << s && max / min < 1.0 + 1e-9;
        return Ok(SpectrumReport {
            entropy_bits: s,
            flat,
            method: FlatnessMethod::Oracle,
            support: spec.spectrum.len(),
            min_eigenvalue: min,
            max_eigenvalue: max,
        });
    }
    // S_vN = rank M|A − |A| and S_2 = |A| − dim G_A coincide only for a flat spectrum
    let direct = region_entropy_direct(state, region)?;
    let p = (-(s as f64)).exp2();
    Ok(SpectrumReport {
        entropy_bits: s,
        flat: direct == s,
        method: FlatnessMethod::Structural,
        support: if s < usize::BITS as usize { 1usize << s } else { usize::MAX },
        min_eigenvalue: p,
        max_eigenvalue: p,
    })
}

/// One row of an entropy report.
#[derive(Clone, Debug, Serialize)]
pub struct RegionEntry {
    pub label: String,
    pub size: usize,
    pub boundary_length: usize,
    pub boundaries: usize,
    pub entropy_bits: usize,
    /// Value of `½L − c` the region is checked against, if any.
    pub expected: Option<f64>,
    pub pass: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CombinationEntry {
    pub partition: String,
    pub kind: PartitionKind,
    pub value: i64,
    pub expected: Option<i64>,
    pub pass: Option<bool>,
    pub regions: Vec<RegionEntry>,
    /// `γ = log₂ D` assumed for dimension extraction.
    pub gamma: f64,
    pub total_dimension: f64,
    /// `d = D 2^{S_ann/2}`, annular partitions only.
    pub quantum_dimension: Option<f64>,
    pub expected_dimension: Option<f64>,
    pub fusion_table: Option<String>,
    pub predicted: Option<f64>,
}

/// A named pass/fail verification inside a report.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    /// Acceptance criterion this check evidences, when it maps to one.
    pub criterion: Option<u8>,
    pub passed: bool,
    pub detail: String,
}

/// Everything measured for one experiment.
#[derive(Clone, Debug, Serialize)]
pub struct EntropyReport {
    pub experiment: String,
    pub description: String,
    pub qubits: usize,
    pub logical_qubits: usize,
    pub regions: Vec<RegionEntry>,
    pub combinations: Vec<CombinationEntry>,
    pub area_law: Option<crate::fit::AreaLawFit>,
    pub spectrum_flat: Option<bool>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl EntropyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Convenience: entropy of a [`Region`].
pub fn entropy_of(state: &GeneratorSet, region: &Region) -> Result<usize> {
    region_entropy(state, region.mask())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_plain_lattice, complete_to_pure_state, LogicalState, Rect};
    use crate::pauli::PauliOp;

    fn bell() -> GeneratorSet {
        GeneratorSet::new(2, vec!["XX".parse::<PauliOp>().unwrap(), "ZZ".parse().unwrap()]).unwrap()
    }

    #[test]
    fn bell_pair_has_one_bit() {
        let g = bell();
        let a = BitVec::from_indices(2, [0]);
        assert_eq!(region_entropy(&g, &a).unwrap(), 1);
        assert_eq!(region_entropy_direct(&g, &a).unwrap(), 1);
        assert_eq!(bell_pair_count(&g, &a).unwrap(), 1);
    }

    #[test]
    fn non_pure_state_rejected() {
        let g = GeneratorSet::new(2, vec!["XX".parse().unwrap()]).unwrap();
        assert!(matches!(region_entropy(&g, &BitVec::from_indices(2, [0])), Err(Error::NotPure { .. })));
    }

    #[test]
    fn vacuum_single_qubit_is_maximally_mixed() {
        let lat = build_plain_lattice(6, 6).unwrap();
        let st = complete_to_pure_state(&lat, &LogicalState::Auto).unwrap();
        let q = lat.rect_mask(&[Rect::new(3, 2, 1, 1)]);
        assert_eq!(region_entropy(st.generators(), &q).unwrap(), 1);
    }

    #[test]
    fn three_routes_agree_on_vacuum_rectangles() {
        let lat = build_plain_lattice(12, 12).unwrap();
        let st = complete_to_pure_state(&lat, &LogicalState::Auto).unwrap();
        for (w, h) in [(2, 2), (3, 4), (4, 4), (5, 3), (6, 6)] {
            let m = lat.rect_mask(&[Rect::new(2, 3, w, h)]);
            let s = region_entropy(st.generators(), &m).unwrap();
            assert_eq!(s, region_entropy_direct(st.generators(), &m).unwrap());
            assert_eq!(s, bell_pair_count(st.generators(), &m).unwrap());
            assert_eq!(s, region_entropy(st.generators(), &m.not()).unwrap());
        }
    }

    #[test]
    fn predictions_for_ising_tables() {
        let d = ising::TOTAL_DIMENSION;
        assert_eq!(predict_s_ann(&ising::vacuum(), d).unwrap(), -2.0);
        assert!((predict_s_ann(&ising::sigma_quartet_mixed(), d).unwrap() + 1.0).abs() < 1e-12);
        assert!((predict_s_ann(&ising::sigma_pair(), d).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_tables_rejected() {
        assert!(predict_s_ann(&[FusionOutcome::new(0.6, 1.0, 1.0)], 2.0).is_err());
        assert!(predict_s_ann(&[FusionOutcome::new(1.0, 0.5, 1.0)], 2.0).is_err());
        assert!(predict_s_ann(&[], 2.0).is_err());
    }

    #[test]
    fn dimension_extraction() {
        assert_eq!(extract_dimension(-2.0, 2.0), 1.0);
        assert!((extract_dimension(-1.0, 2.0) - std::f64::consts::SQRT_2).abs() < 1e-9);
        assert_eq!(extract_dimension(0.0, 2.0), 2.0);
    }

    #[test]
    fn structural_flatness_on_large_state() {
        let lat = build_plain_lattice(8, 8).unwrap();
        let st = complete_to_pure_state(&lat, &LogicalState::Auto).unwrap();
        let m = lat.rect_mask(&[Rect::new(1, 1, 3, 3)]);
        let r = spectrum_flatness(st.generators(), &m, 16).unwrap();
        assert!(r.flat);
        assert_eq!(r.method, FlatnessMethod::Structural);
    }
}
