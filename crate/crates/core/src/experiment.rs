//! Declarative experiments: a lattice, a logical state, optional excitations,
//! regions and partitions, and the diagnostics to run on them.

use std::path::Path;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Deserialize;

use crate::bits::BitVec;
use crate::canonical::{canonicalize_annulus, canonicalize_single_boundary, labelled_terms, CanonicalDecomposition, CanonicalTerm};
use crate::entropy::{
    extract_dimension, ising, predict_s_ann, region_entropy, seven_term, spectrum_flatness, Check, CombinationEntry,
    EntropyReport, RegionEntry,
};
use crate::error::{Error, Result};
use crate::fit::fit_area_law;
use crate::generators::GeneratorSet;
use crate::lattice::{
    complete_to_pure_state, dyon_string_col, dyon_string_row, ChainRoute, ChainSpec, Coord, DefectLattice,
    DislocationSpec, LogicalState, Rect, StabilizerState,
};
use crate::oracle::{oracle_entropy, project_state, surrogate_patch, DenseState, DEFAULT_CAP};
use crate::pauli::{Pauli, PauliOp, Sign};
use crate::regions::{boundary_length, make_annulus, make_tripartite, PartitionKind, Region, RegionPartition};

const TOLERANCE: f64 = 1e-9;

/// A config file: one or more experiments.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(rename = "experiment")]
    pub experiments: Vec<ExperimentConfig>,
}

impl ConfigFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let file: ConfigFile =
            toml::from_str(text).map_err(|e| Error::Config { path: origin.to_string(), message: e.to_string() })?;
        if file.experiments.is_empty() {
            return Err(Error::Config { path: origin.to_string(), message: "no [[experiment]] tables".into() });
        }
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub lattice: LatticeConfig,
    #[serde(default)]
    pub logicals: Vec<LogicalConfig>,
    #[serde(default)]
    pub anyon_strings: Vec<StringConfig>,
    #[serde(default)]
    pub regions: Vec<RegionConfig>,
    #[serde(default)]
    pub partitions: Vec<PartitionConfig>,
    pub area_law: Option<AreaLawConfig>,
    #[serde(default)]
    pub diagnostics: Diagnostics,
    #[serde(default)]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub width: usize,
    pub height: usize,
    #[serde(default)]
    pub dislocations: Vec<DislocationSpec>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
pub enum SignConfig {
    #[default]
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl From<SignConfig> for Sign {
    fn from(s: SignConfig) -> Self {
        match s {
            SignConfig::Plus => Sign::Plus,
            SignConfig::Minus => Sign::Minus,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct LogicalConfig {
    pub label: String,
    #[serde(default)]
    pub sign: SignConfig,
    #[serde(flatten)]
    pub route: RouteConfig,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "route", rename_all = "lowercase")]
pub enum RouteConfig {
    Twists {
        between: [usize; 2],
        #[serde(default)]
        margin: usize,
    },
    Dislocation {
        dislocation: usize,
    },
    Corridor {
        rects: Vec<[usize; 4]>,
    },
    Explicit {
        ops: String,
    },
}

#[derive(Clone, Debug, Deserialize)]
pub struct StringConfig {
    pub label: String,
    #[serde(flatten)]
    pub path: StringPath,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StringPath {
    /// `Y` string along row `y`.
    Row { y: usize, from: usize, to: usize },
    /// `Y` string along column `x`.
    Col { x: usize, from: usize, to: usize },
    Explicit { ops: String },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    pub name: String,
    pub rects: Vec<[usize; 4]>,
    #[serde(default = "one")]
    pub boundaries: usize,
    /// Checked form `S = L/2 − offset`.
    pub expected_offset: Option<f64>,
    pub expected_boundary_length: Option<usize>,
    pub criterion: Option<u8>,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PartitionConfig {
    Tripartite {
        name: String,
        origin: [usize; 2],
        size: [usize; 2],
        expected: Option<i64>,
        criterion: Option<u8>,
    },
    Annulus {
        name: String,
        inner: [usize; 4],
        thickness: usize,
        expected: Option<i64>,
        criterion: Option<u8>,
        /// Name of an Ising fusion table to compare with.
        fusion: Option<String>,
        expected_dimension: Option<f64>,
        /// Logical expected to stay pinned to the annulus.
        crossing_logical: Option<String>,
        /// Checked form `S_ABC = L_ABC/2 − offset` for the whole annulus.
        expected_abc_offset: Option<f64>,
    },
}

impl PartitionConfig {
    fn name(&self) -> &str {
        match self {
            Self::Tripartite { name, .. } | Self::Annulus { name, .. } => name,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AreaLawConfig {
    /// Region names to fit; all single-boundary regions when empty.
    #[serde(default)]
    pub regions: Vec<String>,
    pub expected_slope: String,
    pub expected_intercept: String,
    pub criterion: Option<u8>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Diagnostics {
    #[serde(default = "yes")]
    pub canonical: bool,
    #[serde(default = "yes")]
    pub oracle: bool,
    #[serde(default = "yes")]
    pub spectrum: bool,
    /// Also check every rectangle of the lattice against the oracle.
    #[serde(default)]
    pub oracle_all_rects: bool,
    /// Windows `[x, y, w, h]` cut out as open patches for the oracle.
    #[serde(default)]
    pub surrogates: Vec<[usize; 4]>,
    /// Dislocation index for the string-transport test.
    pub domain_wall: Option<usize>,
    /// Recompute everything without the anyon strings and compare.
    #[serde(default)]
    pub compare_without_strings: bool,
    #[serde(default)]
    pub structure: bool,
}

fn yes() -> bool {
    true
}

impl Default for Diagnostics {
    fn default() -> Self {
        Self {
            canonical: true,
            oracle: true,
            spectrum: true,
            oracle_all_rects: false,
            surrogates: Vec::new(),
            domain_wall: None,
            compare_without_strings: false,
            structure: false,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub oracle_cap: usize,
    pub cross_check: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { oracle_cap: DEFAULT_CAP, cross_check: true }
    }
}

fn rect(r: &[usize; 4]) -> Rect {
    Rect::new(r[0], r[1], r[2], r[3])
}

/// Parses `X(3,4) Y(4,4) Z(5,4)`.
pub fn parse_sparse(text: &str) -> Result<Vec<(Coord, Pauli)>> {
    let bad = |t: &str| Error::Parse(format!("expected P(x,y), found `{t}`"));
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if !compact.is_empty() && !compact.ends_with(')') {
        return Err(bad(&compact));
    }
    compact
        .split_inclusive(')')
        .map(|tok| {
            let mut chars = tok.chars();
            let p = chars.next().and_then(Pauli::from_symbol).ok_or_else(|| bad(tok))?;
            let rest = chars.as_str();
            let inner = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(|| bad(tok))?;
            let (x, y) = inner.split_once(',').ok_or_else(|| bad(tok))?;
            let x = x.parse().map_err(|_| bad(tok))?;
            let y = y.parse().map_err(|_| bad(tok))?;
            Ok((Coord::new(x, y), p))
        })
        .collect()
}

impl ExperimentConfig {
    pub fn build_lattice(&self) -> Result<DefectLattice> {
        DefectLattice::build(self.lattice.width, self.lattice.height, &self.lattice.dislocations)
    }

    pub fn logical_state(&self) -> Result<LogicalState> {
        if self.logicals.is_empty() {
            return Ok(LogicalState::Auto);
        }
        let mut seen = std::collections::HashSet::new();
        let chains = self
            .logicals
            .iter()
            .map(|l| {
                if !seen.insert(l.label.clone()) {
                    return Err(Error::Spec(format!("logical `{}` listed twice", l.label)));
                }
                let route = match &l.route {
                    RouteConfig::Twists { between, margin } => ChainRoute::Twists { between: *between, margin: *margin },
                    RouteConfig::Dislocation { dislocation } => ChainRoute::Dislocation(*dislocation),
                    RouteConfig::Corridor { rects } => ChainRoute::Corridor(rects.iter().map(rect).collect()),
                    RouteConfig::Explicit { ops } => ChainRoute::Explicit(parse_sparse(ops)?),
                };
                Ok(ChainSpec { label: l.label.clone(), route, sign: l.sign.into() })
            })
            .collect::<Result<_>>()?;
        Ok(LogicalState::Chains(chains))
    }

    pub fn string_ops(&self, lattice: &DefectLattice) -> Result<Vec<(String, PauliOp)>> {
        self.anyon_strings
            .iter()
            .map(|s| {
                let op = match &s.path {
                    StringPath::Row { y, from, to } => dyon_string_row(lattice, *y, *from, *to)?,
                    StringPath::Col { x, from, to } => dyon_string_col(lattice, *x, *from, *to)?,
                    StringPath::Explicit { ops } => lattice.operator(parse_sparse(ops)?)?,
                };
                Ok((s.label.clone(), op))
            })
            .collect()
    }

    /// The pure state the experiment measures, anyon strings applied.
    pub fn prepare(&self) -> Result<(DefectLattice, StabilizerState, StabilizerState)> {
        let lattice = self.build_lattice()?;
        let vacuum = complete_to_pure_state(&lattice, &self.logical_state()?)?;
        let mut state = vacuum.clone();
        for (_, op) in self.string_ops(&lattice)? {
            state = state.apply_anyon_pair(&op)?;
        }
        Ok((lattice, vacuum, state))
    }
}

struct Built {
    partition: RegionPartition,
    config: PartitionConfig,
}

fn build_partition(lattice: &DefectLattice, cfg: &PartitionConfig) -> Result<Built> {
    let partition = match cfg {
        PartitionConfig::Tripartite { origin, size, .. } => {
            make_tripartite(lattice, Coord::new(origin[0], origin[1]), size[0], size[1])?
        }
        PartitionConfig::Annulus { inner, thickness, .. } => make_annulus(lattice, rect(inner), *thickness)?,
    };
    Ok(Built { partition, config: cfg.clone() })
}

fn check(checks: &mut Vec<Check>, name: impl Into<String>, criterion: Option<u8>, passed: bool, detail: impl Into<String>) {
    checks.push(Check { name: name.into(), criterion, passed, detail: detail.into() });
}

fn parse_ratio(s: &str) -> Result<Ratio<i64>> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a: i64 = a.trim().parse().map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
            let b: i64 = b.trim().parse().map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
            if b == 0 {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(Ratio::new(a, b))
        }
        None => Ok(Ratio::from_integer(s.parse().map_err(|_| Error::Parse(format!("bad rational `{s}`")))?)),
    }
}

/// Runs every diagnostic requested by `cfg`.
pub fn run_experiment(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<EntropyReport> {
    let (lattice, vacuum, state) = cfg.prepare()?;
    let n = lattice.num_qubits();
    let gens = state.generators();
    let mut checks = Vec::new();
    let mut notes = cfg.notes.clone();

    if cfg.diagnostics.structure {
        let ops: Vec<PauliOp> = lattice.local_ops().into_iter().chain(state.logicals.iter().map(|l| l.op.clone())).collect();
        let commuting = ops.iter().enumerate().all(|(i, a)| ops[i + 1..].iter().all(|b| a.commutes_with(b)));
        check(&mut checks, "all generators commute", Some(9), commuting, format!("{} operators", ops.len()));
        let rank = gens.matrix().rank();
        check(&mut checks, "completion rank equals qubit count", Some(9), rank == n && gens.len() == n, format!("rank {rank}, qubits {n}"));
        let twists_ok = lattice.twists().iter().all(|t| {
            let op = &lattice.generators()[t.generator].op;
            op.weight() == 5 && op.count_y() == 1
        });
        check(
            &mut checks,
            "twist terms have weight 5 and one Y",
            Some(9),
            twists_ok,
            format!("{} twists", lattice.twists().len()),
        );
    }

    let regions: Vec<(Region, &RegionConfig)> = cfg
        .regions
        .iter()
        .map(|r| {
            let rects: Vec<Rect> = r.rects.iter().map(rect).collect();
            Ok((Region::from_rects(&lattice, r.name.clone(), &rects, r.boundaries)?, r))
        })
        .collect::<Result<_>>()?;
    let partitions: Vec<Built> = cfg.partitions.iter().map(|p| build_partition(&lattice, p)).collect::<Result<_>>()?;

    let entries: Vec<RegionEntry> = regions
        .par_iter()
        .map(|(region, rc)| {
            let s = region_entropy(gens, region.mask())?;
            let l = boundary_length(&lattice, region.mask());
            let expected = rc.expected_offset.map(|o| l as f64 / 2.0 - o);
            Ok(RegionEntry {
                label: region.name().to_string(),
                size: region.len(),
                boundary_length: l,
                boundaries: region.boundaries(),
                entropy_bits: s,
                expected,
                pass: expected.map(|e| (e - s as f64).abs() < TOLERANCE),
            })
        })
        .collect::<Result<_>>()?;
    for ((entry, (_, rc)), _) in entries.iter().zip(&regions).zip(0..) {
        if let Some(pass) = entry.pass {
            check(
                &mut checks,
                format!("region {} entropy", entry.label),
                rc.criterion,
                pass,
                format!("S = {} with L = {}, expected {}", entry.entropy_bits, entry.boundary_length, entry.expected.unwrap_or(f64::NAN)),
            );
        }
        if let Some(l) = rc.expected_boundary_length {
            check(
                &mut checks,
                format!("region {} boundary length", entry.label),
                rc.criterion,
                entry.boundary_length == l,
                format!("L = {}, expected {l}", entry.boundary_length),
            );
        }
    }

    let mut combinations = Vec::new();
    for built in &partitions {
        let combo = seven_term(gens, &built.partition)?;
        let regions7 = built.partition.combination_regions();
        let region_entries: Vec<RegionEntry> = regions7
            .iter()
            .zip(&combo.terms)
            .map(|(r, (label, size, s))| RegionEntry {
                label: label.clone(),
                size: *size,
                boundary_length: boundary_length(&lattice, r.mask()),
                boundaries: r.boundaries(),
                entropy_bits: *s,
                expected: None,
                pass: None,
            })
            .collect();
        let name = built.config.name().to_string();
        let mut entry = CombinationEntry {
            partition: name.clone(),
            kind: built.partition.kind(),
            value: combo.value,
            expected: None,
            pass: None,
            regions: region_entries,
            gamma: ising::TOTAL_DIMENSION.log2(),
            total_dimension: ising::TOTAL_DIMENSION,
            quantum_dimension: None,
            expected_dimension: None,
            fusion_table: None,
            predicted: None,
        };
        let label = if built.partition.kind() == PartitionKind::Tripartite { "S_topo" } else { "S_ann" };
        match &built.config {
            PartitionConfig::Tripartite { expected, criterion, .. } => {
                entry.expected = *expected;
                if let Some(e) = expected {
                    entry.pass = Some(combo.value == *e);
                    check(&mut checks, format!("{name} {label}"), *criterion, combo.value == *e, format!("{label} = {}, expected {e}", combo.value));
                }
            }
            PartitionConfig::Annulus { expected, criterion, fusion, expected_dimension, .. } => {
                entry.expected = *expected;
                if let Some(e) = expected {
                    entry.pass = Some(combo.value == *e);
                    check(&mut checks, format!("{name} {label}"), *criterion, combo.value == *e, format!("{label} = {}, expected {e}", combo.value));
                }
                let d = extract_dimension(combo.value as f64, ising::TOTAL_DIMENSION);
                entry.quantum_dimension = Some(d);
                entry.expected_dimension = *expected_dimension;
                if let Some(ed) = expected_dimension {
                    check(
                        &mut checks,
                        format!("{name} quantum dimension"),
                        Some(5),
                        (d - ed).abs() < TOLERANCE,
                        format!("d = {d:.12}, expected {ed:.12}"),
                    );
                }
                if let Some(table_name) = fusion {
                    let table = ising::by_name(table_name).ok_or_else(|| {
                        Error::Spec(format!("unknown fusion table `{table_name}` (known: {})", ising::NAMES.join(", ")))
                    })?;
                    let predicted = predict_s_ann(&table, ising::TOTAL_DIMENSION)?;
                    entry.fusion_table = Some(table_name.clone());
                    entry.predicted = Some(predicted);
                    check(
                        &mut checks,
                        format!("{name} fusion prediction"),
                        Some(5),
                        (predicted - combo.value as f64).abs() < TOLERANCE,
                        format!("predicted {predicted:.12} from `{table_name}`, measured {}", combo.value),
                    );
                }
            }
        }
        combinations.push(entry);
    }

    // every region the experiment touched, for the cross-checks
    let mut all_regions: Vec<(Region, Option<String>)> = regions.iter().map(|(r, _)| (r.clone(), None)).collect();
    // (index into all_regions, pinned logical, offset) for the whole-annulus check
    let mut pinned = Vec::new();
    for built in &partitions {
        let (crossing, abc_offset) = match &built.config {
            PartitionConfig::Annulus { crossing_logical, expected_abc_offset, .. } => {
                (crossing_logical.clone(), *expected_abc_offset)
            }
            _ => (None, None),
        };
        for r in built.partition.combination_regions() {
            if r.name() == "ABC" {
                if let Some(offset) = abc_offset {
                    pinned.push((all_regions.len(), crossing.clone(), offset));
                }
            }
            let label = format!("{}/{}", built.config.name(), r.name());
            all_regions.push((Region::new(label, r.mask().clone(), r.boundaries()), crossing.clone()));
        }
    }

    if opts.cross_check && cfg.diagnostics.canonical {
        let (local, logicals) = labelled_terms(&lattice, &state);
        let results: Vec<(String, Result<(CanonicalDecomposition, usize)>)> = all_regions
            .par_iter()
            .map(|(r, crossing)| {
                let out = canonical_form(&local, &logicals, r, crossing.as_deref())
                    .and_then(|d| Ok((d, region_entropy(gens, r.mask())?)));
                (r.name().to_string(), out)
            })
            .collect();
        for (i, (name, res)) in results.iter().enumerate() {
            match res {
                Ok((d, s)) => {
                    let pairs = d.pair_count();
                    check(
                        &mut checks,
                        format!("canonical pairs {name}"),
                        Some(7),
                        pairs == *s,
                        format!("{pairs} pairs, rank entropy {s}"),
                    );
                    for (_, label, offset) in pinned.iter().filter(|p| p.0 == i) {
                        let l = boundary_length(&lattice, all_regions[i].0.mask());
                        let expected = l as f64 / 2.0 - offset;
                        let stuck = label.as_ref().is_none_or(|lab| d.undeformable.contains(lab));
                        check(
                            &mut checks,
                            format!("canonical {name} with pinned logical"),
                            Some(7),
                            stuck && (pairs as f64 - expected).abs() < TOLERANCE,
                            format!(
                                "{pairs} pairs, L = {l}, expected {expected}; undeformable: [{}]",
                                d.undeformable.join(", ")
                            ),
                        );
                    }
                }
                Err(e) => check(&mut checks, format!("canonical pairs {name}"), Some(7), false, e.to_string()),
            }
        }
    }

    if opts.cross_check && cfg.diagnostics.oracle && n <= opts.oracle_cap {
        let dense = project_state(gens, opts.oracle_cap)?;
        let mut masks: Vec<(String, BitVec)> = all_regions.iter().map(|(r, _)| (r.name().to_string(), r.mask().clone())).collect();
        if cfg.diagnostics.oracle_all_rects {
            masks.extend(all_rects(&lattice, Rect::new(0, 0, lattice.width(), lattice.height())));
        }
        oracle_checks(&mut checks, &format!("lattice ({n} qubits)"), gens, &dense, &masks)?;
    } else if opts.cross_check && cfg.diagnostics.oracle && !cfg.diagnostics.surrogates.is_empty() {
        notes.push(format!("{n} qubits exceed the oracle cap {}; only surrogate patches are diagonalised", opts.oracle_cap));
    }

    if opts.cross_check && !cfg.diagnostics.surrogates.is_empty() {
        let mut pentagons = 0;
        for w in &cfg.diagnostics.surrogates {
            let window = rect(w);
            let s = surrogate_patch(&lattice, window)?;
            let m = s.generators.num_qubits();
            if m > opts.oracle_cap {
                check(&mut checks, format!("surrogate {w:?}"), Some(8), false, format!("{m} qubits exceed cap {}", opts.oracle_cap));
                continue;
            }
            let dense = project_state(&s.generators, opts.oracle_cap)?;
            let index: std::collections::HashMap<Coord, usize> = s.coords.iter().enumerate().map(|(i, c)| (*c, i)).collect();
            let masks: Vec<(String, BitVec)> = all_rects(&lattice, window)
                .into_iter()
                .map(|(label, mask)| {
                    let local = BitVec::from_indices(m, mask.iter_ones().filter_map(|q| index.get(&lattice.coord(q)).copied()));
                    (label, local)
                })
                .filter(|(_, mask)| !mask.is_zero())
                .collect();
            let label = format!("surrogate {w:?} ({m} qubits, {} pentagons)", s.pentagons);
            oracle_checks(&mut checks, &label, &s.generators, &dense, &masks)?;
            pentagons += s.pentagons;
        }
        check(
            &mut checks,
            "surrogates include a twist pentagon",
            Some(8),
            pentagons > 0,
            format!("{pentagons} pentagons over {} windows", cfg.diagnostics.surrogates.len()),
        );
    }

    let mut spectrum_flat = None;
    if cfg.diagnostics.spectrum && !all_regions.is_empty() {
        let cap = if opts.cross_check { opts.oracle_cap } else { 0 };
        let reports: Vec<_> = all_regions
            .par_iter()
            .map(|(r, _)| spectrum_flatness(gens, r.mask(), cap))
            .collect::<Result<_>>()?;
        let flat = reports.iter().all(|r| r.flat);
        spectrum_flat = Some(flat);
        let method = reports.first().map(|r| format!("{:?}", r.method).to_lowercase()).unwrap_or_default();
        check(&mut checks, "flat entanglement spectra", Some(8), flat, format!("{} regions, {method}", reports.len()));
    }

    if let Some(d) = cfg.diagnostics.domain_wall {
        let t = lattice.domain_wall_transmutation(d)?;
        let colours: Vec<u8> = t.reachable.iter().map(|r| r.1).collect();
        check(
            &mut checks,
            format!("string type flips across dislocation {d}"),
            Some(9),
            t.flips(),
            format!("source colour {}, far-side colours {colours:?}", t.source_color),
        );
    }

    if cfg.diagnostics.compare_without_strings {
        let base = vacuum.generators();
        let mut same = true;
        let mut compared = 0;
        for (r, _) in &all_regions {
            compared += 1;
            same &= region_entropy(base, r.mask())? == region_entropy(gens, r.mask())?;
        }
        let flipped = state.local.iter().zip(&vacuum.local).filter(|(a, b)| a.sign() != b.sign()).count();
        check(
            &mut checks,
            "entropies unchanged by the anyon strings",
            Some(6),
            same && flipped > 0,
            format!("{compared} regions compared, {flipped} local terms flipped"),
        );
        if opts.cross_check && cfg.diagnostics.oracle && n <= opts.oracle_cap {
            let before = project_state(base, opts.oracle_cap)?;
            let after = project_state(gens, opts.oracle_cap)?;
            let overlap = before.overlap(&after);
            let mut worst: f64 = 0.0;
            for (r, _) in &all_regions {
                let a = oracle_entropy(&before, r.mask())?.spectrum;
                let b = oracle_entropy(&after, r.mask())?.spectrum;
                worst = if a.len() == b.len() {
                    a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(worst, f64::max)
                } else {
                    f64::INFINITY
                };
            }
            check(
                &mut checks,
                "excited state is orthogonal with identical spectra",
                Some(6),
                overlap < TOLERANCE && worst < TOLERANCE,
                format!("overlap {overlap:.2e}, max spectral difference {worst:.2e}"),
            );
        }
    }

    let area_law = match &cfg.area_law {
        Some(al) => {
            let picked: Vec<&RegionEntry> = entries
                .iter()
                .filter(|e| if al.regions.is_empty() { e.boundaries == 1 } else { al.regions.contains(&e.label) })
                .collect();
            let comps = picked.first().map(|e| e.boundaries).unwrap_or(1);
            let samples: Vec<(usize, usize)> = picked.iter().map(|e| (e.boundary_length, e.entropy_bits)).collect();
            let fit = fit_area_law(&samples, comps)?;
            let slope = parse_ratio(&al.expected_slope)?;
            let intercept = parse_ratio(&al.expected_intercept)?;
            let pass = fit.pass && fit.slope == slope && fit.intercept == intercept;
            check(
                &mut checks,
                "area-law fit",
                al.criterion,
                pass,
                format!(
                    "alpha = {}, intercept = {} over {} samples{}",
                    fit.slope,
                    fit.intercept,
                    samples.len(),
                    fit.reason.as_deref().map(|r| format!(" ({r})")).unwrap_or_default()
                ),
            );
            Some(fit)
        }
        None => None,
    };

    Ok(EntropyReport {
        experiment: cfg.name.clone(),
        description: cfg.description.clone(),
        qubits: n,
        logical_qubits: lattice.logical_qubit_count(),
        regions: entries,
        combinations,
        area_law,
        spectrum_flat,
        checks,
        notes,
    })
}

fn canonical_form(
    local: &[CanonicalTerm],
    logicals: &[CanonicalTerm],
    region: &Region,
    crossing: Option<&str>,
) -> Result<CanonicalDecomposition> {
    if region.boundaries() >= 2 {
        canonicalize_annulus(local, logicals, region.mask(), crossing)
    } else {
        canonicalize_single_boundary(local, logicals, region.mask())
    }
}

fn all_rects(lattice: &DefectLattice, window: Rect) -> Vec<(String, BitVec)> {
    let mut out = Vec::new();
    for x in window.x..window.x + window.width {
        for y in window.y..window.y + window.height {
            for w in 1..=window.x + window.width - x {
                for h in 1..=window.y + window.height - y {
                    let mask = lattice.rect_mask(&[Rect::new(x, y, w, h)]);
                    if !mask.is_zero() {
                        out.push((format!("rect({x},{y},{w},{h})"), mask));
                    }
                }
            }
        }
    }
    out
}

fn oracle_checks(
    checks: &mut Vec<Check>,
    label: &str,
    gens: &GeneratorSet,
    dense: &DenseState,
    masks: &[(String, BitVec)],
) -> Result<()> {
    let results: Vec<(f64, f64, bool)> = masks
        .par_iter()
        .map(|(_, mask)| {
            let rank = region_entropy(gens, mask)? as f64;
            let o = oracle_entropy(dense, mask)?;
            let flat = o.flatness_ratio() < 1.0 + TOLERANCE && o.spectrum.len() as f64 == rank.exp2();
            Ok(((o.entropy_bits - rank).abs(), o.flatness_ratio(), flat))
        })
        .collect::<Result<_>>()?;
    let worst = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let worst_ratio = results.iter().map(|r| r.1).fold(1.0, f64::max);
    let all_flat = results.iter().all(|r| r.2);
    check(
        checks,
        format!("oracle entropy {label}"),
        Some(8),
        worst < TOLERANCE,
        format!("{} regions, max |oracle - rank| = {worst:.2e}", results.len()),
    );
    check(
        checks,
        format!("oracle spectrum {label}"),
        Some(8),
        all_flat,
        format!("max eigenvalue ratio {worst_ratio:.12}"),
    );
    Ok(())
}

/// Runs all experiments of a file concurrently, in file order.
pub fn run_config(file: &ConfigFile, opts: &RunOptions) -> Result<Vec<EntropyReport>> {
    file.experiments.par_iter().map(|e| run_experiment(e, opts)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_parser() {
        let v = parse_sparse("X(3,4) Y(10, 2)").unwrap();
        assert_eq!(v, vec![(Coord::new(3, 4), Pauli::X), (Coord::new(10, 2), Pauli::Y)]);
        assert!(parse_sparse("Q(1,2)").is_err());
        assert!(parse_sparse("X(1;2)").is_err());
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_ratio("1/2").unwrap(), Ratio::new(1, 2));
        assert_eq!(parse_ratio("-1").unwrap(), Ratio::from_integer(-1));
        assert!(parse_ratio("1/0").is_err());
    }

    #[test]
    fn unknown_field_reports_its_path() {
        let text = "[[experiment]]\nname = \"x\"\n[experiment.lattice]\nwidth = 8\nheight = 8\ncolour = 3\n";
        let err = ConfigFile::parse(text, "inline").unwrap_err().to_string();
        assert!(err.contains("colour"), "{err}");
    }

    #[test]
    fn small_vacuum_experiment_runs() {
        let text = r#"
[[experiment]]
name = "tiny"
[experiment.lattice]
width = 8
height = 8
[[experiment.regions]]
name = "square"
rects = [[2, 2, 3, 3]]
expected_offset = 1
[[experiment.partitions]]
kind = "tripartite"
name = "disk"
origin = [1, 1]
size = [4, 4]
expected = -1
"#;
        let file = ConfigFile::parse(text, "inline").unwrap();
        let reports = run_config(&file, &RunOptions::default()).unwrap();
        assert!(reports[0].passed(), "{:#?}", reports[0].checks);
    }
}
