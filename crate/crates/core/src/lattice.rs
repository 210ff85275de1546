//! Wen-plaquette toric code on a torus, with dislocations and twists.
//!
//! Qubits sit on the vertices `(x, y)` of a `width × height` torus. Each vertex
//! anchors one plaquette `X(x,y) Z(x+1,y) Z(x,y+1) X(x+1,y+1)`.
//!
//! A dislocation on row `r` spanning columns `start..=end` deletes the
//! vertices `(j, r)` on that segment. Every pair of plaquettes anchored at
//! `(i, r-1)` and `(i, r)` for `start-1 <= i <= end` is merged into their
//! product with the deleted qubits dropped. Interior merges are four-body
//! terms joining rows `r-1` and `r+1`; the two end merges keep one surviving
//! qubit of row `r`, where the product of an `X` and a `Z` leaves a `Y`. Those
//! five-body terms are the twists.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::generators::{centralizer_basis, first_anticommuting_pair, symplectic_completion, GeneratorSet};
use crate::gf2::{solve_system, Echelon};
use crate::pauli::{Pauli, PauliOp, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coord {
    pub x: usize,
    pub y: usize,
}

impl Coord {
    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }
}

/// Axis-aligned block of vertices `[x, x+width) × [y, y+height)`; no wrapping.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

impl Rect {
    pub const fn new(x: usize, y: usize, width: usize, height: usize) -> Self {
        Self { x, y, width, height }
    }

    pub fn contains(&self, c: Coord) -> bool {
        c.x >= self.x && c.x < self.x + self.width && c.y >= self.y && c.y < self.y + self.height
    }

    pub fn is_empty(&self) -> bool {
        self.width == 0 || self.height == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DislocationSpec {
    pub row: usize,
    pub start: usize,
    pub end: usize,
}

impl DislocationSpec {
    pub const fn new(row: usize, start: usize, end: usize) -> Self {
        Self { row, start, end }
    }

    fn parents(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.start - 1..=self.end).flat_map(move |i| [(i, self.row - 1), (i, self.row)])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Plaquette,
    Merged,
    Twist,
}

/// A local Hamiltonian term: a plaquette, a merged dislocation term, or a twist.
#[derive(Clone, Debug)]
pub struct LocalGenerator {
    pub op: PauliOp,
    pub kind: GeneratorKind,
    /// Anchor of the (lower) parent plaquette.
    pub anchor: Coord,
}

impl LocalGenerator {
    /// Checkerboard label of the anchor plaquette; the two values are the
    /// two string types of the defect-free model.
    pub fn color(&self) -> u8 {
        ((self.anchor.x + self.anchor.y) % 2) as u8
    }

    pub fn label(&self) -> String {
        let kind = match self.kind {
            GeneratorKind::Plaquette => "plaquette",
            GeneratorKind::Merged => "merged",
            GeneratorKind::Twist => "twist",
        };
        format!("{kind}({},{})", self.anchor.x, self.anchor.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TwistEnd {
    Left,
    Right,
}

#[derive(Clone, Debug)]
pub struct Twist {
    /// The surviving row vertex carrying the `Y`.
    pub site: Coord,
    pub generator: usize,
    pub dislocation: usize,
    pub end: TwistEnd,
}

/// A named logical operator of the lattice.
#[derive(Clone, Debug)]
pub struct NamedOperator {
    pub label: String,
    pub op: PauliOp,
}

#[derive(Clone, Debug)]
pub struct DefectLattice {
    width: usize,
    height: usize,
    dislocations: Vec<DislocationSpec>,
    index: Vec<Option<usize>>,
    coords: Vec<Coord>,
    generators: Vec<LocalGenerator>,
    twists: Vec<Twist>,
    torus_logicals: Vec<NamedOperator>,
    dyon_chains: Vec<NamedOperator>,
}

/// Defect-free `width × height` torus.
pub fn build_plain_lattice(width: usize, height: usize) -> Result<DefectLattice> {
    DefectLattice::build(width, height, &[])
}

/// Returns `lattice` with one more dislocation.
pub fn insert_dislocation(lattice: DefectLattice, spec: DislocationSpec) -> Result<DefectLattice> {
    let mut all = lattice.dislocations;
    all.push(spec);
    DefectLattice::build(lattice.width, lattice.height, &all)
}

impl DefectLattice {
    pub fn build(width: usize, height: usize, dislocations: &[DislocationSpec]) -> Result<Self> {
        if width < 4 || height < 4 || !width.is_multiple_of(2) || !height.is_multiple_of(2) {
            return Err(Error::Spec(format!("torus must be even and at least 4×4, got {width}×{height}")));
        }
        validate_dislocations(width, height, dislocations)?;

        let mut deleted = vec![false; width * height];
        for d in dislocations {
            for j in d.start..=d.end {
                deleted[d.row * width + j] = true;
            }
        }
        let mut index = vec![None; width * height];
        let mut coords = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                if !deleted[y * width + x] {
                    index[y * width + x] = Some(coords.len());
                    coords.push(Coord::new(x, y));
                }
            }
        }
        let n = coords.len();

        let plaquette_terms = |x: usize, y: usize| {
            let (x1, y1) = ((x + 1) % width, (y + 1) % height);
            [((x, y), Pauli::X), ((x1, y), Pauli::Z), ((x, y1), Pauli::Z), ((x1, y1), Pauli::X)]
        };

        let mut consumed = vec![false; width * height];
        let mut generators = Vec::new();
        let mut twists = Vec::new();
        for (di, d) in dislocations.iter().enumerate() {
            for i in d.start - 1..=d.end {
                consumed[(d.row - 1) * width + i] = true;
                consumed[d.row * width + i] = true;
                // product of the two parents, deleted vertices dropped
                let mut op = PauliOp::identity(n);
                for parent_y in [d.row - 1, d.row] {
                    let mut parent = PauliOp::identity(n);
                    for ((x, y), p) in plaquette_terms(i, parent_y) {
                        if let Some(q) = index[y * width + x] {
                            parent.set(q, p);
                        }
                    }
                    op.mul_assign_right(&parent);
                }
                // parents share the surviving row-r qubits; keep the Hermitian form
                let op = op.with_sign(Sign::Plus);
                let is_twist = i == d.start - 1 || i == d.end;
                if is_twist {
                    let (site, end) = if i == d.start - 1 {
                        (Coord::new(d.start - 1, d.row), TwistEnd::Left)
                    } else {
                        (Coord::new(d.end + 1, d.row), TwistEnd::Right)
                    };
                    twists.push(Twist { site, generator: generators.len(), dislocation: di, end });
                }
                generators.push(LocalGenerator {
                    op,
                    kind: if is_twist { GeneratorKind::Twist } else { GeneratorKind::Merged },
                    anchor: Coord::new(i, d.row - 1),
                });
            }
        }
        for y in 0..height {
            for x in 0..width {
                if consumed[y * width + x] {
                    continue;
                }
                let mut op = PauliOp::identity(n);
                for ((qx, qy), p) in plaquette_terms(x, y) {
                    let q = index[qy * width + qx].expect("plaquettes away from dislocations keep all vertices");
                    op.set(q, p);
                }
                generators.push(LocalGenerator { op, kind: GeneratorKind::Plaquette, anchor: Coord::new(x, y) });
            }
        }

        let mut lattice = Self {
            width,
            height,
            dislocations: dislocations.to_vec(),
            index,
            coords,
            generators,
            twists,
            torus_logicals: Vec::new(),
            dyon_chains: Vec::new(),
        };
        lattice.check_local_terms()?;
        lattice.dyon_chains = (0..dislocations.len()).map(|d| lattice.dislocation_chain(d)).collect::<Result<_>>()?;
        lattice.torus_logicals = lattice.torus_cycles()?;
        Ok(lattice)
    }

    fn check_local_terms(&self) -> Result<()> {
        let ops: Vec<PauliOp> = self.generators.iter().map(|g| g.op.clone()).collect();
        if let Some((i, j)) = first_anticommuting_pair(&ops) {
            return Err(Error::Consistency(format!(
                "{} and {} anticommute",
                self.generators[i].label(),
                self.generators[j].label()
            )));
        }
        for t in &self.twists {
            let g = &self.generators[t.generator];
            if g.op.weight() != 5 || g.op.count_y() != 1 {
                return Err(Error::Consistency(format!(
                    "{} has weight {} with {} Y factors",
                    g.label(),
                    g.op.weight(),
                    g.op.count_y()
                )));
            }
        }
        Ok(())
    }

    /// Dyon chain joining the two twists of dislocation `d`: a `Y` string
    /// along row `r-1` capped at both ends.
    fn dislocation_chain(&self, d: usize) -> Result<NamedOperator> {
        let s = self.dislocations[d];
        let r = s.row;
        let mut terms = vec![(Coord::new(s.start - 1, r - 1), Pauli::X), (Coord::new(s.end + 1, r - 1), Pauli::Z)];
        terms.extend((s.start..=s.end).map(|j| (Coord::new(j, r - 1), Pauli::Y)));
        terms.push((Coord::new(s.start - 1, r), Pauli::Z));
        terms.push((Coord::new(s.end + 1, r), Pauli::X));
        let op = self.operator(terms)?;
        let label = format!("chain{d}");
        self.check_logical(&label, &op)?;
        Ok(NamedOperator { label, op })
    }

    /// Row and column `Y` loops clear of every dislocation footprint.
    fn torus_cycles(&self) -> Result<Vec<NamedOperator>> {
        let row = (0..self.height).find(|&y| self.dislocations.iter().all(|d| y + 1 < d.row || y > d.row + 1));
        let col = (0..self.width).find(|&x| self.dislocations.iter().all(|d| x + 1 < d.start || x > d.end + 1));
        let mut out = Vec::new();
        if let Some(y) = row {
            let op = self.operator((0..self.width).map(|x| (Coord::new(x, y), Pauli::Y)))?;
            out.push(NamedOperator { label: format!("row_loop{y}"), op });
        }
        if let Some(x) = col {
            let op = self.operator((0..self.height).map(|y| (Coord::new(x, y), Pauli::Y)))?;
            out.push(NamedOperator { label: format!("col_loop{x}"), op });
        }
        for l in &out {
            self.check_logical(&l.label, &l.op)?;
        }
        Ok(out)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn num_qubits(&self) -> usize {
        self.coords.len()
    }

    pub fn dislocations(&self) -> &[DislocationSpec] {
        &self.dislocations
    }

    pub fn generators(&self) -> &[LocalGenerator] {
        &self.generators
    }

    pub fn local_ops(&self) -> Vec<PauliOp> {
        self.generators.iter().map(|g| g.op.clone()).collect()
    }

    pub fn twists(&self) -> &[Twist] {
        &self.twists
    }

    pub fn torus_logicals(&self) -> &[NamedOperator] {
        &self.torus_logicals
    }

    pub fn dyon_chains(&self) -> &[NamedOperator] {
        &self.dyon_chains
    }

    pub fn qubit(&self, c: Coord) -> Option<usize> {
        if c.x >= self.width || c.y >= self.height {
            return None;
        }
        self.index[c.y * self.width + c.x]
    }

    pub fn coord(&self, q: usize) -> Coord {
        self.coords[q]
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    /// Qubit mask of every surviving vertex inside the rectangles.
    pub fn rect_mask(&self, rects: &[Rect]) -> BitVec {
        let mut mask = BitVec::zeros(self.num_qubits());
        for r in rects {
            for y in r.y..(r.y + r.height).min(self.height) {
                for x in r.x..(r.x + r.width).min(self.width) {
                    if let Some(q) = self.qubit(Coord::new(x, y)) {
                        mask.set(q, true);
                    }
                }
            }
        }
        mask
    }

    /// Builds an operator from coordinates; fails on deleted or out-of-range vertices.
    pub fn operator(&self, terms: impl IntoIterator<Item = (Coord, Pauli)>) -> Result<PauliOp> {
        let mut op = PauliOp::identity(self.num_qubits());
        for (c, p) in terms {
            let q = self.qubit(c).ok_or(Error::MissingQubit(c))?;
            op.set(q, p);
        }
        Ok(op)
    }

    /// Number of independent local terms.
    pub fn local_rank(&self) -> usize {
        let mut ech = Echelon::new(2 * self.num_qubits());
        for g in &self.generators {
            ech.insert(g.op.symplectic_row());
        }
        ech.rank()
    }

    /// Logical qubits left free by the local terms: `n − rank`.
    pub fn logical_qubit_count(&self) -> usize {
        self.num_qubits() - self.local_rank()
    }

    /// Errors unless `op` commutes with every local term.
    pub fn check_logical(&self, label: &str, op: &PauliOp) -> Result<()> {
        if op.num_qubits() != self.num_qubits() {
            return Err(Error::Dimension { expected: self.num_qubits(), found: op.num_qubits() });
        }
        match self.generators.iter().find(|g| g.op.anticommutes(op)) {
            Some(g) => Err(Error::InvalidLogical { label: label.to_string(), generator: g.label() }),
            None => Ok(()),
        }
    }

    /// Local terms anticommuting with `op`, i.e. where `op` creates excitations.
    pub fn syndrome(&self, op: &PauliOp) -> Vec<usize> {
        (0..self.generators.len()).filter(|&i| self.generators[i].op.anticommutes(op)).collect()
    }

    /// The unique (up to local terms) non-trivial logical operator supported
    /// inside `corridor`.
    pub fn logical_in_corridor(&self, label: &str, corridor: &BitVec) -> Result<PauliOp> {
        let n = self.num_qubits();
        let qubits: Vec<usize> = corridor.iter_ones().collect();
        let m = qubits.len();
        let chain_err = |reason: String| Error::LogicalChain { label: label.to_string(), reason };
        if m == 0 {
            return Err(chain_err("empty corridor".into()));
        }
        // constraint ω(g, v) = 0 on the corridor variables (v_x | v_z)
        let mut ech = Echelon::new(2 * m);
        for g in &self.generators {
            if !g.op.support().intersects(corridor) {
                continue;
            }
            let mut row = BitVec::zeros(2 * m);
            for (k, &q) in qubits.iter().enumerate() {
                row.set(k, g.op.z_bits().get(q));
                row.set(m + k, g.op.x_bits().get(q));
            }
            ech.insert(row);
        }
        let embed = |v: &BitVec| {
            let mut op = PauliOp::identity(n);
            for (k, &q) in qubits.iter().enumerate() {
                op.set(q, Pauli::from_bits(v.get(k), v.get(m + k)));
            }
            op
        };
        let mut group = Echelon::new(2 * n);
        for g in &self.generators {
            group.insert(g.op.symplectic_row());
        }
        let base = group.rank();
        let mut candidates = Vec::new();
        for v in ech.nullspace() {
            let op = embed(&v);
            if group.insert(op.symplectic_row()) {
                candidates.push(op);
            }
        }
        match group.rank() - base {
            0 => Err(chain_err("corridor supports no non-trivial logical operator".into())),
            1 => Ok(candidates.into_iter().next().expect("one candidate")),
            k => Err(chain_err(format!("corridor supports {k} independent logical operators; narrow it"))),
        }
    }

    /// Dyon chain between two twists, searched inside the bounding box of
    /// their terms grown by `margin`.
    pub fn chain_between_twists(&self, label: &str, a: usize, b: usize, margin: usize) -> Result<PauliOp> {
        let count = self.twists.len();
        let bad = |i: usize| Error::LogicalChain { label: label.to_string(), reason: format!("no twist {i} ({count} twists)") };
        let ta = self.twists.get(a).ok_or_else(|| bad(a))?;
        let tb = self.twists.get(b).ok_or_else(|| bad(b))?;
        let support = self.generators[ta.generator].op.support().or(&self.generators[tb.generator].op.support());
        let pts: Vec<Coord> = support.iter_ones().map(|q| self.coords[q]).collect();
        let x0 = pts.iter().map(|c| c.x).min().unwrap_or(0).saturating_sub(margin);
        let y0 = pts.iter().map(|c| c.y).min().unwrap_or(0).saturating_sub(margin);
        let x1 = (pts.iter().map(|c| c.x).max().unwrap_or(0) + margin).min(self.width - 1);
        let y1 = (pts.iter().map(|c| c.y).max().unwrap_or(0) + margin).min(self.height - 1);
        let mask = self.rect_mask(&[Rect::new(x0, y0, x1 - x0 + 1, y1 - y0 + 1)]);
        self.logical_in_corridor(label, &mask)
    }

    /// Pauli operator supported on `support` that anticommutes with exactly
    /// the local terms listed in `endpoints`, if one exists.
    pub fn open_string(&self, support: &BitVec, endpoints: &[usize]) -> Option<PauliOp> {
        let n = self.num_qubits();
        let qubits: Vec<usize> = support.iter_ones().collect();
        let m = qubits.len();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for (i, g) in self.generators.iter().enumerate() {
            let touches = g.op.support().intersects(support);
            let wanted = endpoints.contains(&i);
            if !touches {
                if wanted {
                    return None;
                }
                continue;
            }
            let mut row = BitVec::zeros(2 * m);
            for (k, &q) in qubits.iter().enumerate() {
                row.set(k, g.op.z_bits().get(q));
                row.set(m + k, g.op.x_bits().get(q));
            }
            rows.push(row);
            rhs.push(wanted);
        }
        let v = solve_system(2 * m, &rows, &BitVec::from_bools(&rhs))?;
        let mut op = PauliOp::identity(n);
        for (k, &q) in qubits.iter().enumerate() {
            op.set(q, Pauli::from_bits(v.get(k), v.get(m + k)));
        }
        Some(op)
    }

    /// Transports a single excitation across dislocation `d`.
    ///
    /// The source is a term anchored four rows below the wall in the middle
    /// column. Every term anchored two or three rows above the wall whose
    /// pairing with the source is realised by a string inside a narrow
    /// vertical corridor is recorded, with its checkerboard colour.
    pub fn domain_wall_transmutation(&self, d: usize) -> Result<Transmutation> {
        let spec = *self
            .dislocations
            .get(d)
            .ok_or_else(|| Error::Spec(format!("no dislocation {d} ({} present)", self.dislocations.len())))?;
        let r = spec.row;
        if r < 4 || r + 5 > self.height || spec.end - spec.start < 3 {
            return Err(Error::Geometry(format!(
                "dislocation {d} needs four rows of room on each side and at least four columns"
            )));
        }
        let mid = (spec.start + spec.end) / 2;
        let corridor = self.rect_mask(&[Rect::new(mid - 1, r - 4, 4, 9)]);
        let source = self
            .generator_at(Coord::new(mid, r - 4))
            .ok_or_else(|| Error::Consistency(format!("no term anchored at ({mid},{})", r - 4)))?;
        let mut reachable = Vec::new();
        for y in r + 2..=r + 3 {
            for x in mid - 1..=mid + 1 {
                let Some(target) = self.generator_at(Coord::new(x, y)) else { continue };
                if !self.generators[target].op.support().is_subset_of(&corridor) {
                    continue;
                }
                if self.open_string(&corridor, &[source, target]).is_some() {
                    reachable.push((target, self.generators[target].color()));
                }
            }
        }
        Ok(Transmutation { source, source_color: self.generators[source].color(), reachable })
    }

    /// Index of the local term anchored at `anchor`, if any.
    pub fn generator_at(&self, anchor: Coord) -> Option<usize> {
        self.generators.iter().position(|g| g.anchor == anchor)
    }

    /// Sparse, coordinate-labelled rendering such as `X(3,4) Y(4,4)`.
    pub fn describe(&self, op: &PauliOp) -> String {
        let mut s = String::new();
        if op.sign() == Some(Sign::Minus) {
            s.push('-');
        }
        let mut terms: Vec<(Coord, Pauli)> = op.sparse_terms().into_iter().map(|(q, p)| (self.coords[q], p)).collect();
        terms.sort_by_key(|(c, _)| (c.y, c.x));
        for (i, (c, p)) in terms.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{}({},{})", p.symbol(), c.x, c.y);
        }
        if terms.is_empty() {
            s.push('I');
        }
        s
    }

    /// Plain-text export: `#` header lines with the qubit layout, then one
    /// signed Pauli string per generator.
    pub fn export_text(&self, state: Option<&StabilizerState>) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# twistee lattice {}x{}", self.width, self.height);
        let _ = writeln!(out, "# qubits {}", self.num_qubits());
        for d in &self.dislocations {
            let _ = writeln!(out, "# dislocation row {} columns {}..={}", d.row, d.start, d.end);
        }
        for (q, c) in self.coords.iter().enumerate() {
            let _ = writeln!(out, "# qubit {q} {} {}", c.x, c.y);
        }
        match state {
            None => {
                for g in &self.generators {
                    let _ = writeln!(out, "# gen {}", g.label());
                }
                for g in &self.generators {
                    let _ = writeln!(out, "{}", g.op);
                }
            }
            Some(st) => {
                for (i, _) in st.local.iter().enumerate() {
                    let _ = writeln!(out, "# gen {}", self.generators[i].label());
                }
                for l in &st.logicals {
                    let _ = writeln!(out, "# gen logical:{}", l.label);
                }
                for op in st.local.iter().chain(st.logicals.iter().map(|l| &l.op)) {
                    let _ = writeln!(out, "{op}");
                }
            }
        }
        out
    }
}

/// Outcome of [`DefectLattice::domain_wall_transmutation`].
#[derive(Clone, Debug)]
pub struct Transmutation {
    pub source: usize,
    pub source_color: u8,
    /// Far-side terms joined to the source by a string, with their colours.
    pub reachable: Vec<(usize, u8)>,
}

impl Transmutation {
    /// True when the string arrives, and only on the opposite colour.
    pub fn flips(&self) -> bool {
        !self.reachable.is_empty() && self.reachable.iter().all(|&(_, c)| c != self.source_color)
    }

    /// True when the string arrives, and only on the source colour.
    pub fn preserves(&self) -> bool {
        !self.reachable.is_empty() && self.reachable.iter().all(|&(_, c)| c == self.source_color)
    }
}

fn validate_dislocations(width: usize, height: usize, dislocations: &[DislocationSpec]) -> Result<()> {
    let mut used = vec![None::<usize>; width * height];
    for (i, d) in dislocations.iter().enumerate() {
        if d.start > d.end {
            return Err(Error::Spec(format!("dislocation {i}: start {} > end {}", d.start, d.end)));
        }
        if d.row < 1 || d.row + 2 > height {
            return Err(Error::Spec(format!("dislocation {i}: row {} must lie in 1..={}", d.row, height - 2)));
        }
        if d.start < 1 || d.end + 2 > width {
            return Err(Error::Spec(format!(
                "dislocation {i}: columns {}..={} must lie in 1..={} (no wrapping)",
                d.start,
                d.end,
                width - 2
            )));
        }
        for (x, y) in d.parents() {
            if let Some(j) = used[y * width + x] {
                return Err(Error::Spec(format!("dislocations {j} and {i} overlap near ({x},{y})")));
            }
            used[y * width + x] = Some(i);
        }
    }
    Ok(())
}

/// Which logical operators to fix when completing to a pure state.
#[derive(Clone, Debug, Default)]
pub enum LogicalState {
    #[default]
    Auto,
    Chains(Vec<ChainSpec>),
}

#[derive(Clone, Debug)]
pub struct ChainSpec {
    pub label: String,
    pub route: ChainRoute,
    pub sign: Sign,
}

#[derive(Clone, Debug)]
pub enum ChainRoute {
    /// Chain between twists `between[0]` and `between[1]`.
    Twists { between: [usize; 2], margin: usize },
    /// The built-in chain joining the two ends of dislocation `d`.
    Dislocation(usize),
    /// Unique logical class supported in a union of rectangles.
    Corridor(Vec<Rect>),
    /// Explicit Pauli factors.
    Explicit(Vec<(Coord, Pauli)>),
}

impl ChainSpec {
    pub fn resolve(&self, lattice: &DefectLattice) -> Result<PauliOp> {
        let op = match &self.route {
            ChainRoute::Twists { between, margin } => {
                lattice.chain_between_twists(&self.label, between[0], between[1], *margin)?
            }
            ChainRoute::Dislocation(d) => lattice
                .dyon_chains
                .get(*d)
                .map(|c| c.op.clone())
                .ok_or_else(|| Error::LogicalChain { label: self.label.clone(), reason: format!("no dislocation {d}") })?,
            ChainRoute::Corridor(rects) => lattice.logical_in_corridor(&self.label, &lattice.rect_mask(rects))?,
            ChainRoute::Explicit(terms) => lattice.operator(terms.iter().copied())?,
        };
        lattice.check_logical(&self.label, &op)?;
        Ok(op.with_sign(self.sign))
    }
}

/// A pure stabilizer state on a lattice: every local term, the logical
/// operators fixed on top of them, and an independent presentation.
#[derive(Clone, Debug)]
pub struct StabilizerState {
    /// Local terms with their current signs, in lattice order (may be dependent).
    pub local: Vec<PauliOp>,
    pub logicals: Vec<NamedOperator>,
    generators: GeneratorSet,
}

impl StabilizerState {
    pub fn generators(&self) -> &GeneratorSet {
        &self.generators
    }

    pub fn num_qubits(&self) -> usize {
        self.generators.num_qubits()
    }

    /// Flips every generator anticommuting with `string`; bit content is unchanged.
    pub fn apply_anyon_pair(&self, string: &PauliOp) -> Result<Self> {
        if string.num_qubits() != self.num_qubits() {
            return Err(Error::Dimension { expected: self.num_qubits(), found: string.num_qubits() });
        }
        let mut out = self.clone();
        for op in out.local.iter_mut().chain(out.logicals.iter_mut().map(|l| &mut l.op)) {
            if op.anticommutes(string) {
                op.negate();
            }
        }
        out.generators.conjugate_signs(string);
        Ok(out)
    }
}

/// Free-function form of [`StabilizerState::apply_anyon_pair`] on a bare presentation.
pub fn apply_anyon_pair(state: &GeneratorSet, string: &PauliOp) -> Result<GeneratorSet> {
    if string.num_qubits() != state.num_qubits() {
        return Err(Error::Dimension { expected: state.num_qubits(), found: string.num_qubits() });
    }
    let mut out = state.clone();
    out.conjugate_signs(string);
    Ok(out)
}

/// Completes the local terms to a pure state. Requested chains are fixed
/// first (with their signs); any remaining logical qubits take the torus
/// loops when they fit, then arbitrary commuting centralizer elements.
pub fn complete_to_pure_state(lattice: &DefectLattice, logical_state: &LogicalState) -> Result<StabilizerState> {
    let n = lattice.num_qubits();
    let local = lattice.local_ops();
    let mut group = Echelon::new(2 * n);
    let mut rows = Vec::with_capacity(n);
    for op in &local {
        if group.insert(op.symplectic_row()) {
            rows.push(op.clone());
        }
    }

    let mut logicals: Vec<NamedOperator> = Vec::new();
    if let LogicalState::Chains(chains) = logical_state {
        for spec in chains {
            let op = spec.resolve(lattice)?;
            if let Some(prev) = logicals.iter().find(|l| l.op.anticommutes(&op)) {
                return Err(Error::InvalidLogical { label: spec.label.clone(), generator: format!("logical `{}`", prev.label) });
            }
            if !group.insert(op.symplectic_row()) {
                return Err(Error::LogicalChain {
                    label: spec.label.clone(),
                    reason: "already fixed by the local terms or earlier chains".into(),
                });
            }
            logicals.push(NamedOperator { label: spec.label.clone(), op });
        }
    }
    for t in lattice.torus_logicals() {
        if logicals.iter().all(|l| l.op.commutes_with(&t.op)) && group.insert(t.op.symplectic_row()) {
            logicals.push(t.clone());
        }
    }
    rows.extend(logicals.iter().map(|l| l.op.clone()));
    let fixed = rows.len();
    let set = symplectic_completion(n, rows)?;
    let mut rows = set.into_rows();
    for (k, op) in rows[fixed..].iter().enumerate() {
        logicals.push(NamedOperator { label: format!("auto{k}"), op: op.clone() });
    }
    // the completion only ever appends, so `rows` is independent locals followed by logicals
    let generators = GeneratorSet::new_unchecked(n, std::mem::take(&mut rows));
    debug_assert_eq!(generators.matrix().rank(), n);
    Ok(StabilizerState { local, logicals, generators })
}

/// Commuting operators spanning the logical algebra modulo the local terms.
pub fn logical_basis(lattice: &DefectLattice) -> Vec<PauliOp> {
    let n = lattice.num_qubits();
    let local = lattice.local_ops();
    let mut group = Echelon::new(2 * n);
    for op in &local {
        group.insert(op.symplectic_row());
    }
    centralizer_basis(n, &local)
        .into_iter()
        .filter(|v| group.insert(v.clone()))
        .map(|v| PauliOp::from_symplectic(&v))
        .collect()
}

/// Horizontal dyon string: `Y` on row `y` from column `from` to `to` inclusive.
pub fn dyon_string_row(lattice: &DefectLattice, y: usize, from: usize, to: usize) -> Result<PauliOp> {
    lattice.operator((from.min(to)..=from.max(to)).map(|x| (Coord::new(x, y), Pauli::Y)))
}

/// Vertical dyon string: `Y` on column `x` from row `from` to `to` inclusive.
pub fn dyon_string_col(lattice: &DefectLattice, x: usize, from: usize, to: usize) -> Result<PauliOp> {
    lattice.operator((from.min(to)..=from.max(to)).map(|y| (Coord::new(x, y), Pauli::Y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::rank_of;

    fn all_commute(ops: &[PauliOp]) -> bool {
        first_anticommuting_pair(ops).is_none()
    }

    #[test]
    fn plain_4x4_has_two_relations() {
        let lat = build_plain_lattice(4, 4).unwrap();
        assert_eq!(lat.num_qubits(), 16);
        assert_eq!(lat.generators().len(), 16);
        assert_eq!(lat.local_rank(), 14);
        assert_eq!(lat.logical_qubit_count(), 2);
        assert!(all_commute(&lat.local_ops()));
    }

    #[test]
    fn plaquette_pattern() {
        let lat = build_plain_lattice(4, 4).unwrap();
        let g = &lat.generators()[lat.generator_at(Coord::new(3, 3)).unwrap()];
        assert_eq!(lat.describe(&g.op), "X(0,0) Z(3,0) Z(0,3) X(3,3)");
    }

    #[test]
    fn odd_or_small_dimensions_rejected() {
        assert!(matches!(build_plain_lattice(5, 4), Err(Error::Spec(_))));
        assert!(matches!(build_plain_lattice(2, 4), Err(Error::Spec(_))));
    }

    #[test]
    fn overlapping_or_wrapping_dislocations_rejected() {
        let lat = build_plain_lattice(12, 12).unwrap();
        let lat = insert_dislocation(lat, DislocationSpec::new(5, 3, 6)).unwrap();
        assert!(insert_dislocation(lat.clone(), DislocationSpec::new(6, 5, 8)).is_err());
        assert!(insert_dislocation(lat.clone(), DislocationSpec::new(9, 0, 4)).is_err());
        assert!(insert_dislocation(lat.clone(), DislocationSpec::new(9, 4, 3)).is_err());
        assert!(insert_dislocation(lat, DislocationSpec::new(8, 3, 6)).is_ok());
    }

    #[test]
    fn single_dislocation_on_8x8() {
        let lat = DefectLattice::build(8, 8, &[DislocationSpec::new(4, 3, 5)]).unwrap();
        assert_eq!(lat.num_qubits(), 64 - 3);
        let twists: Vec<_> = lat.generators().iter().filter(|g| g.kind == GeneratorKind::Twist).collect();
        assert_eq!(twists.len(), 2);
        for t in &twists {
            assert_eq!(t.op.weight(), 5);
            assert_eq!(t.op.count_y(), 1);
        }
        assert_eq!(lat.twists()[0].site, Coord::new(2, 4));
        assert_eq!(lat.twists()[1].site, Coord::new(6, 4));
        let left = &lat.generators()[lat.twists()[0].generator];
        assert_eq!(lat.describe(&left.op), "X(2,3) Z(3,3) Y(2,4) Z(2,5) X(3,5)");
        assert!(all_commute(&lat.local_ops()));
        // the twist breaks the checkerboard relation: only one relation survives
        assert_eq!(lat.num_qubits() - lat.local_rank(), 2);
    }

    #[test]
    fn merged_terms_are_four_body_across_the_gap() {
        let lat = DefectLattice::build(8, 8, &[DislocationSpec::new(4, 3, 5)]).unwrap();
        let merged: Vec<_> = lat.generators().iter().filter(|g| g.kind == GeneratorKind::Merged).collect();
        assert_eq!(merged.len(), 2);
        assert_eq!(lat.describe(&merged[0].op), "X(3,3) Z(4,3) Z(3,5) X(4,5)");
    }

    #[test]
    fn dislocation_chain_commutes_and_anchors_on_twists() {
        let lat = DefectLattice::build(10, 10, &[DislocationSpec::new(5, 3, 5)]).unwrap();
        let chain = &lat.dyon_chains()[0];
        assert!(lat.syndrome(&chain.op).is_empty());
        let sites: Vec<usize> = lat.twists().iter().map(|t| lat.qubit(t.site).unwrap()).collect();
        for q in sites {
            assert!(chain.op.support().get(q));
        }
    }

    #[test]
    fn logical_count_grows_by_one_per_extra_dislocation() {
        let one = DefectLattice::build(12, 12, &[DislocationSpec::new(3, 3, 7)]).unwrap();
        let two = DefectLattice::build(12, 12, &[DislocationSpec::new(3, 3, 7), DislocationSpec::new(8, 3, 7)]).unwrap();
        assert_eq!(one.logical_qubit_count(), 2);
        assert_eq!(two.logical_qubit_count(), 3);
    }

    #[test]
    fn plain_completion_with_torus_loops() {
        let lat = build_plain_lattice(4, 4).unwrap();
        let st = complete_to_pure_state(&lat, &LogicalState::Auto).unwrap();
        assert_eq!(st.generators().len(), 16);
        assert_eq!(st.generators().matrix().rank(), 16);
        assert_eq!(st.logicals.len(), 2);
        assert!(st.logicals.iter().all(|l| l.label.contains("loop")));
        assert!(all_commute(st.generators().rows()));
    }

    #[test]
    fn chain_anticommuting_with_a_term_names_it() {
        let lat = build_plain_lattice(6, 6).unwrap();
        let spec = ChainSpec {
            label: "bad".into(),
            route: ChainRoute::Explicit(vec![(Coord::new(2, 2), Pauli::Z)]),
            sign: Sign::Plus,
        };
        let err = complete_to_pure_state(&lat, &LogicalState::Chains(vec![spec])).unwrap_err();
        match err {
            Error::InvalidLogical { label, generator } => {
                assert_eq!(label, "bad");
                assert!(generator.starts_with("plaquette("));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn corridor_search_finds_unique_chain() {
        let lat = DefectLattice::build(16, 16, &[DislocationSpec::new(6, 6, 12), DislocationSpec::new(10, 6, 12)]).unwrap();
        let z = lat.chain_between_twists("Z", 0, 2, 0).unwrap();
        assert!(lat.syndrome(&z).is_empty());
        let x = lat.dyon_chains()[0].op.clone();
        assert!(x.anticommutes(&z));
        // generic logical basis spans the same number of qubits
        assert_eq!(logical_basis(&lat).len(), 2 * lat.logical_qubit_count());
    }

    #[test]
    fn string_changes_type_across_the_wall() {
        let wall = DefectLattice::build(16, 16, &[DislocationSpec::new(8, 4, 11)]).unwrap();
        let t = wall.domain_wall_transmutation(0).unwrap();
        assert!(t.flips(), "{t:?}");
        // the same corridor without a wall keeps the type
        let mut plain = build_plain_lattice(16, 16).unwrap();
        plain.dislocations.push(DislocationSpec::new(8, 4, 11));
        let t = plain.domain_wall_transmutation(0).unwrap();
        assert!(t.preserves(), "{t:?}");
    }

    #[test]
    fn closed_patch_product_lives_on_its_rim() {
        let lat = build_plain_lattice(6, 6).unwrap();
        let mut prod = PauliOp::identity(36);
        for x in 1..4 {
            for y in 1..4 {
                prod.mul_assign_right(&lat.generators()[lat.generator_at(Coord::new(x, y)).unwrap()].op);
            }
        }
        // anchors 1..=3 cover vertices 1..=4; the inner 2x2 block cancels
        for x in 2..4 {
            for y in 2..4 {
                assert_eq!(prod.get(lat.qubit(Coord::new(x, y)).unwrap()), Pauli::I);
            }
        }
        assert!(prod.weight() > 0);
    }

    #[test]
    fn anyon_string_flips_signs_only() {
        let lat = build_plain_lattice(8, 8).unwrap();
        let st = complete_to_pure_state(&lat, &LogicalState::Auto).unwrap();
        let s = dyon_string_row(&lat, 3, 2, 5).unwrap();
        let flipped = st.apply_anyon_pair(&s).unwrap();
        let before = rank_of(128, st.generators().rows().iter().map(|r| r.symplectic_row()).collect::<Vec<_>>().iter());
        let after =
            rank_of(128, flipped.generators().rows().iter().map(|r| r.symplectic_row()).collect::<Vec<_>>().iter());
        assert_eq!(before, after);
        let changed = st.local.iter().zip(&flipped.local).filter(|(a, b)| a.sign() != b.sign()).count();
        // a dyon pair: two terms of each colour at the two ends
        assert_eq!(changed, 4);
        let empty = st.apply_anyon_pair(&PauliOp::identity(64)).unwrap();
        assert_eq!(empty.generators(), st.generators());
    }
}
