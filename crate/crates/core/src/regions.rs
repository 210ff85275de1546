//! Qubit regions, the three-sector disk and the three-arc annulus.

use serde::Serialize;

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::lattice::{Coord, DefectLattice, Rect};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    name: String,
    mask: BitVec,
    /// Connected components of the boundary, as built by the constructors.
    boundaries: usize,
}

impl Region {
    pub fn new(name: impl Into<String>, mask: BitVec, boundaries: usize) -> Self {
        Self { name: name.into(), mask, boundaries }
    }

    /// Union of rectangles. The caller states how many boundary components it has.
    pub fn from_rects(lattice: &DefectLattice, name: impl Into<String>, rects: &[Rect], boundaries: usize) -> Result<Self> {
        for r in rects {
            check_rect(lattice, r)?;
        }
        Ok(Self::new(name, lattice.rect_mask(rects), boundaries))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn mask(&self) -> &BitVec {
        &self.mask
    }

    pub fn boundaries(&self) -> usize {
        self.boundaries
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_zero()
    }

    pub fn contains(&self, q: usize) -> bool {
        self.mask.get(q)
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter_ones()
    }

    /// Disjoint union; the boundary count must be supplied since it is geometric.
    pub fn union(&self, other: &Region, name: impl Into<String>, boundaries: usize) -> Region {
        Region::new(name, self.mask.or(&other.mask), boundaries)
    }

    pub fn complement(&self, name: impl Into<String>) -> Region {
        Region::new(name, self.mask.not(), self.boundaries)
    }

    pub fn coords(&self, lattice: &DefectLattice) -> Vec<Coord> {
        self.qubits().map(|q| lattice.coord(q)).collect()
    }
}

fn check_rect(lattice: &DefectLattice, r: &Rect) -> Result<()> {
    if r.is_empty() {
        return Err(Error::Geometry(format!("rectangle at ({},{}) has zero area", r.x, r.y)));
    }
    if r.x + r.width > lattice.width() || r.y + r.height > lattice.height() {
        return Err(Error::Geometry(format!(
            "rectangle ({},{}) {}x{} leaves the {}x{} lattice",
            r.x,
            r.y,
            r.width,
            r.height,
            lattice.width(),
            lattice.height()
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionKind {
    Tripartite,
    Annular,
}

/// Labelled disjoint regions `A`, `B`, `C` (plus `D1`, `D2` when annular).
#[derive(Clone, Debug)]
pub struct RegionPartition {
    kind: PartitionKind,
    a: Region,
    b: Region,
    c: Region,
    inner: Option<Region>,
    outer: Option<Region>,
}

impl RegionPartition {
    pub fn kind(&self) -> PartitionKind {
        self.kind
    }

    pub fn a(&self) -> &Region {
        &self.a
    }

    pub fn b(&self) -> &Region {
        &self.b
    }

    pub fn c(&self) -> &Region {
        &self.c
    }

    pub fn d1(&self) -> Option<&Region> {
        self.inner.as_ref()
    }

    pub fn d2(&self) -> Option<&Region> {
        self.outer.as_ref()
    }

    pub fn get(&self, label: &str) -> Option<Region> {
        match label {
            "D1" => self.inner.clone(),
            "D2" => self.outer.clone(),
            _ => self.combination_regions().into_iter().find(|r| r.name() == label),
        }
    }

    /// `A, B, C, AB, BC, CA, ABC` in that order.
    pub fn combination_regions(&self) -> [Region; 7] {
        let annular = self.kind == PartitionKind::Annular;
        [
            self.a.clone(),
            self.b.clone(),
            self.c.clone(),
            self.a.union(&self.b, "AB", 1),
            self.b.union(&self.c, "BC", 1),
            self.c.union(&self.a, "CA", 1),
            Region::new("ABC", self.a.mask.or(&self.b.mask).or(&self.c.mask), if annular { 2 } else { 1 }),
        ]
    }

    pub fn labels(&self) -> Vec<&str> {
        let mut out = vec!["A", "B", "C"];
        if self.inner.is_some() {
            out.extend(["D1", "D2"]);
        }
        out
    }
}

/// Three sectors of the `width × height` block at `origin`: `C` is the lower
/// half, `A` and `B` split the upper half left and right. The three meet at
/// the centre of the block and their union is a disk.
pub fn make_tripartite(lattice: &DefectLattice, origin: Coord, width: usize, height: usize) -> Result<RegionPartition> {
    if width < 2 || height < 2 {
        return Err(Error::Geometry(format!("tripartite block {width}x{height} leaves an empty sector")));
    }
    let (half_w, half_h) = (width / 2, height / 2);
    let c = Rect::new(origin.x, origin.y, width, half_h);
    let a = Rect::new(origin.x, origin.y + half_h, half_w, height - half_h);
    let b = Rect::new(origin.x + half_w, origin.y + half_h, width - half_w, height - half_h);
    let partition = RegionPartition {
        kind: PartitionKind::Tripartite,
        a: Region::from_rects(lattice, "A", &[a], 1)?,
        b: Region::from_rects(lattice, "B", &[b], 1)?,
        c: Region::from_rects(lattice, "C", &[c], 1)?,
        inner: None,
        outer: None,
    };
    check_nonempty(&partition)?;
    check_twists(lattice, &partition)?;
    Ok(partition)
}

/// Annulus of the given thickness around `inner`. `A` is the top band; the
/// right band plus the right half of the bottom band is `B`; the left band
/// plus the left half of the bottom is `C`. `D1` is `inner`, `D2` everything
/// outside the annulus.
pub fn make_annulus(lattice: &DefectLattice, inner: Rect, thickness: usize) -> Result<RegionPartition> {
    if thickness < 1 {
        return Err(Error::Geometry("annulus thickness must be at least one plaquette".into()));
    }
    if inner.width < 2 || inner.height < 1 {
        return Err(Error::Geometry(format!("inner disk {}x{} is too small", inner.width, inner.height)));
    }
    if inner.x < thickness || inner.y < thickness {
        return Err(Error::Geometry(format!(
            "annulus around ({},{}) with thickness {thickness} leaves the lattice",
            inner.x, inner.y
        )));
    }
    let t = thickness;
    let (x0, y0, w, h) = (inner.x, inner.y, inner.width, inner.height);
    let split = x0 + w / 2;
    let a = vec![Rect::new(x0 - t, y0 + h, w + 2 * t, t)];
    let b = vec![Rect::new(x0 + w, y0, t, h), Rect::new(split, y0 - t, x0 + w + t - split, t)];
    let c = vec![Rect::new(x0 - t, y0, t, h), Rect::new(x0 - t, y0 - t, split - (x0 - t), t)];
    let d1 = Region::from_rects(lattice, "D1", &[inner], 1)?;
    let a = Region::from_rects(lattice, "A", &a, 1)?;
    let b = Region::from_rects(lattice, "B", &b, 1)?;
    let c = Region::from_rects(lattice, "C", &c, 1)?;
    let taken = d1.mask.or(&a.mask).or(&b.mask).or(&c.mask);
    let d2 = Region::new("D2", taken.not(), 1);
    let partition = RegionPartition { kind: PartitionKind::Annular, a, b, c, inner: Some(d1), outer: Some(d2) };
    check_nonempty(&partition)?;
    check_twists(lattice, &partition)?;

    let ring = &partition.combination_regions()[6];
    let crossing = crossing_generators(lattice, ring.mask());
    let d1_mask = partition.inner.as_ref().map(|r| r.mask().clone()).unwrap_or_else(|| BitVec::zeros(0));
    let d2_mask = partition.outer.as_ref().map(|r| r.mask().clone()).unwrap_or_else(|| BitVec::zeros(0));
    for &g in &crossing {
        let s = lattice.generators()[g].op.support();
        if s.intersects(&d1_mask) && s.intersects(&d2_mask) {
            return Err(Error::Geometry(format!(
                "{} crosses both annulus boundaries; thicken the annulus",
                lattice.generators()[g].label()
            )));
        }
    }
    Ok(partition)
}

fn check_nonempty(p: &RegionPartition) -> Result<()> {
    for r in [&p.a, &p.b, &p.c].into_iter().chain(p.inner.as_ref()) {
        if r.is_empty() {
            return Err(Error::Geometry(format!("region {} is empty", r.name())));
        }
    }
    Ok(())
}

/// Every twist term must sit wholly inside one labelled region or wholly
/// outside all of them.
fn check_twists(lattice: &DefectLattice, p: &RegionPartition) -> Result<()> {
    let labelled: Vec<&Region> = [&p.a, &p.b, &p.c].into_iter().chain(p.inner.as_ref()).collect();
    for t in lattice.twists() {
        let support = lattice.generators()[t.generator].op.support();
        let touched: Vec<&str> = labelled.iter().filter(|r| support.intersects(r.mask())).map(|r| r.name()).collect();
        let inside_one = labelled.iter().any(|r| support.is_subset_of(r.mask()));
        let clear = touched.is_empty();
        if !(inside_one || clear) {
            return Err(Error::Geometry(format!(
                "twist at ({},{}) straddles region boundary (touches {})",
                t.site.x,
                t.site.y,
                if touched.is_empty() { "exterior".to_string() } else { touched.join(", ") }
            )));
        }
    }
    Ok(())
}

/// Indices of local terms with support on both sides of the cut.
pub fn crossing_generators(lattice: &DefectLattice, mask: &BitVec) -> Vec<usize> {
    let outside = mask.not();
    lattice
        .generators()
        .iter()
        .enumerate()
        .filter(|(_, g)| {
            let s = g.op.support();
            s.intersects(mask) && s.intersects(&outside)
        })
        .map(|(i, _)| i)
        .collect()
}

/// Number of local terms cut by the region boundary.
pub fn boundary_length(lattice: &DefectLattice, mask: &BitVec) -> usize {
    crossing_generators(lattice, mask).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_plain_lattice, DislocationSpec};

    #[test]
    fn single_qubit_cuts_four_plaquettes() {
        let lat = build_plain_lattice(6, 6).unwrap();
        let r = Region::from_rects(&lat, "q", &[Rect::new(2, 2, 1, 1)], 1).unwrap();
        assert_eq!(boundary_length(&lat, r.mask()), 4);
        assert_eq!(boundary_length(&lat, &BitVec::ones(36)), 0);
    }

    #[test]
    fn boundary_length_of_complement_matches() {
        let lat = build_plain_lattice(10, 10).unwrap();
        let r = Region::from_rects(&lat, "r", &[Rect::new(1, 2, 4, 3), Rect::new(5, 2, 2, 5)], 1).unwrap();
        assert_eq!(boundary_length(&lat, r.mask()), boundary_length(&lat, &r.mask().not()));
    }

    #[test]
    fn tripartite_sectors_are_disjoint_and_cover_the_block() {
        let lat = build_plain_lattice(12, 12).unwrap();
        let p = make_tripartite(&lat, Coord::new(3, 3), 6, 6).unwrap();
        let regs = p.combination_regions();
        assert_eq!(regs[0].len() + regs[1].len() + regs[2].len(), 36);
        assert_eq!(regs[3].len(), regs[0].len() + regs[1].len());
        assert_eq!(regs[6].len(), 36);
        assert!(!regs[0].mask().intersects(regs[1].mask()));
    }

    #[test]
    fn degenerate_sector_rejected() {
        let lat = build_plain_lattice(12, 12).unwrap();
        assert!(matches!(make_tripartite(&lat, Coord::new(3, 3), 1, 6), Err(Error::Geometry(_))));
        assert!(matches!(make_tripartite(&lat, Coord::new(9, 3), 6, 6), Err(Error::Geometry(_))));
    }

    #[test]
    fn annulus_on_16x16() {
        let lat = build_plain_lattice(16, 16).unwrap();
        let p = make_annulus(&lat, Rect::new(6, 6, 4, 4), 2).unwrap();
        assert_eq!(p.d1().unwrap().len(), 16);
        let ring = &p.combination_regions()[6];
        assert_eq!(ring.len(), 8 * 8 - 16);
        assert_eq!(p.d2().unwrap().len(), 256 - 64);
        assert!(matches!(make_annulus(&lat, Rect::new(6, 6, 4, 4), 0), Err(Error::Geometry(_))));
    }

    #[test]
    fn straddling_twist_rejected() {
        let lat = crate::lattice::DefectLattice::build(16, 16, &[DislocationSpec::new(8, 5, 12)]).unwrap();
        // left twist term spans columns 4..5, rows 7..9
        assert!(make_tripartite(&lat, Coord::new(5, 4), 6, 6).is_err());
        let p = make_tripartite(&lat, Coord::new(3, 4), 6, 6).unwrap();
        let twist = lat.generators()[lat.twists()[0].generator].op.support();
        assert!(twist.is_subset_of(p.a().mask()));
    }
}
