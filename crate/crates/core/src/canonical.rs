//! Canonical generator sets for a cut: every generator crossing the cut is
//! rewritten so that its restriction to the region anticommutes with at most
//! one other restriction. Counting the anticommuting pairs gives the entropy
//! independently of the rank formula.
//!
//! The crossing local terms of a smooth cut form closed chains under local
//! anticommutation, one chain per boundary component. For each chain
//! `W_1 … W_L` the product of all terms is locally central, and so is the
//! product of the even-indexed terms when `L` is even. Those products replace
//! `W_1` (and `W_L`); the rest are paired as `K_{2j} = W_{2j}` and
//! `K_{2j+1} = ∏ W_i` over odd `i ≥ 2j+1`.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::gf2::Echelon;
use crate::lattice::{DefectLattice, StabilizerState};
use crate::pauli::PauliOp;

/// A stabilizer element with a human-readable provenance.
#[derive(Clone, Debug)]
pub struct CanonicalTerm {
    pub op: PauliOp,
    pub origin: String,
}

impl CanonicalTerm {
    pub fn new(op: PauliOp, origin: impl Into<String>) -> Self {
        Self { op, origin: origin.into() }
    }
}

#[derive(Clone, Debug, Default)]
pub struct CanonicalDecomposition {
    pub inside: Vec<CanonicalTerm>,
    pub outside: Vec<CanonicalTerm>,
    /// Crossing elements whose restrictions anticommute in pairs.
    pub pairs: Vec<(CanonicalTerm, CanonicalTerm)>,
    /// Crossing elements whose restriction commutes with every other restriction.
    pub commuting: Vec<CanonicalTerm>,
    /// Lengths of the closed chains of crossing local terms.
    pub chains: Vec<usize>,
    /// Logical operators moved off the cut, and those that could not be.
    pub deformed: Vec<String>,
    pub undeformable: Vec<String>,
    pub warnings: Vec<String>,
}

impl CanonicalDecomposition {
    /// Number of locally anticommuting pairs: the entropy of the cut in bits.
    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    /// One line per element: role, provenance and the full Pauli string.
    pub fn dump(&self) -> String {
        self.render(|op| op.to_string())
    }

    /// Like [`dump`](Self::dump) with lattice coordinates instead of dense strings.
    pub fn dump_with(&self, lattice: &DefectLattice) -> String {
        self.render(|op| lattice.describe(op))
    }

    fn render(&self, show: impl Fn(&PauliOp) -> String) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# chains {:?}", self.chains);
        let _ = writeln!(out, "# pairs {}", self.pairs.len());
        for (k, (a, b)) in self.pairs.iter().enumerate() {
            let _ = writeln!(out, "pair {k}a\t{}\t{}", a.origin, show(&a.op));
            let _ = writeln!(out, "pair {k}b\t{}\t{}", b.origin, show(&b.op));
        }
        for t in &self.commuting {
            let _ = writeln!(out, "central\t{}\t{}", t.origin, show(&t.op));
        }
        for t in &self.inside {
            let _ = writeln!(out, "inside\t{}\t{}", t.origin, show(&t.op));
        }
        for t in &self.outside {
            let _ = writeln!(out, "outside\t{}\t{}", t.origin, show(&t.op));
        }
        out
    }
}

/// Local terms and fixed logicals of a lattice state, labelled for dumps.
pub fn labelled_terms(lattice: &DefectLattice, state: &StabilizerState) -> (Vec<CanonicalTerm>, Vec<CanonicalTerm>) {
    let local = state
        .local
        .iter()
        .zip(lattice.generators())
        .map(|(op, g)| CanonicalTerm::new(op.clone(), g.label()))
        .collect();
    let logicals = state.logicals.iter().map(|l| CanonicalTerm::new(l.op.clone(), l.label.clone())).collect();
    (local, logicals)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Shape {
    SingleBoundary,
    Annulus,
}

/// Canonical form for a cut with one boundary component.
pub fn canonicalize_single_boundary(
    local: &[CanonicalTerm],
    logicals: &[CanonicalTerm],
    region: &BitVec,
) -> Result<CanonicalDecomposition> {
    Canonicalizer::new(local, logicals, region)?.run(Shape::SingleBoundary, None)
}

/// Canonical form for an annular cut. `crossing` names a logical expected to
/// be pinned to the annulus; a warning is recorded if it deforms away.
pub fn canonicalize_annulus(
    local: &[CanonicalTerm],
    logicals: &[CanonicalTerm],
    region: &BitVec,
    crossing: Option<&str>,
) -> Result<CanonicalDecomposition> {
    Canonicalizer::new(local, logicals, region)?.run(Shape::Annulus, crossing)
}

struct Canonicalizer<'a> {
    n: usize,
    region: &'a BitVec,
    outside_mask: BitVec,
    local: &'a [CanonicalTerm],
    logicals: &'a [CanonicalTerm],
}

#[derive(PartialEq, Eq)]
enum Side {
    Inside,
    Outside,
    Crossing,
}

impl<'a> Canonicalizer<'a> {
    fn new(local: &'a [CanonicalTerm], logicals: &'a [CanonicalTerm], region: &'a BitVec) -> Result<Self> {
        let n = region.len();
        for t in local.iter().chain(logicals) {
            if t.op.num_qubits() != n {
                return Err(Error::Dimension { expected: n, found: t.op.num_qubits() });
            }
        }
        Ok(Self { n, region, outside_mask: region.not(), local, logicals })
    }

    fn side(&self, op: &PauliOp) -> Side {
        let s = op.support();
        match (s.intersects(self.region), s.intersects(&self.outside_mask)) {
            (true, true) => Side::Crossing,
            (true, false) => Side::Inside,
            _ => Side::Outside,
        }
    }

    fn local_anticommute(&self, a: &PauliOp, b: &PauliOp) -> bool {
        a.restrict(self.region).anticommutes(&b.restrict(self.region))
    }

    fn run(&self, shape: Shape, crossing_label: Option<&str>) -> Result<CanonicalDecomposition> {
        let mut out = CanonicalDecomposition::default();
        let mut crossing = Vec::new();
        for t in self.local {
            match self.side(&t.op) {
                Side::Inside => out.inside.push(t.clone()),
                Side::Outside => out.outside.push(t.clone()),
                Side::Crossing => crossing.push(t.clone()),
            }
        }

        let extras = self.deform_logicals(&mut out)?;
        if let Some(label) = crossing_label {
            if out.deformed.iter().any(|d| d == label) {
                out.warnings.push(format!("logical `{label}` deforms off the cut; its deformed form is used"));
            }
        }

        let (chains, loose) = self.chains(&crossing)?;
        out.chains = chains.iter().map(Vec::len).collect();
        match shape {
            Shape::SingleBoundary if chains.len() > 1 => {
                return Err(Error::Geometry(format!("expected one boundary chain, found {}", chains.len())));
            }
            Shape::Annulus if chains.len() != 2 => {
                return Err(Error::Geometry(format!("an annulus needs two boundary chains, found {}", chains.len())));
            }
            _ => {}
        }

        let inside_solver = self.inside_solver(&out.inside);
        if extras.is_empty() {
            for (c, chain) in chains.iter().enumerate() {
                self.pair_chain(c + 1, chain, &inside_solver, &mut out);
            }
            self.pair_loose(loose, &mut out);
        } else {
            let pool = self.replace_with_logicals(&chains, &extras, &inside_solver, &mut out)?;
            let pool = pool.into_iter().chain(loose).chain(extras).collect();
            self.gram_schmidt(pool, &mut out);
        }
        self.verify(&out)?;
        Ok(out)
    }

    /// Multiplies each crossing logical by local terms (and the other
    /// logicals) so it lies off the cut, or wholly inside it. Returns the ones
    /// for which neither solve succeeds.
    fn deform_logicals(&self, out: &mut CanonicalDecomposition) -> Result<Vec<CanonicalTerm>> {
        let mut current: Vec<CanonicalTerm> = self.logicals.to_vec();
        let mut extras = Vec::new();
        for i in 0..current.len() {
            let target = current[i].clone();
            match self.side(&target.op) {
                Side::Inside => {
                    out.inside.push(target);
                    continue;
                }
                Side::Outside => {
                    out.outside.push(target);
                    continue;
                }
                Side::Crossing => {}
            }
            let helpers: Vec<&PauliOp> = self
                .local
                .iter()
                .map(|t| &t.op)
                .chain(current.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, t)| &t.op))
                .collect();
            let mut placed = false;
            for (mask, to_outside) in [(self.region, true), (&self.outside_mask, false)] {
                if let Some(op) = solve_cancel(self.n, &helpers, &target.op, mask) {
                    let term = CanonicalTerm::new(op, format!("{}~", target.origin));
                    current[i] = term.clone();
                    if to_outside {
                        out.outside.push(term);
                    } else {
                        out.inside.push(term);
                    }
                    out.deformed.push(target.origin.clone());
                    placed = true;
                    break;
                }
            }
            if !placed {
                out.undeformable.push(target.origin.clone());
                extras.push(target);
            }
        }
        Ok(extras)
    }

    /// Splits crossing terms into closed chains (in walking order) and loose
    /// terms (locally central ones and isolated anticommuting pairs).
    fn chains(&self, crossing: &[CanonicalTerm]) -> Result<(Vec<Vec<CanonicalTerm>>, Vec<CanonicalTerm>)> {
        let restricted: Vec<PauliOp> = crossing.iter().map(|t| t.op.restrict(self.region)).collect();
        let m = restricted.len();
        let adj: Vec<Vec<usize>> = (0..m)
            .map(|i| (0..m).filter(|&j| j != i && restricted[i].anticommutes(&restricted[j])).collect())
            .collect();
        let mut seen = vec![false; m];
        let mut chains = Vec::new();
        let mut loose = Vec::new();
        for start in 0..m {
            if seen[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for &v in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            let is_pair = comp.len() == 2 && adj[comp[0]].len() == 1;
            if comp.len() == 1 || is_pair {
                loose.extend(comp.iter().map(|&i| crossing[i].clone()));
                continue;
            }
            if comp.iter().any(|&i| adj[i].len() != 2) {
                let degrees: Vec<usize> = comp.iter().map(|&i| adj[i].len()).collect();
                return Err(Error::Geometry(format!(
                    "crossing terms are not cyclically orderable: a cluster of {} has local degrees {:?}",
                    comp.len(),
                    degrees
                )));
            }
            // walk the cycle from its first member
            let mut order = vec![start];
            let mut prev = start;
            let mut cur = adj[start][0].min(adj[start][1]);
            while cur != start {
                order.push(cur);
                let next = if adj[cur][0] == prev { adj[cur][1] } else { adj[cur][0] };
                prev = cur;
                cur = next;
            }
            if order.len() != comp.len() {
                return Err(Error::Geometry("crossing terms form several interlocked cycles".into()));
            }
            chains.push(order.into_iter().map(|i| crossing[i].clone()).collect());
        }
        Ok((chains, loose))
    }

    fn inside_solver(&self, inside: &[CanonicalTerm]) -> (Echelon, Vec<PauliOp>) {
        let ops: Vec<PauliOp> = inside.iter().map(|t| t.op.clone()).collect();
        let mut ech = Echelon::tracking(2 * self.n, ops.len());
        for op in &ops {
            ech.insert(op.masked_row(self.region));
        }
        (ech, ops)
    }

    /// `op` times inside terms so that nothing is left on the region, when possible.
    fn clear_region(&self, op: PauliOp, solver: &(Echelon, Vec<PauliOp>)) -> PauliOp {
        let (ech, ops) = solver;
        match ech.express(&op.masked_row(self.region)) {
            Some(combo) => combo.iter_ones().fold(op, |mut acc, j| {
                acc.mul_assign_right(&ops[j]);
                acc
            }),
            None => op,
        }
    }

    fn product<'t>(&self, terms: impl IntoIterator<Item = &'t CanonicalTerm>) -> PauliOp {
        terms.into_iter().fold(PauliOp::identity(self.n), |mut acc, t| {
            acc.mul_assign_right(&t.op);
            acc
        })
    }

    fn pair_chain(
        &self,
        c: usize,
        chain: &[CanonicalTerm],
        solver: &(Echelon, Vec<PauliOp>),
        out: &mut CanonicalDecomposition,
    ) {
        let len = chain.len();
        // 1-based index i lives at chain[i - 1]
        let full = self.clear_region(self.product(chain), solver);
        out.commuting.push(CanonicalTerm::new(full, format!("chain{c} product")));
        let last = if len.is_multiple_of(2) {
            let even = self.product(chain.iter().skip(1).step_by(2));
            out.commuting.push(CanonicalTerm::new(self.clear_region(even, solver), format!("chain{c} even product")));
            len - 1
        } else {
            len
        };
        // suffix products of the odd-indexed terms up to `last`
        let mut suffix = vec![None; last + 2];
        let mut acc = PauliOp::identity(self.n);
        let mut i = if last % 2 == 1 { last } else { last - 1 };
        while i >= 3 {
            acc.mul_assign_right(&chain[i - 1].op);
            suffix[i] = Some(acc.clone());
            i -= 2;
        }
        let mut j = 1;
        while 2 * j < last {
            let even = chain[2 * j - 1].clone();
            let odd = suffix[2 * j + 1].clone().expect("odd suffix present");
            out.pairs.push((
                CanonicalTerm::new(even.op, format!("chain{c} K{} = {}", 2 * j, even.origin)),
                CanonicalTerm::new(odd, format!("chain{c} K{} = odd suffix", 2 * j + 1)),
            ));
            j += 1;
        }
    }

    fn pair_loose(&self, loose: Vec<CanonicalTerm>, out: &mut CanonicalDecomposition) {
        self.gram_schmidt(loose, out);
    }

    /// Annular replacements when an undeformable logical crosses: each chain's
    /// full product, and one even-index product across both chains chosen to
    /// commute locally with the logical. Returns the terms left to pair.
    fn replace_with_logicals(
        &self,
        chains: &[Vec<CanonicalTerm>],
        extras: &[CanonicalTerm],
        solver: &(Echelon, Vec<PauliOp>),
        out: &mut CanonicalDecomposition,
    ) -> Result<Vec<CanonicalTerm>> {
        let central_with_extras = |op: &PauliOp| extras.iter().all(|e| !self.local_anticommute(op, &e.op));
        let mut replaced: Vec<Vec<bool>> = chains.iter().map(|ch| vec![false; ch.len()]).collect();
        let mut evens = Vec::new();
        let mut odds = Vec::new();
        for (c, chain) in chains.iter().enumerate() {
            let full = self.product(chain);
            if !central_with_extras(&full) {
                return Err(Error::Canonical(format!(
                    "chain{} product anticommutes locally with an undeformable logical; the replacements do not suffice",
                    c + 1
                )));
            }
            out.commuting.push(CanonicalTerm::new(self.clear_region(full, solver), format!("chain{} product", c + 1)));
            replaced[c][0] = true;
            if chain.len() % 2 == 0 {
                evens.push((c, self.product(chain.iter().skip(1).step_by(2))));
                odds.push((c, self.product(chain.iter().step_by(2))));
            }
        }
        // one replacement from the span of the even-index products, anchored on
        // an even-indexed term of the first even chain
        if let Some(&(c0, ref e0)) = evens.first() {
            let mut candidates = vec![(e0.clone(), format!("chain{} even product", c0 + 1))];
            for ((c, e), (_, o)) in evens.iter().zip(&odds).skip(1) {
                let mut with_even = e0.clone();
                with_even.mul_assign_right(e);
                let mut with_odd = e0.clone();
                with_odd.mul_assign_right(o);
                candidates.insert(0, (with_even, format!("chain{} even x chain{} even", c0 + 1, c + 1)));
                candidates.insert(1, (with_odd, format!("chain{} even x chain{} odd", c0 + 1, c + 1)));
            }
            match candidates.into_iter().find(|(op, _)| central_with_extras(op)) {
                Some((op, origin)) => {
                    out.commuting.push(CanonicalTerm::new(self.clear_region(op, solver), origin));
                    replaced[c0][1] = true;
                }
                None => out.warnings.push("no even-index product commutes locally with the crossing logical".into()),
            }
        }
        Ok(chains
            .iter()
            .zip(&replaced)
            .flat_map(|(ch, r)| ch.iter().zip(r).filter(|(_, gone)| !**gone).map(|(t, _)| t.clone()))
            .collect())
    }

    /// Symplectic Gram–Schmidt on restrictions: splits `pool` into locally
    /// anticommuting pairs and locally central leftovers.
    fn gram_schmidt(&self, mut pool: Vec<CanonicalTerm>, out: &mut CanonicalDecomposition) {
        while let Some(a) = pool.first().cloned() {
            pool.remove(0);
            let Some(k) = pool.iter().position(|b| self.local_anticommute(&a.op, &b.op)) else {
                out.commuting.push(a);
                continue;
            };
            let b = pool.remove(k);
            for t in &mut pool {
                let with_a = self.local_anticommute(&t.op, &a.op);
                let with_b = self.local_anticommute(&t.op, &b.op);
                if with_b {
                    t.op.mul_assign_right(&a.op);
                }
                if with_a {
                    t.op.mul_assign_right(&b.op);
                }
                if with_a || with_b {
                    t.origin = format!("{}'", t.origin);
                }
            }
            out.pairs.push((a, b));
        }
    }

    fn verify(&self, out: &CanonicalDecomposition) -> Result<()> {
        let mut items: Vec<(PauliOp, Option<usize>)> = Vec::new();
        for (k, (a, b)) in out.pairs.iter().enumerate() {
            items.push((a.op.restrict(self.region), Some(k)));
            items.push((b.op.restrict(self.region), Some(k)));
        }
        items.extend(out.commuting.iter().map(|t| (t.op.restrict(self.region), None)));
        for i in 0..items.len() {
            for j in i + 1..items.len() {
                let anti = items[i].0.anticommutes(&items[j].0);
                let partners = items[i].1.is_some() && items[i].1 == items[j].1;
                if anti != partners {
                    return Err(Error::Canonical(format!(
                        "local pattern broken between crossing elements {i} and {j} (anticommute: {anti})"
                    )));
                }
            }
        }
        for t in out.inside.iter() {
            if t.op.support().intersects(&self.outside_mask) {
                return Err(Error::Canonical(format!("{} is listed inside but leaves the region", t.origin)));
            }
        }
        for t in out.outside.iter() {
            if t.op.support().intersects(self.region) {
                return Err(Error::Canonical(format!("{} is listed outside but touches the region", t.origin)));
            }
        }
        // the rewritten list generates the original group
        let before: Vec<BitVec> = self.local.iter().chain(self.logicals).map(|t| t.op.symplectic_row()).collect();
        let after: Vec<BitVec> = out
            .inside
            .iter()
            .chain(&out.outside)
            .chain(&out.commuting)
            .chain(out.pairs.iter().flat_map(|(a, b)| [a, b]))
            .map(|t| t.op.symplectic_row())
            .collect();
        let mut ech = Echelon::new(2 * self.n);
        for r in &before {
            ech.insert(r.clone());
        }
        let rank_before = ech.rank();
        let mut ech_after = Echelon::new(2 * self.n);
        for r in &after {
            ech_after.insert(r.clone());
            ech.insert(r.clone());
        }
        if ech_after.rank() != rank_before || ech.rank() != rank_before {
            return Err(Error::Canonical(format!(
                "rewritten generators span rank {} vs original {} (joint {})",
                ech_after.rank(),
                rank_before,
                ech.rank()
            )));
        }
        Ok(())
    }
}

/// `target` times a product of `helpers` with no support in `mask`, if one exists.
fn solve_cancel(n: usize, helpers: &[&PauliOp], target: &PauliOp, mask: &BitVec) -> Option<PauliOp> {
    let mut ech = Echelon::tracking(2 * n, helpers.len());
    for h in helpers {
        ech.insert(h.masked_row(mask));
    }
    let combo = ech.express(&target.masked_row(mask))?;
    Some(combo.iter_ones().fold(target.clone(), |mut acc, j| {
        acc.mul_assign_right(helpers[j]);
        acc
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::region_entropy;
    use crate::lattice::{build_plain_lattice, complete_to_pure_state, DefectLattice, DislocationSpec, LogicalState, Rect};

    fn terms(ops: &[&str]) -> Vec<CanonicalTerm> {
        ops.iter().enumerate().map(|(i, s)| CanonicalTerm::new(s.parse().unwrap(), format!("g{i}"))).collect()
    }

    #[test]
    fn bell_pair_is_one_pair() {
        let d = canonicalize_single_boundary(&terms(&["XX", "ZZ"]), &[], &BitVec::from_indices(2, [0])).unwrap();
        assert_eq!(d.pair_count(), 1);
    }

    #[test]
    fn vacuum_rectangles_match_rank() {
        let lat = build_plain_lattice(12, 12).unwrap();
        let st = complete_to_pure_state(&lat, &LogicalState::Auto).unwrap();
        let (local, logicals) = labelled_terms(&lat, &st);
        for (w, h) in [(2, 2), (3, 3), (4, 2), (4, 5), (6, 6)] {
            let m = lat.rect_mask(&[Rect::new(3, 3, w, h)]);
            let d = canonicalize_single_boundary(&local, &logicals, &m).unwrap();
            assert_eq!(d.pair_count(), region_entropy(st.generators(), &m).unwrap(), "{w}x{h}");
            assert_eq!(d.chains.len(), 1);
        }
    }

    #[test]
    fn odd_suffix_pairs_for_twisted_region() {
        let lat = DefectLattice::build(12, 12, &[DislocationSpec::new(6, 4, 8)]).unwrap();
        let st = complete_to_pure_state(&lat, &LogicalState::Auto).unwrap();
        let (local, logicals) = labelled_terms(&lat, &st);
        let m = lat.rect_mask(&[Rect::new(1, 4, 4, 4)]);
        let d = canonicalize_single_boundary(&local, &logicals, &m).unwrap();
        let l = d.chains[0];
        assert_eq!(l % 2, 1);
        assert_eq!(d.pair_count(), (l - 1) / 2);
        assert_eq!(d.pair_count(), region_entropy(st.generators(), &m).unwrap());
    }

    #[test]
    fn dump_lists_every_element() {
        let d = canonicalize_single_boundary(&terms(&["XX", "ZZ"]), &[], &BitVec::from_indices(2, [0])).unwrap();
        let text = d.dump();
        assert!(text.contains("pair 0a") && text.contains("pair 0b"));
    }
}
