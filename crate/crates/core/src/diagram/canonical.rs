//! Canonical forms for diagrams.
//!
//! Isomorphic diagrams (same colors, labels and linkings up to relabeling of
//! vertices and half-edges) receive identical keys. The two sign conventions
//! are absorbed into the coefficient: a trivalent orientation flip costs -1
//! (cyclic orders are normalized to the lexicographically least rotation)
//! and an edge reversal bars the label at no cost (edges are oriented toward
//! the larger endpoint in the canonical labeling). A diagram reaching its
//! own canonical form with both signs is identified with zero, as is any
//! diagram containing an edge labeled 0.
//!
//! The search is a backtracking labeled-graph canonical labeling with
//! color/label/degree refinement; labels and linkings participate in the
//! refinement partition.

use super::{Diagram, DiagramKind, End, HalfEdgeRef, VertexKind};
use std::collections::BTreeMap;

/// Returns the canonical key together with the sign relating this diagram
/// to the canonical representative: `diagram = sign * [key]`. Sign 0 means
/// the diagram is identified with the zero sum.
pub fn canonical_form(d: &Diagram) -> (String, i8) {
    if d.edges.iter().any(|e| e.label.is_zero()) {
        return ("0".into(), 0);
    }
    if d.vertices.is_empty() {
        return (assemble(d.kind, &[], &[], &[]), 1);
    }
    let mut searcher = Searcher {
        d,
        best: None,
        best_signs: SignSet::empty(),
    };
    let initial = initial_partition(d);
    searcher.search(initial);
    let (key, signs) = (
        searcher.best.expect("at least one leaf"),
        searcher.best_signs,
    );
    (key, signs.resolve())
}

#[derive(Clone, Copy, PartialEq, Eq)]
struct SignSet {
    plus: bool,
    minus: bool,
}

impl SignSet {
    fn empty() -> Self {
        SignSet {
            plus: false,
            minus: false,
        }
    }
    fn insert(&mut self, s: i8) {
        match s {
            1 => self.plus = true,
            -1 => self.minus = true,
            _ => {
                self.plus = true;
                self.minus = true;
            }
        }
    }
    fn resolve(self) -> i8 {
        match (self.plus, self.minus) {
            (true, true) => 0,
            (true, false) => 1,
            (false, true) => -1,
            (false, false) => 0,
        }
    }
}

struct Searcher<'a> {
    d: &'a Diagram,
    best: Option<String>,
    best_signs: SignSet,
}

fn initial_partition(d: &Diagram) -> Vec<Vec<usize>> {
    let mut by_class: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for v in 0..d.vertices.len() {
        let class = match &d.vertices[v] {
            VertexKind::Trivalent { .. } => "T".to_string(),
            VertexKind::Univalent { color } => format!("U:{}", color.serialize()),
            VertexKind::Isolated { prime } => format!("I:{}", prime),
        };
        by_class.entry(class).or_default().push(v);
    }
    by_class.into_values().collect()
}

/// Orientation-free invariant of a half-edge, used in refinement.
fn half_edge_invariant(d: &Diagram, h: HalfEdgeRef) -> String {
    let e = &d.edges[h.edge];
    if e.tail == e.head {
        let a = e.label.to_string();
        let b = e.label.bar().to_string();
        return format!("loop:{}", a.min(b));
    }
    let (fwd, rev) = match h.end {
        End::Tail => (
            format!("o:{}", e.label),
            format!("i:{}", e.label.bar()),
        ),
        End::Head => (
            format!("i:{}", e.label),
            format!("o:{}", e.label.bar()),
        ),
    };
    fwd.min(rev)
}

fn refine(d: &Diagram, mut partition: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    loop {
        let mut class_of = vec![0usize; d.vertices.len()];
        for (ci, cell) in partition.iter().enumerate() {
            for &v in cell {
                class_of[v] = ci;
            }
        }
        let signature = |v: usize| -> String {
            let mut parts: Vec<String> = d
                .incident_half_edges(v)
                .into_iter()
                .map(|h| {
                    let w = d.other_endpoint(h);
                    format!("({},{})", class_of[w], half_edge_invariant(d, h))
                })
                .collect();
            parts.sort();
            let mut sig = parts.join(";");
            if matches!(d.vertices[v], VertexKind::Univalent { .. }) {
                let mut links: Vec<String> = d
                    .univalent_ids()
                    .into_iter()
                    .filter(|&w| w != v)
                    .filter_map(|w| {
                        let f = d.linking_get(v, w);
                        if f.is_zero() {
                            None
                        } else {
                            Some(format!("[{},{}]", class_of[w], f))
                        }
                    })
                    .collect();
                links.sort();
                sig.push('|');
                sig.push_str(&links.join(";"));
            }
            sig
        };
        let mut next: Vec<Vec<usize>> = Vec::new();
        let mut changed = false;
        for cell in &partition {
            if cell.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let mut by_sig: BTreeMap<String, Vec<usize>> = BTreeMap::new();
            for &v in cell {
                by_sig.entry(signature(v)).or_default().push(v);
            }
            if by_sig.len() > 1 {
                changed = true;
            }
            for sub in by_sig.into_values() {
                next.push(sub);
            }
        }
        partition = next;
        if !changed {
            return partition;
        }
    }
}

impl<'a> Searcher<'a> {
    fn search(&mut self, partition: Vec<Vec<usize>>) {
        let partition = refine(self.d, partition);
        if let Some(target) = partition.iter().position(|c| c.len() > 1) {
            for &v in &partition[target] {
                let mut next = partition.clone();
                let rest: Vec<usize> = partition[target]
                    .iter()
                    .copied()
                    .filter(|&x| x != v)
                    .collect();
                next[target] = vec![v];
                next.insert(target + 1, rest);
                self.search(next);
            }
            return;
        }
        let order: Vec<usize> = partition.into_iter().map(|c| c[0]).collect();
        self.process_leaf(&order);
    }

    fn process_leaf(&mut self, order: &[usize]) {
        let d = self.d;
        let n = d.vertices.len();
        let mut pos = vec![0usize; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        // per-edge orientation variants; a symmetric loop label keeps both
        let mut edge_variants: Vec<Vec<EdgeVariant>> = Vec::with_capacity(d.edges.len());
        for e in &d.edges {
            if e.tail == e.head {
                let fwd = e.label.to_string();
                let rev = e.label.bar().to_string();
                let a = pos[e.tail];
                let vs = match fwd.cmp(&rev) {
                    std::cmp::Ordering::Less => vec![EdgeVariant { a, b: a, label: fwd, flipped: false }],
                    std::cmp::Ordering::Greater => vec![EdgeVariant { a, b: a, label: rev, flipped: true }],
                    std::cmp::Ordering::Equal => vec![
                        EdgeVariant { a, b: a, label: fwd, flipped: false },
                        EdgeVariant { a, b: a, label: rev, flipped: true },
                    ],
                };
                edge_variants.push(vs);
            } else {
                let (pt, ph) = (pos[e.tail], pos[e.head]);
                let v = if pt < ph {
                    EdgeVariant { a: pt, b: ph, label: e.label.to_string(), flipped: false }
                } else {
                    EdgeVariant { a: ph, b: pt, label: e.label.bar().to_string(), flipped: true }
                };
                edge_variants.push(vec![v]);
            }
        }
        let mut choice_stack = vec![0usize; d.edges.len()];
        self.enumerate_orientations(order, &edge_variants, &mut choice_stack, 0);
    }

    fn enumerate_orientations(
        &mut self,
        order: &[usize],
        edge_variants: &[Vec<EdgeVariant>],
        choices: &mut Vec<usize>,
        at: usize,
    ) {
        if at == edge_variants.len() {
            self.finish_leaf(order, edge_variants, choices);
            return;
        }
        for c in 0..edge_variants[at].len() {
            choices[at] = c;
            self.enumerate_orientations(order, edge_variants, choices, at + 1);
        }
    }

    fn finish_leaf(
        &mut self,
        order: &[usize],
        edge_variants: &[Vec<EdgeVariant>],
        choices: &[usize],
    ) {
        let d = self.d;
        // sorted edge records with duplicate groups
        let mut recs: Vec<(String, usize)> = edge_variants
            .iter()
            .enumerate()
            .map(|(e, vs)| {
                let v = &vs[choices[e]];
                (format!("{}-{}:{}", v.a, v.b, v.label), e)
            })
            .collect();
        recs.sort();
        // groups of identical records
        let mut groups: Vec<(usize, usize)> = Vec::new(); // (start, len)
        let mut i = 0;
        while i < recs.len() {
            let mut j = i + 1;
            while j < recs.len() && recs[j].0 == recs[i].0 {
                j += 1;
            }
            groups.push((i, j - i));
            i = j;
        }
        // enumerate assignments of physical edges to positions within groups
        let mut index_of_edge = vec![0usize; d.edges.len()];
        for (s, (rec, e)) in recs.iter().enumerate() {
            let _ = rec;
            index_of_edge[*e] = s;
        }
        let edge_section: Vec<String> = recs.iter().map(|(r, _)| r.clone()).collect();
        self.enumerate_group_permutations(order, edge_variants, choices, &recs, &groups, 0, &mut index_of_edge, &edge_section);
    }

    #[allow(clippy::too_many_arguments)]
    fn enumerate_group_permutations(
        &mut self,
        order: &[usize],
        edge_variants: &[Vec<EdgeVariant>],
        choices: &[usize],
        recs: &[(String, usize)],
        groups: &[(usize, usize)],
        gi: usize,
        index_of_edge: &mut Vec<usize>,
        edge_section: &[String],
    ) {
        if gi == groups.len() {
            self.encode_candidate(order, edge_variants, choices, index_of_edge, edge_section);
            return;
        }
        let (start, len) = groups[gi];
        if len == 1 {
            self.enumerate_group_permutations(order, edge_variants, choices, recs, groups, gi + 1, index_of_edge, edge_section);
            return;
        }
        let members: Vec<usize> = (start..start + len).map(|s| recs[s].1).collect();
        let mut positions: Vec<usize> = (start..start + len).collect();
        permute(&mut positions, 0, &mut |perm| {
            for (k, &e) in members.iter().enumerate() {
                index_of_edge[e] = perm[k];
            }
            self.enumerate_group_permutations(order, edge_variants, choices, recs, groups, gi + 1, index_of_edge, edge_section);
        });
        // restore the identity assignment
        for (k, &e) in members.iter().enumerate() {
            index_of_edge[e] = start + k;
        }
    }

    fn encode_candidate(
        &mut self,
        order: &[usize],
        edge_variants: &[Vec<EdgeVariant>],
        choices: &[usize],
        index_of_edge: &[usize],
        edge_section: &[String],
    ) {
        let d = self.d;
        let mut sign = 1i8;
        let mut ambiguous = false;
        let mut vertex_parts: Vec<String> = Vec::with_capacity(order.len());
        for &v in order {
            match &d.vertices[v] {
                VertexKind::Trivalent { cyclic } => {
                    let items: Vec<String> = cyclic
                        .iter()
                        .map(|h| {
                            let variant = &edge_variants[h.edge][choices[h.edge]];
                            let end = if variant.flipped { h.end.flip() } else { h.end };
                            let e = index_of_edge[h.edge];
                            match end {
                                End::Tail => format!("{}t", e),
                                End::Head => format!("{}h", e),
                            }
                        })
                        .collect();
                    let (best, s, amb) = best_cyclic(&items);
                    vertex_parts.push(format!("T({})", best));
                    sign *= s;
                    ambiguous |= amb;
                }
                VertexKind::Univalent { color } => {
                    vertex_parts.push(format!("U({})", color.serialize()));
                }
                VertexKind::Isolated { prime } => {
                    vertex_parts.push(format!("I({})", prime));
                }
            }
        }
        // linking section in the new labeling
        let unis: Vec<usize> = (0..order.len())
            .filter(|&i| matches!(d.vertices[order[i]], VertexKind::Univalent { .. }))
            .collect();
        let mut link_parts = Vec::new();
        for (ai, &i) in unis.iter().enumerate() {
            for &j in &unis[ai + 1..] {
                let f = d.linking_get(order[i], order[j]);
                if !f.is_zero() {
                    link_parts.push(format!("{},{}:{}", i, j, f));
                }
            }
        }
        let key = assemble(d.kind, &vertex_parts, edge_section, &link_parts);
        let candidate_sign = if ambiguous { 0 } else { sign };
        match &self.best {
            None => {
                self.best = Some(key);
                self.best_signs = SignSet::empty();
                self.best_signs.insert(candidate_sign);
            }
            Some(b) => match key.cmp(b) {
                std::cmp::Ordering::Less => {
                    self.best = Some(key);
                    self.best_signs = SignSet::empty();
                    self.best_signs.insert(candidate_sign);
                }
                std::cmp::Ordering::Equal => {
                    self.best_signs.insert(candidate_sign);
                }
                std::cmp::Ordering::Greater => {}
            },
        }
    }
}

/// One orientation choice for an edge in a fixed labeling: the normalized
/// record (a <= b) and whether the stored designations were flipped.
struct EdgeVariant {
    a: usize,
    b: usize,
    label: String,
    flipped: bool,
}

fn assemble(kind: DiagramKind, vertices: &[String], edges: &[String], links: &[String]) -> String {
    let k = match kind {
        DiagramKind::Colored => "C",
        DiagramKind::Delta => "D",
    };
    format!(
        "{}|V[{}]|E[{}]|L[{}]",
        k,
        vertices.join(","),
        edges.join(","),
        links.join(",")
    )
}

/// Least representative of a cyclic triple under rotation (sign +1) and
/// reflection (sign -1). Reports ambiguity when both parities attain it.
fn best_cyclic(items: &[String]) -> (String, i8, bool) {
    debug_assert_eq!(items.len(), 3);
    let rot = |a: usize, b: usize, c: usize| format!("{},{},{}", items[a], items[b], items[c]);
    let even = [rot(0, 1, 2), rot(1, 2, 0), rot(2, 0, 1)];
    let odd = [rot(0, 2, 1), rot(2, 1, 0), rot(1, 0, 2)];
    let be = even.iter().min().unwrap();
    let bo = odd.iter().min().unwrap();
    match be.cmp(bo) {
        std::cmp::Ordering::Less => (be.clone(), 1, false),
        std::cmp::Ordering::Greater => (bo.clone(), -1, false),
        std::cmp::Ordering::Equal => (be.clone(), 1, true),
    }
}

fn permute<F: FnMut(&[usize])>(items: &mut Vec<usize>, at: usize, f: &mut F) {
    if at == items.len() {
        f(items);
        return;
    }
    for i in at..items.len() {
        items.swap(at, i);
        permute(items, at + 1, f);
        items.swap(at, i);
    }
}

#[cfg(test)]
mod tests {
    use super::super::testutil::theta;
    use super::super::{DiagramBuilder, DiagramKind};
    use super::*;
    use crate::blanchfield::{BlanchfieldModule, BlockSpec};
    use crate::laurent::LaurentPoly;

    fn p(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    fn delta_module() -> BlanchfieldModule {
        BlanchfieldModule::single(vec![BlockSpec::cyclic(p("t - 1 + t^-1"), 1, p("1"))]).unwrap()
    }

    #[test]
    fn vertex_flip_negates() {
        let d = theta(["1", "t", "t^2"]);
        let (key, sign) = canonical_form(&d);
        let mut flipped = d.clone();
        if let VertexKind::Trivalent { cyclic } = &mut flipped.vertices[0] {
            cyclic.swap(0, 1);
        }
        let (key2, sign2) = canonical_form(&flipped);
        assert_eq!(key, key2);
        assert_eq!(sign * sign2, -1, "one orientation flip contributes -1");
    }

    #[test]
    fn edge_reversal_with_bar_is_free() {
        let d = theta(["1", "t", "t^2"]);
        let (key, sign) = canonical_form(&d);
        let mut reversed = d.clone();
        let e = &mut reversed.edges[1];
        std::mem::swap(&mut e.tail, &mut e.head);
        e.label = e.label.bar();
        // fix the designations in the incident cyclic orders
        for v in reversed.vertices.iter_mut() {
            if let VertexKind::Trivalent { cyclic } = v {
                for h in cyclic.iter_mut() {
                    if h.edge == 1 {
                        h.end = h.end.flip();
                    }
                }
            }
        }
        let (key2, sign2) = canonical_form(&reversed);
        assert_eq!(key, key2);
        assert_eq!(sign, sign2, "edge reversal with barred label has no sign");
    }

    #[test]
    fn relabeling_invariance() {
        // theta with distinct labels, rebuilt with vertices in the other order
        let d1 = theta(["1", "t", "t^2"]);
        let mut b = DiagramBuilder::new(DiagramKind::Delta);
        let v = b.trivalent();
        let u = b.trivalent();
        // same diagram: edges still oriented u -> v
        b.edge(u, v, "1".parse().unwrap());
        b.edge(u, v, "t".parse().unwrap());
        b.edge(u, v, "t^2".parse().unwrap());
        let d2 = b.build();
        assert_eq!(canonical_form(&d1), canonical_form(&d2));
    }

    #[test]
    fn zero_labeled_edge_is_zero() {
        let d = theta(["0", "1", "1"]);
        let (_, sign) = canonical_form(&d);
        assert_eq!(sign, 0);
    }

    #[test]
    fn double_flip_is_identity() {
        let d = theta(["1", "t", "t^2"]);
        let (key, sign) = canonical_form(&d);
        let mut flipped = d.clone();
        for v in 0..2 {
            if let VertexKind::Trivalent { cyclic } = &mut flipped.vertices[v] {
                cyclic.swap(0, 1);
            }
        }
        let (key2, sign2) = canonical_form(&flipped);
        assert_eq!(key, key2);
        assert_eq!(sign, sign2);
    }

    #[test]
    fn symmetric_loop_label_vanishes() {
        // loop labeled by a bar-symmetric polynomial: the orientation
        // reversal realizes the diagram as its own negative
        let m = delta_module();
        let mut b = DiagramBuilder::new(DiagramKind::Colored);
        let u = b.trivalent();
        let v = b.univalent(m.generator_element(0));
        b.poly_edge(u, u, "t + t^-1");
        b.poly_edge(u, v, "1");
        let d = b.build();
        let (_, sign) = canonical_form(&d);
        assert_eq!(sign, 0);

        // non-symmetric loop label survives
        let mut b = DiagramBuilder::new(DiagramKind::Colored);
        let u = b.trivalent();
        let v = b.univalent(m.generator_element(0));
        b.poly_edge(u, u, "t");
        b.poly_edge(u, v, "1");
        let d = b.build();
        let (_, sign) = canonical_form(&d);
        assert_ne!(sign, 0);
    }

    #[test]
    fn linking_distinguishes() {
        let m = delta_module();
        let make = |f: &str| {
            let mut b = DiagramBuilder::new(DiagramKind::Colored);
            let t1 = b.trivalent();
            let t2 = b.trivalent();
            let v = b.univalent(m.generator_element(0));
            let w = b.univalent(m.generator_element(0));
            b.poly_edge(t1, t2, "1");
            b.poly_edge(t1, t2, "1");
            b.poly_edge(t1, v, "1");
            b.poly_edge(t2, w, "1");
            let mut d = b.build();
            d.linking_set(v, w, f.parse().unwrap());
            d
        };
        let a = make("1 / t - 1 + t^-1");
        let b2 = make("t / t - 1 + t^-1");
        assert_ne!(canonical_form(&a).0, canonical_form(&b2).0);
    }
}
