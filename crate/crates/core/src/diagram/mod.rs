//! Uni-trivalent diagrams: colored, δ-colored, and augmented.
//!
//! One graph type covers all three flavors. Trivalent vertices carry a
//! cyclic order of their three half-edges, edges are oriented and labeled
//! by fractions (colored diagrams restrict labels to polynomials), univalent
//! vertices carry module colorings with a hermitian linking matrix, and
//! isolated vertices carry prime labels.

pub mod canonical;
pub mod io;

use crate::blanchfield::{BlanchfieldModule, ModuleElement};
use crate::error::{Error, Result};
use crate::fraction::LaurentFraction;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum End {
    Tail,
    Head,
}

impl End {
    pub fn flip(self) -> End {
        match self {
            End::Tail => End::Head,
            End::Head => End::Tail,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfEdgeRef {
    pub edge: usize,
    pub end: End,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub label: LaurentFraction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VertexKind {
    Trivalent { cyclic: [HalfEdgeRef; 3] },
    Univalent { color: ModuleElement },
    Isolated { prime: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagramKind {
    /// Uni-trivalent, polynomial edge labels, module colorings, linkings.
    Colored,
    /// Trivalent only, fraction edge labels.
    Delta,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagram {
    pub kind: DiagramKind,
    pub vertices: Vec<VertexKind>,
    pub edges: Vec<Edge>,
    /// Linking entries as given; `linking_get` resolves the hermitian
    /// mirror and treats absent entries as zero.
    pub linking: BTreeMap<(usize, usize), LaurentFraction>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: &'static str,
    pub detail: String,
}

impl Violation {
    fn new(code: &'static str, detail: String) -> Self {
        Violation { code, detail }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.code, self.detail)
    }
}

impl Diagram {
    pub fn empty(kind: DiagramKind) -> Self {
        Diagram {
            kind,
            vertices: Vec::new(),
            edges: Vec::new(),
            linking: BTreeMap::new(),
        }
    }

    /// Degree: the number of vertices of valence 0 or 3.
    pub fn degree(&self) -> usize {
        self.vertices
            .iter()
            .filter(|v| matches!(v, VertexKind::Trivalent { .. } | VertexKind::Isolated { .. }))
            .count()
    }

    pub fn univalent_ids(&self) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&v| matches!(self.vertices[v], VertexKind::Univalent { .. }))
            .collect()
    }

    pub fn trivalent_ids(&self) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&v| matches!(self.vertices[v], VertexKind::Trivalent { .. }))
            .collect()
    }

    pub fn isolated_primes(&self) -> Vec<u64> {
        self.vertices
            .iter()
            .filter_map(|v| match v {
                VertexKind::Isolated { prime } => Some(*prime),
                _ => None,
            })
            .collect()
    }

    pub fn color(&self, v: usize) -> Option<&ModuleElement> {
        match &self.vertices[v] {
            VertexKind::Univalent { color } => Some(color),
            _ => None,
        }
    }

    pub fn set_color(&mut self, v: usize, color: ModuleElement) {
        if let VertexKind::Univalent { color: c } = &mut self.vertices[v] {
            *c = color;
        }
    }

    /// Half-edges incident to a vertex, in edge order (loops contribute
    /// both ends).
    pub fn incident_half_edges(&self, v: usize) -> Vec<HalfEdgeRef> {
        let mut out = Vec::new();
        for (e, edge) in self.edges.iter().enumerate() {
            if edge.tail == v {
                out.push(HalfEdgeRef { edge: e, end: End::Tail });
            }
            if edge.head == v {
                out.push(HalfEdgeRef { edge: e, end: End::Head });
            }
        }
        out
    }

    pub fn endpoint(&self, h: HalfEdgeRef) -> usize {
        match h.end {
            End::Tail => self.edges[h.edge].tail,
            End::Head => self.edges[h.edge].head,
        }
    }

    pub fn other_endpoint(&self, h: HalfEdgeRef) -> usize {
        match h.end {
            End::Tail => self.edges[h.edge].head,
            End::Head => self.edges[h.edge].tail,
        }
    }

    /// Linking value f_{vw}; absent entries are zero, the (w,v) entry is
    /// resolved through the hermitian rule f_{vw} = bar(f_{wv}).
    pub fn linking_get(&self, v: usize, w: usize) -> LaurentFraction {
        if let Some(f) = self.linking.get(&(v, w)) {
            return f.clone();
        }
        if let Some(f) = self.linking.get(&(w, v)) {
            return f.bar();
        }
        LaurentFraction::zero()
    }

    /// Store f_{vw}, normalized to the v < w slot.
    pub fn linking_set(&mut self, v: usize, w: usize, f: LaurentFraction) {
        assert_ne!(v, w);
        let (key, val) = if v < w { ((v, w), f) } else { ((w, v), f.bar()) };
        self.linking.remove(&(key.1, key.0));
        if val.is_zero() {
            self.linking.remove(&key);
        } else {
            self.linking.insert(key, val);
        }
    }

    /// Rescale the linking row of v by Q(t): f_{v,·} becomes Q(t) f_{v,·}.
    pub fn linking_scale_row(&mut self, v: usize, q: &crate::laurent::LaurentPoly) {
        let keys: Vec<(usize, usize)> = self.linking.keys().copied().collect();
        for (a, b) in keys {
            if a == v {
                let f = self.linking.get(&(a, b)).unwrap().mul_poly(q);
                if f.is_zero() {
                    self.linking.remove(&(a, b));
                } else {
                    self.linking.insert((a, b), f);
                }
            } else if b == v {
                // stored entry f_{ab} has v in second place; the row of v is
                // its bar, so scaling that row by Q multiplies the stored
                // entry by bar(Q)
                let f = self.linking.get(&(a, b)).unwrap().mul_poly(&q.bar());
                if f.is_zero() {
                    self.linking.remove(&(a, b));
                } else {
                    self.linking.insert((a, b), f);
                }
            }
        }
    }

    /// Full validity check; an empty list means the diagram is well-formed.
    /// Congruence against the module pairing is checked when a module is
    /// supplied.
    pub fn validate(&self, module: Option<&BlanchfieldModule>) -> Vec<Violation> {
        let mut out = Vec::new();
        let nv = self.vertices.len();
        for (ei, e) in self.edges.iter().enumerate() {
            if e.tail >= nv || e.head >= nv {
                out.push(Violation::new("edge-endpoint", format!("edge e{} out of range", ei)));
                continue;
            }
            let tail_uni = matches!(self.vertices[e.tail], VertexKind::Univalent { .. });
            let head_uni = matches!(self.vertices[e.head], VertexKind::Univalent { .. });
            if tail_uni && head_uni {
                out.push(Violation::new(
                    "strut",
                    format!("edge e{} joins univalent vertices v{} and v{}", ei, e.tail, e.head),
                ));
            }
            if matches!(self.vertices[e.tail], VertexKind::Isolated { .. })
                || matches!(self.vertices[e.head], VertexKind::Isolated { .. })
            {
                out.push(Violation::new(
                    "edge-endpoint",
                    format!("edge e{} touches an isolated vertex", ei),
                ));
            }
            if self.kind == DiagramKind::Colored && !e.label.is_polynomial() {
                out.push(Violation::new(
                    "label",
                    format!("edge e{} of a colored diagram has non-polynomial label {}", ei, e.label),
                ));
            }
            if self.kind == DiagramKind::Delta {
                if let Some(m) = module {
                    let delta = m.annihilator();
                    if !e.label.denominator().divides(&delta) {
                        out.push(Violation::new(
                            "label",
                            format!(
                                "edge e{} label denominator {} does not divide {}",
                                ei,
                                e.label.denominator(),
                                delta
                            ),
                        ));
                    }
                }
            }
        }
        for (vi, v) in self.vertices.iter().enumerate() {
            let incident = self.incident_half_edges(vi);
            match v {
                VertexKind::Trivalent { cyclic } => {
                    let mut a: Vec<HalfEdgeRef> = cyclic.to_vec();
                    let mut b = incident.clone();
                    a.sort();
                    b.sort();
                    if a != b {
                        out.push(Violation::new(
                            "cyclic-order",
                            format!("vertex v{} cyclic order does not list its incident half-edges", vi),
                        ));
                    }
                }
                VertexKind::Univalent { color } => {
                    if incident.len() != 1 {
                        out.push(Violation::new(
                            "valence",
                            format!("univalent vertex v{} has {} incident half-edges", vi, incident.len()),
                        ));
                    }
                    if self.kind == DiagramKind::Delta {
                        out.push(Violation::new(
                            "kind",
                            format!("delta diagram contains univalent vertex v{}", vi),
                        ));
                    }
                    if let Some(m) = module {
                        if color.coords.len() != m.num_generators() {
                            out.push(Violation::new(
                                "color",
                                format!(
                                    "vertex v{} color has {} coordinates, module has {} generators",
                                    vi,
                                    color.coords.len(),
                                    m.num_generators()
                                ),
                            ));
                        }
                    }
                }
                VertexKind::Isolated { prime } => {
                    if !incident.is_empty() {
                        out.push(Violation::new(
                            "valence",
                            format!("isolated vertex v{} has incident edges", vi),
                        ));
                    }
                    if !is_prime_u64(*prime) {
                        out.push(Violation::new("prime", format!("vertex v{} label {} is not prime", vi, prime)));
                    }
                }
            }
        }
        // linking entries: domain and hermitian consistency
        let is_uni = |v: usize| matches!(self.vertices.get(v), Some(VertexKind::Univalent { .. }));
        for (&(a, b), f) in &self.linking {
            if a == b || !is_uni(a) || !is_uni(b) {
                out.push(Violation::new(
                    "linking-domain",
                    format!("linking entry ({}, {}) is not a pair of distinct univalent vertices", a, b),
                ));
                continue;
            }
            if let Some(g) = self.linking.get(&(b, a)) {
                if a < b && *g != f.bar() {
                    out.push(Violation::new(
                        "hermitian",
                        format!("f_{{{},{}}} and f_{{{},{}}} are not bar-conjugate", a, b, b, a),
                    ));
                }
            }
        }
        // congruence with the module pairing
        if let (DiagramKind::Colored, Some(m)) = (self.kind, module) {
            let unis = self.univalent_ids();
            let colors_ok = unis
                .iter()
                .all(|&v| self.color(v).map_or(false, |c| c.coords.len() == m.num_generators()));
            if colors_ok {
                for i in 0..unis.len() {
                    for j in (i + 1)..unis.len() {
                        let (v, w) = (unis[i], unis[j]);
                        let f = self.linking_get(v, w);
                        let expected = match m.pair(self.color(v).unwrap(), self.color(w).unwrap()) {
                            Ok(p) => p,
                            Err(_) => continue,
                        };
                        if f.reduced_rep() != expected {
                            out.push(Violation::new(
                                "congruence",
                                format!(
                                    "linking f_{{{},{}}} = {} is not congruent to the pairing {}",
                                    v, w, f, expected
                                ),
                            ));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn validated(self, module: Option<&BlanchfieldModule>) -> Result<Self> {
        let violations = self.validate(module);
        if violations.is_empty() {
            Ok(self)
        } else {
            let lines: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            Err(Error::Invalid(lines.join("; ")))
        }
    }

    /// Witness search for distributedness: a partition of the univalent
    /// vertices into pairs assigned pairwise-distinct copies containing
    /// their colors, with zero linkings across pairs. Returns the pairing
    /// with its copy assignment when one exists.
    pub fn distributed_witness(
        &self,
        module: &BlanchfieldModule,
    ) -> Option<Vec<(usize, usize, usize)>> {
        let unis = self.univalent_ids();
        if unis.len() % 2 != 0 {
            return None;
        }
        // candidate copies per vertex: copies containing the color support
        let candidates: Vec<Vec<usize>> = unis
            .iter()
            .map(|&v| {
                let support = self.color(v).unwrap().support_copies(module);
                (0..module.copies().len())
                    .filter(|c| support.is_empty() || (support.len() == 1 && support.contains(c)))
                    .collect()
            })
            .collect();
        let mut used_copies = vec![false; module.copies().len()];
        let mut assignment: Vec<(usize, usize, usize)> = Vec::new();
        let mut matched = vec![false; unis.len()];
        self.match_pairs(&unis, &candidates, &mut used_copies, &mut matched, &mut assignment)
    }

    fn match_pairs(
        &self,
        unis: &[usize],
        candidates: &[Vec<usize>],
        used_copies: &mut Vec<bool>,
        matched: &mut Vec<bool>,
        assignment: &mut Vec<(usize, usize, usize)>,
    ) -> Option<Vec<(usize, usize, usize)>> {
        let first = match matched.iter().position(|&m| !m) {
            None => return Some(assignment.clone()),
            Some(i) => i,
        };
        for j in (first + 1)..unis.len() {
            if matched[j] {
                continue;
            }
            // linkings into other pairs must be zero
            let cross_ok = |x: usize| {
                (0..unis.len())
                    .filter(|&k| k != first && k != j)
                    .all(|k| matched[k] == false || self.linking_get(unis[x], unis[k]).is_zero())
            };
            if !cross_ok(first) || !cross_ok(j) {
                continue;
            }
            for &copy in &candidates[first] {
                if used_copies[copy] || !candidates[j].contains(&copy) {
                    continue;
                }
                matched[first] = true;
                matched[j] = true;
                used_copies[copy] = true;
                assignment.push((unis[first], unis[j], copy));
                if let Some(w) =
                    self.match_pairs(unis, candidates, used_copies, matched, assignment)
                {
                    return Some(w);
                }
                assignment.pop();
                used_copies[copy] = false;
                matched[first] = false;
                matched[j] = false;
            }
        }
        None
    }

    pub fn is_distributed(&self, module: &BlanchfieldModule) -> bool {
        self.distributed_witness(module).is_some()
    }
}

/// Incremental construction with cyclic orders taken from attachment order
/// unless set explicitly.
pub struct DiagramBuilder {
    kind: DiagramKind,
    vertices: Vec<VertexKind>,
    attach: Vec<Vec<HalfEdgeRef>>,
    explicit_cyclic: BTreeMap<usize, [HalfEdgeRef; 3]>,
    edges: Vec<Edge>,
    linking: BTreeMap<(usize, usize), LaurentFraction>,
}

impl DiagramBuilder {
    pub fn new(kind: DiagramKind) -> Self {
        DiagramBuilder {
            kind,
            vertices: Vec::new(),
            attach: Vec::new(),
            explicit_cyclic: BTreeMap::new(),
            edges: Vec::new(),
            linking: BTreeMap::new(),
        }
    }

    pub fn trivalent(&mut self) -> usize {
        self.vertices.push(VertexKind::Trivalent {
            cyclic: [HalfEdgeRef { edge: usize::MAX, end: End::Tail }; 3],
        });
        self.attach.push(Vec::new());
        self.vertices.len() - 1
    }

    pub fn univalent(&mut self, color: ModuleElement) -> usize {
        self.vertices.push(VertexKind::Univalent { color });
        self.attach.push(Vec::new());
        self.vertices.len() - 1
    }

    pub fn isolated(&mut self, prime: u64) -> usize {
        self.vertices.push(VertexKind::Isolated { prime });
        self.attach.push(Vec::new());
        self.vertices.len() - 1
    }

    pub fn edge(&mut self, tail: usize, head: usize, label: LaurentFraction) -> usize {
        let e = self.edges.len();
        self.edges.push(Edge { tail, head, label });
        self.attach[tail].push(HalfEdgeRef { edge: e, end: End::Tail });
        self.attach[head].push(HalfEdgeRef { edge: e, end: End::Head });
        e
    }

    pub fn poly_edge(&mut self, tail: usize, head: usize, label: &str) -> usize {
        self.edge(tail, head, label.parse().expect("label parses"))
    }

    pub fn cyclic_order(&mut self, v: usize, order: [HalfEdgeRef; 3]) {
        self.explicit_cyclic.insert(v, order);
    }

    pub fn linking(&mut self, v: usize, w: usize, f: LaurentFraction) {
        let (key, val) = if v < w { ((v, w), f) } else { ((w, v), f.bar()) };
        self.linking.insert(key, val);
    }

    pub fn build(mut self) -> Diagram {
        for (vi, kind) in self.vertices.iter_mut().enumerate() {
            if let VertexKind::Trivalent { cyclic } = kind {
                let order = if let Some(o) = self.explicit_cyclic.get(&vi) {
                    *o
                } else {
                    let a = &self.attach[vi];
                    assert_eq!(a.len(), 3, "trivalent vertex v{} has {} attachments", vi, a.len());
                    [a[0], a[1], a[2]]
                };
                *cyclic = order;
            }
        }
        Diagram {
            kind: self.kind,
            vertices: self.vertices,
            edges: self.edges,
            linking: self.linking,
        }
    }
}

/// Deterministic Miller-Rabin for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mul_mod = |a: u64, b: u64, m: u64| ((a as u128 * b as u128) % m as u128) as u64;
    let pow_mod = |mut a: u64, mut e: u64, m: u64| {
        let mut acc = 1u64;
        a %= m;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(acc, a, m);
            }
            a = mul_mod(a, a, m);
            e >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;

    /// Closed theta graph: two trivalent vertices joined by three labeled
    /// edges, all oriented the same way.
    pub fn theta(labels: [&str; 3]) -> Diagram {
        let mut b = DiagramBuilder::new(DiagramKind::Delta);
        let u = b.trivalent();
        let v = b.trivalent();
        for l in labels {
            b.edge(u, v, l.parse().unwrap());
        }
        b.build()
    }
}

#[cfg(test)]
mod tests {
    use super::testutil::theta;
    use super::*;
    use crate::blanchfield::BlockSpec;
    use crate::laurent::LaurentPoly;

    fn p(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    fn delta_module() -> BlanchfieldModule {
        BlanchfieldModule::single(vec![BlockSpec::cyclic(p("t - 1 + t^-1"), 1, p("1"))]).unwrap()
    }

    #[test]
    fn theta_is_valid_of_degree_two() {
        let d = theta(["1", "1", "1"]);
        assert!(d.validate(None).is_empty());
        assert_eq!(d.degree(), 2);
    }

    #[test]
    fn strut_is_rejected() {
        let m = delta_module();
        let mut b = DiagramBuilder::new(DiagramKind::Colored);
        let v = b.univalent(m.generator_element(0));
        let w = b.univalent(m.generator_element(0));
        b.poly_edge(v, w, "1");
        let d = b.build();
        let violations = d.validate(Some(&m));
        assert!(violations.iter().any(|v| v.code == "strut"));
    }

    #[test]
    fn congruence_violation_names_the_pair() {
        let m = delta_module();
        let mut b = DiagramBuilder::new(DiagramKind::Colored);
        let t = b.trivalent();
        let v = b.univalent(m.generator_element(0));
        let w = b.univalent(m.generator_element(0));
        let x = b.univalent(m.generator_element(0));
        b.poly_edge(t, v, "1");
        b.poly_edge(t, w, "1");
        b.poly_edge(t, x, "1");
        // b(γ,γ) = 1/δ but all linkings claim 0
        let d = b.build();
        let violations = d.validate(Some(&m));
        assert!(violations.iter().any(|v| v.code == "congruence" && v.detail.contains("1,2")));
    }

    #[test]
    fn hermitian_violation_detected() {
        let m = delta_module();
        let mut b = DiagramBuilder::new(DiagramKind::Colored);
        let t1 = b.trivalent();
        let t2 = b.trivalent();
        let v = b.univalent(m.generator_element(0));
        let w = b.univalent(m.generator_element(0));
        b.poly_edge(t1, v, "1");
        b.poly_edge(t2, w, "1");
        b.poly_edge(t1, t2, "1");
        b.poly_edge(t1, t2, "1");
        let mut d = b.build();
        // both directions claim t/δ, but bar(t/δ) = t^-1/δ ≠ t/δ
        let f: LaurentFraction = "t / t - 1 + t^-1".parse().unwrap();
        d.linking.insert((v, w), f.clone());
        d.linking.insert((w, v), f);
        let violations = d.validate(Some(&m));
        assert!(violations.iter().any(|x| x.code == "hermitian"));
    }

    #[test]
    fn distributed_examples() {
        let m = delta_module().direct_sum(3).unwrap();
        // two univalent vertices colored in copy 1
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
        d.linking_set(v, w, "1 / t - 1 + t^-1".parse().unwrap());
        assert!(d.is_distributed(&m));

        // four vertices all colored in copy 1: no distinct copies per pair
        let mut b = DiagramBuilder::new(DiagramKind::Colored);
        let t1 = b.trivalent();
        let t2 = b.trivalent();
        let vs: Vec<usize> = (0..4).map(|_| b.univalent(m.generator_element(0))).collect();
        b.poly_edge(t1, vs[0], "1");
        b.poly_edge(t1, vs[1], "1");
        b.poly_edge(t2, vs[2], "1");
        b.poly_edge(t2, vs[3], "1");
        b.poly_edge(t1, t2, "1");
        let mut d = b.build();
        let f: LaurentFraction = "1 / t - 1 + t^-1".parse().unwrap();
        for i in 0..4usize {
            for j in (i + 1)..4 {
                d.linking_set(vs[i], vs[j], f.clone());
            }
        }
        assert!(!d.is_distributed(&m));
    }

    #[test]
    fn primality() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(3));
        assert!(is_prime_u64(5));
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(4));
        assert!(!is_prime_u64(561)); // Carmichael
    }
}
