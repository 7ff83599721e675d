//! Diagram file format.
//!
//! ```text
//! diagram colored
//! vertices
//! v0 trivalent e0.t e1.t e2.t
//! v1 univalent 1 ; 0
//! v2 isolated 5
//! edges
//! e0 v0 -> v3 t^2 - 1
//! linking
//! v1 v4 t / t^2 - t + 1
//! ```
//!
//! Vertex and edge ids are contiguous and in order. Univalent colors list
//! one polynomial per module generator, separated by `;`. Absent linking
//! entries are zero. `---` separates diagrams in list files, each optionally
//! preceded by a `coeff <rational>` line.

use super::{Diagram, DiagramBuilder, DiagramKind, End, HalfEdgeRef, VertexKind};
use crate::blanchfield::ModuleElement;
use crate::error::{Error, Result};
use crate::fraction::LaurentFraction;
use crate::Rat;
use num::One;

pub fn parse_diagram(text: &str) -> Result<Diagram> {
    let mut kind: Option<DiagramKind> = None;
    #[derive(PartialEq)]
    enum Section {
        None,
        Vertices,
        Edges,
        Linking,
    }
    let mut section = Section::None;
    let mut vertex_lines: Vec<(usize, String)> = Vec::new();
    let mut edge_lines: Vec<(usize, String)> = Vec::new();
    let mut linking_lines: Vec<(usize, String)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("diagram ") {
            kind = Some(match rest.trim() {
                "colored" => DiagramKind::Colored,
                "delta" => DiagramKind::Delta,
                other => return Err(Error::Parse(format!("unknown diagram kind '{}'", other))),
            });
            continue;
        }
        match line {
            "vertices" => {
                section = Section::Vertices;
                continue;
            }
            "edges" => {
                section = Section::Edges;
                continue;
            }
            "linking" => {
                section = Section::Linking;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Vertices => vertex_lines.push((lineno + 1, line.to_string())),
            Section::Edges => edge_lines.push((lineno + 1, line.to_string())),
            Section::Linking => linking_lines.push((lineno + 1, line.to_string())),
            Section::None => {
                return Err(Error::Parse(format!(
                    "line {}: content before any section: '{}'",
                    lineno + 1,
                    line
                )))
            }
        }
    }
    let kind = kind.ok_or_else(|| Error::Parse("missing 'diagram colored|delta' header".into()))?;

    // edges first: vertex cyclic orders reference them
    struct EdgeDecl {
        tail: usize,
        head: usize,
        label: LaurentFraction,
    }
    let mut edges: Vec<EdgeDecl> = Vec::new();
    for (lineno, line) in &edge_lines {
        let mut tok = line.split_whitespace();
        let eid = parse_id(tok.next(), 'e', *lineno)?;
        if eid != edges.len() {
            return Err(Error::Parse(format!(
                "line {}: edge ids must be contiguous, expected e{}",
                lineno,
                edges.len()
            )));
        }
        let tail = parse_id(tok.next(), 'v', *lineno)?;
        let arrow = tok.next();
        if arrow != Some("->") {
            return Err(Error::Parse(format!("line {}: expected '->'", lineno)));
        }
        let head = parse_id(tok.next(), 'v', *lineno)?;
        let label_text: String = tok.collect::<Vec<_>>().join(" ");
        if label_text.is_empty() {
            return Err(Error::Parse(format!("line {}: edge needs a label", lineno)));
        }
        let label: LaurentFraction = label_text.parse()?;
        edges.push(EdgeDecl { tail, head, label });
    }

    let mut vertices: Vec<VertexKind> = Vec::new();
    for (lineno, line) in &vertex_lines {
        let mut tok = line.split_whitespace();
        let vid = parse_id(tok.next(), 'v', *lineno)?;
        if vid != vertices.len() {
            return Err(Error::Parse(format!(
                "line {}: vertex ids must be contiguous, expected v{}",
                lineno,
                vertices.len()
            )));
        }
        let kind_tok = tok
            .next()
            .ok_or_else(|| Error::Parse(format!("line {}: vertex needs a kind", lineno)))?;
        match kind_tok {
            "trivalent" => {
                let mut refs = Vec::new();
                for _ in 0..3 {
                    let h = tok.next().ok_or_else(|| {
                        Error::Parse(format!("line {}: trivalent vertex needs three half-edges", lineno))
                    })?;
                    refs.push(parse_half_edge(h, *lineno)?);
                }
                if tok.next().is_some() {
                    return Err(Error::Parse(format!(
                        "line {}: trivalent vertex takes exactly three half-edges",
                        lineno
                    )));
                }
                vertices.push(VertexKind::Trivalent {
                    cyclic: [refs[0], refs[1], refs[2]],
                });
            }
            "univalent" => {
                let rest: String = tok.collect::<Vec<_>>().join(" ");
                let color = ModuleElement::parse(&rest)?;
                vertices.push(VertexKind::Univalent { color });
            }
            "isolated" => {
                let p: u64 = tok
                    .next()
                    .ok_or_else(|| Error::Parse(format!("line {}: isolated vertex needs a label", lineno)))?
                    .parse()
                    .map_err(|e: std::num::ParseIntError| Error::Parse(e.to_string()))?;
                vertices.push(VertexKind::Isolated { prime: p });
            }
            other => {
                return Err(Error::Parse(format!(
                    "line {}: unknown vertex kind '{}'",
                    lineno, other
                )))
            }
        }
    }

    let mut diagram = Diagram {
        kind,
        vertices,
        edges: edges
            .into_iter()
            .map(|e| super::Edge {
                tail: e.tail,
                head: e.head,
                label: e.label,
            })
            .collect(),
        linking: Default::default(),
    };

    for (lineno, line) in &linking_lines {
        let mut tok = line.split_whitespace();
        let v = parse_id(tok.next(), 'v', *lineno)?;
        let w = parse_id(tok.next(), 'v', *lineno)?;
        let rest: String = tok.collect::<Vec<_>>().join(" ");
        if rest.is_empty() {
            return Err(Error::Parse(format!("line {}: linking entry needs a value", lineno)));
        }
        let f: LaurentFraction = rest.parse()?;
        if v == w {
            return Err(Error::Parse(format!("line {}: linking needs distinct vertices", lineno)));
        }
        diagram.linking.insert((v, w), f);
    }

    // structural validation, module-independent
    let violations = diagram.validate(None);
    if !violations.is_empty() {
        let lines: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(Error::Invalid(lines.join("; ")));
    }
    Ok(diagram)
}

fn parse_id(tok: Option<&str>, prefix: char, lineno: usize) -> Result<usize> {
    let t = tok.ok_or_else(|| Error::Parse(format!("line {}: expected {}<id>", lineno, prefix)))?;
    let rest = t
        .strip_prefix(prefix)
        .ok_or_else(|| Error::Parse(format!("line {}: expected {}<id>, got '{}'", lineno, prefix, t)))?;
    rest.parse()
        .map_err(|e: std::num::ParseIntError| Error::Parse(format!("line {}: {}", lineno, e)))
}

fn parse_half_edge(t: &str, lineno: usize) -> Result<HalfEdgeRef> {
    let (id_part, end_part) = t
        .split_once('.')
        .ok_or_else(|| Error::Parse(format!("line {}: expected e<id>.t or e<id>.h", lineno)))?;
    let edge = parse_id(Some(id_part), 'e', lineno)?;
    let end = match end_part {
        "t" => End::Tail,
        "h" => End::Head,
        other => {
            return Err(Error::Parse(format!(
                "line {}: half-edge end must be 't' or 'h', got '{}'",
                lineno, other
            )))
        }
    };
    Ok(HalfEdgeRef { edge, end })
}

pub fn serialize_diagram(d: &Diagram) -> String {
    let mut out = String::new();
    out.push_str(match d.kind {
        DiagramKind::Colored => "diagram colored\n",
        DiagramKind::Delta => "diagram delta\n",
    });
    out.push_str("vertices\n");
    for (vi, v) in d.vertices.iter().enumerate() {
        match v {
            VertexKind::Trivalent { cyclic } => {
                let hs: Vec<String> = cyclic
                    .iter()
                    .map(|h| {
                        format!(
                            "e{}.{}",
                            h.edge,
                            match h.end {
                                End::Tail => "t",
                                End::Head => "h",
                            }
                        )
                    })
                    .collect();
                out.push_str(&format!("v{} trivalent {}\n", vi, hs.join(" ")));
            }
            VertexKind::Univalent { color } => {
                out.push_str(&format!("v{} univalent {}\n", vi, color.serialize()));
            }
            VertexKind::Isolated { prime } => {
                out.push_str(&format!("v{} isolated {}\n", vi, prime));
            }
        }
    }
    out.push_str("edges\n");
    for (ei, e) in d.edges.iter().enumerate() {
        out.push_str(&format!("e{} v{} -> v{} {}\n", ei, e.tail, e.head, e.label));
    }
    let unis = d.univalent_ids();
    let mut lines = Vec::new();
    for (i, &v) in unis.iter().enumerate() {
        for &w in &unis[i + 1..] {
            let f = d.linking_get(v, w);
            if !f.is_zero() {
                lines.push(format!("v{} v{} {}\n", v, w, f));
            }
        }
    }
    if !lines.is_empty() {
        out.push_str("linking\n");
        for l in lines {
            out.push_str(&l);
        }
    }
    out
}

/// Parse a list of diagrams separated by `---` lines, each optionally
/// preceded by a `coeff <rational>` line.
pub fn parse_diagram_list(text: &str) -> Result<Vec<(Rat, Diagram)>> {
    let mut out = Vec::new();
    for chunk in text.split("\n---") {
        let mut coeff = Rat::one();
        let mut body = String::new();
        for line in chunk.lines() {
            let l = line.trim();
            if l == "---" {
                continue;
            }
            if let Some(rest) = l.strip_prefix("coeff ") {
                coeff = rest
                    .trim()
                    .parse::<Rat>()
                    .map_err(|e| Error::Parse(format!("bad coefficient '{}': {}", rest, e)))?;
                continue;
            }
            body.push_str(line);
            body.push('\n');
        }
        if body.trim().is_empty() {
            continue;
        }
        out.push((coeff, parse_diagram(&body)?));
    }
    Ok(out)
}

pub fn serialize_diagram_list(items: &[(Rat, Diagram)]) -> String {
    let mut parts = Vec::new();
    for (c, d) in items {
        let mut s = String::new();
        if !c.is_one() {
            s.push_str(&format!("coeff {}\n", c));
        }
        s.push_str(&serialize_diagram(d));
        parts.push(s);
    }
    parts.join("---\n")
}

#[cfg(test)]
mod tests {
    use super::super::testutil::theta;
    use super::*;

    #[test]
    fn serialize_parse_fixpoint() {
        let d = theta(["1", "t", "t^2 / t^2 - t + 1"]);
        let s = serialize_diagram(&d);
        let d2 = parse_diagram(&s).unwrap();
        assert_eq!(d2, d);
        assert_eq!(serialize_diagram(&d2), s);
    }

    #[test]
    fn parse_rejects_strut() {
        let text = "diagram colored\nvertices\nv0 univalent 1\nv1 univalent 1\nedges\ne0 v0 -> v1 1\n";
        let err = parse_diagram(text).unwrap_err();
        assert!(err.to_string().contains("strut"), "error was: {}", err);
    }

    #[test]
    fn parse_theta_fixture() {
        let text = "\
diagram delta
vertices
v0 trivalent e0.t e1.t e2.t
v1 trivalent e0.h e1.h e2.h
edges
e0 v0 -> v1 1
e1 v0 -> v1 1
e2 v0 -> v1 1
";
        let d = parse_diagram(text).unwrap();
        assert_eq!(d.degree(), 2);
        assert!(d.validate(None).is_empty());
    }

    #[test]
    fn list_roundtrip() {
        let items = vec![
            (crate::rat(1, 1), theta(["1", "1", "1"])),
            (crate::rat(-2, 3), theta(["t", "1", "1"])),
        ];
        let s = serialize_diagram_list(&items);
        let parsed = parse_diagram_list(&s).unwrap();
        assert_eq!(parsed, items);
    }
}
