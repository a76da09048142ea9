//! Closed-form neighbor rules for the two spherical operators on rank-3
//! classes at a rational point, truncated graph assembly, the operator action
//! on value tables, and DOT/JSON export.
//!
//! For a class E and operator index r, the neighbors are the classes of
//! subsheaves E'' = {sections with value at x in W} over the fiber subspaces
//! W of codimension r, counted by W. The rules below list, per shape class,
//! the Aut(E)-orbits of subspaces: orbit representative's kernel shape and
//! orbit size as a polynomial in q.

use std::collections::{BTreeMap, BTreeSet};

use num::rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::bundles::{canonical_projective, enumerate_pbun, ProjectiveType, SplittingType};
use crate::eigenform::FormTable;
use crate::error::{Error, Result};
use crate::qpoly::QPoly;

/// Weighted edge of an operator graph. Parallel edges are aggregated, so the
/// (src, dst) pair is unique within one graph and the weight is nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeckeEdge {
    pub src: ProjectiveType,
    pub dst: ProjectiveType,
    pub weight: QPoly,
}

/// Truncated operator graph. Edges leaving the truncation are dropped and
/// their sources flagged as boundary; only interior rows carry the full
/// weight sum q^2+q+1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeckeGraph {
    pub operator: u8,
    pub bound: i64,
    pub vertices: Vec<ProjectiveType>,
    pub edges: Vec<HeckeEdge>,
    pub boundary: BTreeSet<ProjectiveType>,
}

impl HeckeGraph {
    pub fn is_interior(&self, v: &ProjectiveType) -> bool {
        !self.boundary.contains(v)
    }

    pub fn interior_vertices(&self) -> impl Iterator<Item = &ProjectiveType> {
        self.vertices.iter().filter(|v| self.is_interior(v))
    }

    pub fn edges_from(&self, v: &ProjectiveType) -> Vec<&HeckeEdge> {
        self.edges.iter().filter(|e| &e.src == v).collect()
    }

    /// DOT rendering: one digraph, boundary vertices dashed, weights as
    /// polynomial labels.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("digraph phi_{} {{\n", self.operator));
        for v in &self.vertices {
            if self.boundary.contains(v) {
                out.push_str(&format!("  \"{v}\" [style=dashed];\n"));
            } else {
                out.push_str(&format!("  \"{v}\";\n"));
            }
        }
        for e in &self.edges {
            out.push_str(&format!("  \"{}\" -> \"{}\" [label=\"{}\"];\n", e.src, e.dst, e.weight));
        }
        out.push_str("}\n");
        out
    }
}

fn kernel_class(degrees: &[i64]) -> ProjectiveType {
    canonical_projective(&SplittingType::new(degrees.to_vec()))
}

/// Neighbor list of a rank-3 class under operator r in {1, 2}, as
/// (class, multiplicity) pairs with symbolic multiplicities summing to
/// q^2+q+1. Dispatch is an exhaustive match on the gap shape.
pub fn phi_neighbors(r: u8, p: &ProjectiveType) -> Result<Vec<(ProjectiveType, QPoly)>> {
    if p.rank() != 3 {
        return Err(Error::UnsupportedRank(p.rank()));
    }
    if r != 1 && r != 2 {
        return Err(Error::UnsupportedOperator(r));
    }
    let (g1, g2) = (p.gaps()[0], p.gaps()[1]);
    let w = QPoly::from_i64;
    // Orbit table. Entries are (kernel representative, orbit size).
    let raw: Vec<(ProjectiveType, QPoly)> = match (r, g1, g2) {
        (1, 0, 0) => vec![(kernel_class(&[-1, 0, 0]), w(&[1, 1, 1]))],
        (2, 0, 0) => vec![(kernel_class(&[-1, -1, 0]), w(&[1, 1, 1]))],
        (1, 0, d) => vec![
            // codim-1 constraints: the q^2 functionals touching the top fiber
            // kill a top section; the q+1 others kill a trivial one
            (kernel_class(&[0, 0, d - 1]), w(&[0, 0, 1])),
            (kernel_class(&[-1, 0, d]), w(&[1, 1])),
        ],
        (2, 0, d) => vec![
            (kernel_class(&[-1, 0, d - 1]), w(&[0, 1, 1])),
            (kernel_class(&[-1, -1, d]), w(&[1])),
        ],
        (1, g, h) if g == h => vec![
            (kernel_class(&[0, g - 1, g]), w(&[0, 1, 1])),
            (kernel_class(&[-1, g, g]), w(&[1])),
        ],
        (2, g, h) if g == h => vec![
            (kernel_class(&[0, g - 1, g - 1]), w(&[0, 0, 1])),
            (kernel_class(&[-1, g - 1, g]), w(&[1, 1])),
        ],
        (1, a, b) => vec![
            (kernel_class(&[0, a, b - 1]), w(&[0, 0, 1])),
            (kernel_class(&[0, a - 1, b]), w(&[0, 1])),
            (kernel_class(&[-1, a, b]), w(&[1])),
        ],
        (2, a, b) => vec![
            (kernel_class(&[-1, a, b - 1]), w(&[0, 1])),
            (kernel_class(&[0, a - 1, b - 1]), w(&[0, 0, 1])),
            (kernel_class(&[-1, a - 1, b]), w(&[1])),
        ],
        _ => unreachable!("operator validated above"),
    };
    let mut agg: BTreeMap<ProjectiveType, QPoly> = BTreeMap::new();
    for (t, m) in raw {
        let slot = agg.entry(t).or_insert_with(QPoly::zero);
        *slot = &*slot + &m;
    }
    Ok(agg.into_iter().collect())
}

/// The full-twist operator fixes every class: a single loop of weight 1.
pub fn phi3_neighbors(p: &ProjectiveType) -> Vec<(ProjectiveType, QPoly)> {
    vec![(p.clone(), QPoly::one())]
}

/// Builds the graph of operator r in {1, 2, 3} on all rank-3 classes with
/// gaps bounded by `bound`. Rule outputs beyond the truncation are dropped
/// and the source vertex is flagged boundary.
pub fn build_graph(r: u8, bound: i64) -> Result<HeckeGraph> {
    assert!(bound >= 1, "bound must be >= 1");
    let vertices = enumerate_pbun(3, bound);
    let mut edges = Vec::new();
    let mut boundary = BTreeSet::new();
    for v in &vertices {
        let neighbors = if r == 3 {
            phi3_neighbors(v)
        } else {
            phi_neighbors(r, v)?
        };
        for (t, m) in neighbors {
            if t.max_gap() <= bound {
                edges.push(HeckeEdge { src: v.clone(), dst: t, weight: m });
            } else {
                boundary.insert(v.clone());
            }
        }
    }
    edges.sort_by(|a, b| (&a.src, &a.dst).cmp(&(&b.src, &b.dst)));
    Ok(HeckeGraph { operator: r, bound, vertices, edges, boundary })
}

/// Applies the operator to a value table: (Phi f)(v) = sum of w(v->u) f(u)
/// with weights evaluated at q0. Defined on interior vertices only; the
/// input must cover every vertex of the graph.
pub fn apply_hecke(g: &HeckeGraph, f: &FormTable, q0: u64) -> Result<FormTable> {
    for v in &g.vertices {
        if !f.values.contains_key(v) {
            return Err(Error::MissingValue(v.to_string()));
        }
    }
    let mut by_src: BTreeMap<&ProjectiveType, Vec<(&ProjectiveType, BigRational)>> = BTreeMap::new();
    for e in &g.edges {
        let m = BigRational::from_integer(e.weight.eval(q0)?);
        by_src.entry(&e.src).or_default().push((&e.dst, m));
    }
    let mut values = BTreeMap::new();
    for v in g.interior_vertices() {
        let mut acc = BigRational::from_integer(0.into());
        if let Some(out) = by_src.get(v) {
            for (u, m) in out {
                acc += m * &f.values[*u];
            }
        }
        values.insert(v.clone(), acc);
    }
    Ok(FormTable { q0, bound: g.bound, values })
}
