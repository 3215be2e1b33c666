//! Skeleton graph of a sheet complex: one vertex per core sheet, one marker
//! per half-line family, one edge per glued pair of slit sides.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::sheet_complex::{validate, Order, SheetComplex, Violation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SkeletonError {
    #[error("invalid complex: {}", .0.iter().map(|v| format!("{} ({})", v.invariant, v.detail)).collect::<Vec<_>>().join("; "))]
    InvalidComplex(Vec<Violation>),
    #[error("edges over {ram} form neither a cycle nor a bi-infinite line")]
    MalformedRam { ram: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum VertexKind {
    /// A core sheet.
    Sheet(usize),
    /// The periodic tail of a half-line family.
    Tail(usize),
    /// The point added for a finite-order ramification point.
    Completion(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Vertex {
    pub kind: VertexKind,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub ram: usize,
    /// Set on the edge joining a core sheet to a family tail.
    pub periodic: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Skeleton {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    /// Ram identifiers indexed by `Edge::ram`.
    pub rams: Vec<String>,
}

pub fn skeleton(c: &SheetComplex) -> Result<Skeleton, SkeletonError> {
    let report = validate(c);
    if !report.ok {
        return Err(SkeletonError::InvalidComplex(report.violations));
    }
    let mut vertices: Vec<Vertex> = c
        .core_sheets()
        .iter()
        .enumerate()
        .map(|(i, s)| Vertex { kind: VertexKind::Sheet(i), label: s.id.clone() })
        .collect();
    let tail0 = vertices.len();
    vertices.extend(
        c.families()
            .iter()
            .enumerate()
            .map(|(i, f)| Vertex { kind: VertexKind::Tail(i), label: f.id.clone() }),
    );
    let ram_of = |sheet: usize, slit: usize| c.protos()[c.core_sheets()[sheet].proto].slits[slit].ram;
    let mut edges: Vec<Edge> = c
        .gluing()
        .iter()
        .map(|(x, y)| Edge { a: x.sheet, b: y.sheet, ram: ram_of(x.sheet, x.slit), periodic: false })
        .collect();
    edges.extend(
        c.families()
            .iter()
            .enumerate()
            .map(|(i, f)| Edge { a: f.attach.sheet, b: tail0 + i, ram: f.ram, periodic: true }),
    );
    Ok(Skeleton { vertices, edges, rams: c.rams().iter().map(|r| r.id.clone()).collect() })
}

/// Shape of the edge subgraph over one ramification point.
enum Shape {
    Cycle(Vec<usize>),
    Line,
}

fn shape(s: &Skeleton, ram: usize) -> Option<Shape> {
    let edges: Vec<&Edge> = s.edges.iter().filter(|e| e.ram == ram).collect();
    if edges.is_empty() {
        return None;
    }
    let mut degree: BTreeMap<usize, usize> = BTreeMap::new();
    for e in &edges {
        *degree.entry(e.a).or_default() += 1;
        *degree.entry(e.b).or_default() += 1;
    }
    let verts: Vec<usize> = degree.keys().copied().collect();
    let pairs: Vec<(usize, usize)> = edges.iter().map(|e| (e.a, e.b)).collect();
    if count_components(&verts, &pairs) != 1 {
        return None;
    }
    let tails = edges.iter().filter(|e| e.periodic).count();
    if tails == 0 {
        // Connected with all degrees 2: a single cycle.
        return degree.values().all(|&d| d == 2).then(|| Shape::Cycle(verts));
    }
    let ends = degree.values().filter(|&&d| d == 1).count();
    let tail_ends = edges
        .iter()
        .filter(|e| e.periodic)
        .all(|e| matches!(s.vertices[e.b].kind, VertexKind::Tail(_)) && degree[&e.b] == 1);
    let is_path = edges.len() + 1 == verts.len() && ends == 2 && degree.values().all(|&d| d <= 2);
    (tails == 2 && tail_ends && is_path).then_some(Shape::Line)
}

/// Order of every registered ramification point read off the skeleton: `n`
/// for an `n`-cycle, infinite for a line between two periodic tails.
pub fn ramification_census(s: &Skeleton) -> Result<Vec<(String, Order)>, SkeletonError> {
    (0..s.rams.len())
        .map(|r| {
            let order = match shape(s, r) {
                Some(Shape::Cycle(_)) => Order::Finite(s.edges.iter().filter(|e| e.ram == r).count() as u32),
                Some(Shape::Line) => Order::Infinite,
                None => return Err(SkeletonError::MalformedRam { ram: s.rams[r].clone() }),
            };
            Ok((s.rams[r].clone(), order))
        })
        .collect()
}

/// Replaces the cycle over every finite-order point by a star through a new
/// completion vertex.
pub fn finite_completion(s: &Skeleton) -> Result<Skeleton, SkeletonError> {
    let mut vertices = s.vertices.clone();
    let mut finite = vec![false; s.rams.len()];
    let mut stars = Vec::new();
    for r in 0..s.rams.len() {
        match shape(s, r) {
            Some(Shape::Cycle(verts)) => {
                finite[r] = true;
                let v = vertices.len();
                vertices.push(Vertex { kind: VertexKind::Completion(r), label: format!("v({})", s.rams[r]) });
                stars.extend(verts.into_iter().map(|a| Edge { a, b: v, ram: r, periodic: false }));
            }
            Some(Shape::Line) => {}
            None => return Err(SkeletonError::MalformedRam { ram: s.rams[r].clone() }),
        }
    }
    let mut edges: Vec<Edge> = s.edges.iter().filter(|e| !finite[e.ram]).cloned().collect();
    edges.extend(stars);
    Ok(Skeleton { vertices, edges, rams: s.rams.clone() })
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn count_components(verts: &[usize], edges: &[(usize, usize)]) -> usize {
    let ix: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut parent: Vec<usize> = (0..verts.len()).collect();
    let mut count = verts.len();
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, ix[&a]), find(&mut parent, ix[&b]));
        if ra != rb {
            parent[ra] = rb;
            count -= 1;
        }
    }
    count
}

/// The finite part: vertices and edges left after pruning periodic tails.
fn finite_part(s: &Skeleton) -> (Vec<usize>, Vec<(usize, usize)>) {
    let verts = (0..s.vertices.len()).filter(|&v| !matches!(s.vertices[v].kind, VertexKind::Tail(_))).collect();
    let edges = s.edges.iter().filter(|e| !e.periodic).map(|e| (e.a, e.b)).collect();
    (verts, edges)
}

/// Connected components of the finite part, as sorted vertex lists.
pub fn components(s: &Skeleton) -> Vec<Vec<usize>> {
    let (verts, edges) = finite_part(s);
    let mut parent: Vec<usize> = (0..s.vertices.len()).collect();
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in verts {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    groups.into_values().collect()
}

/// First Betti number `E - V + C` of the finite part.
pub fn betti(s: &Skeleton) -> usize {
    let (verts, edges) = finite_part(s);
    let c = count_components(&verts, &edges);
    edges.len() + c - verts.len()
}

/// First Betti number of each connected component of the finite part, in
/// the order returned by [`components`].
pub fn betti_by_component(s: &Skeleton) -> Vec<usize> {
    let (_, edges) = finite_part(s);
    components(s)
        .into_iter()
        .map(|comp| {
            let e = edges.iter().filter(|(a, _)| comp.binary_search(a).is_ok()).count();
            e + 1 - comp.len()
        })
        .collect()
}
