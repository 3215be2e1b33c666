//! Ends of the finite completion: circle lifts near infinity, the `u`
//! permutation of infinite-order points, cycle ends with their index, the
//! embedding witness into a model surface, and the genus/puncture census.

mod circle;
mod decomposition;
mod witness;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::sheet_complex::{validate, SheetAddr, SheetComplex};
use crate::skeleton::{betti_by_component, components, finite_completion, skeleton, SkeletonError, VertexKind};

pub use circle::{default_radius, lift_circle, CircleCrossing, CircleLift, LiftKind};
pub use decomposition::{core_decomposition, raw_lengths, CoreDecomposition, HalfLines, RawLengths};
pub use witness::{embedding_witness, EmbeddingWitness, TargetModel};

pub(crate) use circle::{walk, CircleGeometry, Dir, State, WalkEnd};

/// Constant added to `sum(a'_j - a_j) - (n - 1)` so that the model surface
/// built with index `K` reports `K`. It reflects how `a'_j` is counted: in
/// full turns of the escaping circle lift, which counts the turn spent
/// crossing from the last sheet of one segment onto the next.
pub const CALIBRATION_OFFSET: i64 = -1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EndsError {
    #[error(transparent)]
    Skeleton(#[from] SkeletonError),
    #[error("radius {0} does not enclose z0 and every ramification projection")]
    RadiusTooSmall(f64),
    #[error("start point has modulus {modulus}, expected radius {radius}")]
    StartOffCircle { radius: f64, modulus: f64 },
    #[error("start point lies on a slit")]
    StartOnSlit,
    #[error("slit side on sheet {0} is not glued")]
    Unglued(String),
    #[error("circle lift did not close or escape within its step budget")]
    LiftBudget,
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("segment lists have lengths {a} and {a_prime}")]
    LengthMismatch { a: usize, a_prime: usize },
    #[error("normalization constants must satisfy c1, c2 >= 2 (got {c1}, {c2})")]
    BadConstants { c1: i64, c2: i64 },
    #[error("segment lengths cannot be brought within {c1} of 2N (spread {spread})")]
    SpreadTooLarge { c1: i64, spread: i64 },
    #[error("witness precondition: {0}")]
    Precondition(String),
    #[error("closing condition fails: k'_0 + k_0 + 1 = {got}, expected a_0 = {want}")]
    Closing { got: i64, want: i64 },
    #[error("no generic target model found")]
    NoTarget,
    #[error("Euler characteristic gives non-integral or negative genus (1 + b1 - p = {0})")]
    Genus(i64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleEnd {
    /// Infinite-order points `w_0, ..., w_{n-1}` with `w_{j+1} = u(w_j)`.
    pub cycle: Vec<String>,
    pub projections: Vec<[f64; 2]>,
    pub a: Vec<i64>,
    pub a_prime: Vec<i64>,
    pub index: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EndDescriptor {
    FiniteCover { degree: u64 },
    Cycle(CycleEnd),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ends {
    pub radius: f64,
    pub ends: Vec<EndDescriptor>,
    /// `u` as a map and as its list of cycles.
    pub u: BTreeMap<String, String>,
    pub u_cycles: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<CoreDecomposition>,
    /// Index (into `skeleton::components`) of the connected component each
    /// end belongs to.
    pub component: Vec<usize>,
}

/// `sum(a'_j - a_j) - (n - 1)`, the closing-condition form of the index.
pub fn raw_index(a: &[i64], a_prime: &[i64]) -> Result<i64, EndsError> {
    if a.len() != a_prime.len() || a.is_empty() {
        return Err(EndsError::LengthMismatch { a: a.len(), a_prime: a_prime.len() });
    }
    let s: i64 = a.iter().zip(a_prime).map(|(x, y)| y - x).sum();
    Ok(s - (a.len() as i64 - 1))
}

pub fn end_index(e: &CycleEnd) -> Result<i64, EndsError> {
    Ok(raw_index(&e.a, &e.a_prime)? + CALIBRATION_OFFSET)
}

fn ensure_valid(c: &SheetComplex) -> Result<(), EndsError> {
    let report = validate(c);
    if report.ok {
        Ok(())
    } else {
        Err(SkeletonError::InvalidComplex(report.violations).into())
    }
}

/// A connected component of circle lifts at radius `r`, described by its
/// kind and the core states it passes through.
pub(crate) struct LiftComponent {
    pub kind: ComponentKind,
    pub states: Vec<State>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum ComponentKind {
    Periodic(u64),
    /// Families escaped into backward and forward.
    Escaping { minus: usize, plus: usize },
}

/// Every circle-lift component through a core state, in order of its first
/// core state.
pub(crate) fn lift_components(g: &CircleGeometry) -> Result<Vec<LiftComponent>, EndsError> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for s in g.core_states() {
        if seen.contains(&s) {
            continue;
        }
        let fwd = walk(g, s, Dir::Forward)?;
        let (kind, mut states) = match fwd.end {
            WalkEnd::Closed => {
                let degree = fwd.states.iter().filter(|x| g.wraps(**x)).count() as u64;
                (ComponentKind::Periodic(degree), fwd.states)
            }
            WalkEnd::Escaped(plus) => {
                let bwd = walk(g, s, Dir::Backward)?;
                let WalkEnd::Escaped(minus) = bwd.end else {
                    return Err(EndsError::Inconsistent("lift escapes in one direction only".into()));
                };
                let mut st = fwd.states;
                st.extend(bwd.states);
                (ComponentKind::Escaping { minus, plus }, st)
            }
        };
        states.retain(|x| matches!(x.sheet, SheetAddr::Core(_)));
        states.sort();
        states.dedup();
        seen.extend(states.iter().copied());
        out.push(LiftComponent { kind, states });
    }
    Ok(out)
}

fn cycles_of(perm: &BTreeMap<usize, usize>) -> Vec<Vec<usize>> {
    let mut done = BTreeSet::new();
    let mut out = Vec::new();
    for &start in perm.keys() {
        if done.contains(&start) {
            continue;
        }
        let mut cyc = vec![start];
        done.insert(start);
        let mut cur = perm[&start];
        while cur != start {
            cyc.push(cur);
            done.insert(cur);
            cur = perm[&cur];
        }
        out.push(cyc);
    }
    out
}

/// Classifies the ends of the finite completion.
pub fn classify_ends(c: &SheetComplex) -> Result<Ends, EndsError> {
    ensure_valid(c)?;
    let radius = default_radius(c);
    let g = CircleGeometry::new(c, radius)?;
    let comps = lift_components(&g)?;
    let sk = skeleton(c)?;
    let skr = &sk;
    let sheet_component: BTreeMap<usize, usize> = components(&sk)
        .into_iter()
        .enumerate()
        .flat_map(|(ci, vs)| {
            vs.into_iter().filter_map(move |v| match skr.vertices[v].kind {
                VertexKind::Sheet(s) => Some((s, ci)),
                _ => None,
            })
        })
        .collect();
    let comp_of = |s: &State| match s.sheet {
        SheetAddr::Core(i) => sheet_component[&i],
        SheetAddr::Copy { .. } => unreachable!("components keep core states only"),
    };

    let raw = raw_lengths(c)?;
    let id = |r: usize| c.rams()[r].id.clone();
    let mut ends = Vec::new();
    let mut component = Vec::new();
    let decomposition = if raw.rams.is_empty() {
        None
    } else {
        // Smallest c1 that fits the spread of the per-cycle targets.
        let c1 = raw.required_c1().max(2);
        let d = core_decomposition(c, c1, 2)?;
        for cyc in raw.cycles() {
            let a: Vec<i64> = cyc.iter().map(|&r| d.a[&id(r)]).collect();
            let a_prime: Vec<i64> = cyc.iter().map(|&r| d.a_prime[&id(r)]).collect();
            let mut e = CycleEnd {
                cycle: cyc.iter().map(|&r| id(r)).collect(),
                projections: cyc
                    .iter()
                    .map(|&r| {
                        let p = c.rams()[r].projection;
                        [p.re, p.im]
                    })
                    .collect(),
                a,
                a_prime,
                index: 0,
            };
            e.index = end_index(&e)?;
            let attach = c.families_of(cyc[0]).next().expect("infinite ram has families").1.attach.sheet;
            component.push(sheet_component[&attach]);
            ends.push(EndDescriptor::Cycle(e));
        }
        Some(d)
    };
    for comp in &comps {
        if let ComponentKind::Periodic(degree) = comp.kind {
            component.push(comp_of(&comp.states[0]));
            ends.push(EndDescriptor::FiniteCover { degree });
        }
    }
    Ok(Ends {
        radius,
        ends,
        u: raw.u.iter().map(|(&a, &b)| (id(a), id(b))).collect(),
        u_cycles: raw.cycles().into_iter().map(|cy| cy.into_iter().map(id).collect()).collect(),
        decomposition,
        component,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentTopology {
    pub genus: u64,
    pub punctures: u64,
    pub b1_completed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Topology {
    /// Totals over all connected components.
    pub genus: u64,
    pub punctures: u64,
    pub b1_completed: u64,
    pub components: Vec<ComponentTopology>,
}

/// Genus and number of punctures of the finite completion, from
/// `2 - 2g - p = 1 - b1` per connected component.
pub fn topology_census(c: &SheetComplex) -> Result<Topology, EndsError> {
    let ends = classify_ends(c)?;
    let sk = skeleton(c)?;
    let b1s = betti_by_component(&finite_completion(&sk)?);
    let mut comps = Vec::new();
    for (ci, &b1) in b1s.iter().enumerate() {
        let p = ends.component.iter().filter(|&&x| x == ci).count() as i64;
        let twice_g = 1 + b1 as i64 - p;
        if twice_g < 0 || twice_g % 2 != 0 || p == 0 {
            return Err(EndsError::Genus(twice_g));
        }
        comps.push(ComponentTopology { genus: (twice_g / 2) as u64, punctures: p as u64, b1_completed: b1 as u64 });
    }
    Ok(Topology {
        genus: comps.iter().map(|t| t.genus).sum(),
        punctures: comps.iter().map(|t| t.punctures).sum(),
        b1_completed: comps.iter().map(|t| t.b1_completed).sum(),
        components: comps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sheet_complex::{build_model_surface, CoreSheet, SheetProto};
    use num_complex::Complex64;

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn model(n: usize, k: i64) -> SheetComplex {
        let w: Vec<Complex64> = (0..n).map(|j| Complex64::from_polar(1.0 + 0.3 * j as f64, 0.4 + 1.7 * j as f64)).collect();
        build_model_surface(z(0.05, -0.13), &w, z(-0.7, 2.1), k).unwrap()
    }

    #[test]
    fn index_formula() {
        assert_eq!(raw_index(&[5], &[5]).unwrap(), 0);
        assert_eq!(raw_index(&[1, 2], &[2, 4]).unwrap(), 2);
        assert!(matches!(raw_index(&[1], &[1, 2]), Err(EndsError::LengthMismatch { .. })));
    }

    #[test]
    fn single_sheet_has_one_plane_end() {
        let c = SheetComplex::from_parts(
            z(0.0, 0.0),
            vec![SheetProto { id: "P".into(), slits: vec![] }],
            vec![CoreSheet { id: "s".into(), proto: 0 }],
            vec![],
            vec![],
            vec![],
        )
        .unwrap();
        let e = classify_ends(&c).unwrap();
        assert_eq!(e.ends, vec![EndDescriptor::FiniteCover { degree: 1 }]);
        let t = topology_census(&c).unwrap();
        assert_eq!((t.genus, t.punctures), (0, 1));
    }

    #[test]
    fn model_ends_and_index() {
        for n in 1..=3 {
            for k in -3..=3 {
                let e = classify_ends(&model(n, k)).unwrap();
                let cycles: Vec<&CycleEnd> = e
                    .ends
                    .iter()
                    .filter_map(|x| match x {
                        EndDescriptor::Cycle(c) => Some(c),
                        _ => None,
                    })
                    .collect();
                assert_eq!(cycles.len(), 1, "n={n} K={k}");
                assert_eq!(cycles[0].cycle.len(), n);
                assert_eq!(cycles[0].index, k, "n={n} K={k}");
                let covers: Vec<&EndDescriptor> =
                    e.ends.iter().filter(|x| matches!(x, EndDescriptor::FiniteCover { .. })).collect();
                if k < 0 {
                    assert_eq!(covers, vec![&EndDescriptor::FiniteCover { degree: (-k) as u64 }]);
                } else {
                    assert!(covers.is_empty());
                }
            }
        }
    }

    #[test]
    fn model_topology() {
        let t = topology_census(&model(2, 1)).unwrap();
        assert_eq!((t.genus, t.punctures), (0, 1));
        let t = topology_census(&model(2, -2)).unwrap();
        assert_eq!((t.genus, t.punctures), (0, 2));
    }
}
