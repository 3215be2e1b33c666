//! Lifting the circle `|z| = R` through the sheets.
//!
//! For `R` beyond every foot and beyond `z0`, each slit ray crosses the circle
//! exactly once, so every sheet splits the circle into arcs between
//! consecutive crossings. A lift is then a walk on states `(sheet, arc)`:
//! going counterclockwise leaves an arc through the bottom side of the next
//! ray and enters the partner's sheet on the arc starting at that ray.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use super::EndsError;
use crate::sheet_complex::{Orientation, SheetAddr, SheetComplex, SheetPoint, Side, SideAddr};

/// Radius used when none is given: twice the larger of `|z0|` and the
/// largest projection plus one (taken as 1 without ramification points).
pub fn default_radius(c: &SheetComplex) -> f64 {
    let far = c.rams().iter().map(|r| r.projection.norm() + 1.0).fold(1.0, f64::max);
    2.0 * c.z0().norm().max(far)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct State {
    pub sheet: SheetAddr,
    pub arc: usize,
}

/// Crossing angles on `|z| = R` for every proto, sorted.
pub(crate) struct CircleGeometry<'a> {
    pub c: &'a SheetComplex,
    /// Per proto: slit indices in increasing crossing angle, and the angles.
    order: Vec<Vec<usize>>,
    angles: Vec<Vec<f64>>,
    /// Per proto: arc index starting at each slit.
    arc_of_slit: Vec<Vec<usize>>,
}

fn crossing_angle(z0: Complex64, foot: Complex64, r: f64) -> f64 {
    let d = (foot - z0) / (foot - z0).norm();
    let b = foot.re * d.re + foot.im * d.im;
    let t = -b + (b * b - foot.norm_sqr() + r * r).sqrt();
    (foot + d * t).arg().rem_euclid(TAU)
}

impl<'a> CircleGeometry<'a> {
    pub fn new(c: &'a SheetComplex, r: f64) -> Result<Self, EndsError> {
        if !(r.is_finite() && r > c.z0().norm()) || c.rams().iter().any(|w| r <= w.projection.norm()) {
            return Err(EndsError::RadiusTooSmall(r));
        }
        let mut order = Vec::new();
        let mut angles = Vec::new();
        let mut arc_of_slit = Vec::new();
        for p in c.protos() {
            let mut ix: Vec<(f64, usize)> =
                p.slits.iter().enumerate().map(|(i, s)| (crossing_angle(c.z0(), s.foot, r), i)).collect();
            ix.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
            let mut inv = vec![0; ix.len()];
            for (pos, &(_, i)) in ix.iter().enumerate() {
                inv[i] = pos;
            }
            order.push(ix.iter().map(|x| x.1).collect());
            angles.push(ix.iter().map(|x| x.0).collect());
            arc_of_slit.push(inv);
        }
        Ok(CircleGeometry { c, order, angles, arc_of_slit })
    }

    fn proto(&self, sheet: SheetAddr) -> usize {
        match sheet {
            SheetAddr::Core(i) => self.c.core_sheets()[i].proto,
            SheetAddr::Copy { family, .. } => self.c.families()[family].proto,
        }
    }

    pub fn arcs(&self, sheet: SheetAddr) -> usize {
        self.order[self.proto(sheet)].len().max(1)
    }

    /// Whether the arc passes through angle zero.
    pub fn wraps(&self, s: State) -> bool {
        s.arc + 1 == self.arcs(s.sheet)
    }

    /// The state containing a point of the circle.
    pub fn locate(&self, p: SheetPoint, r: f64) -> Result<State, EndsError> {
        if ((p.pos.norm() - r) / r).abs() > 1e-9 {
            return Err(EndsError::StartOffCircle { radius: r, modulus: p.pos.norm() });
        }
        let proto = self.proto(p.sheet);
        let angles = &self.angles[proto];
        if angles.is_empty() {
            return Ok(State { sheet: p.sheet, arc: 0 });
        }
        let theta = p.pos.arg().rem_euclid(TAU);
        if angles.iter().any(|a| (a - theta).abs() * r <= 1e-12 * r.max(1.0)) {
            return Err(EndsError::StartOnSlit);
        }
        // Arc i runs from angles[i] to angles[i + 1]; the last one wraps.
        let i = angles.iter().rposition(|&a| a < theta).unwrap_or(angles.len() - 1);
        Ok(State { sheet: p.sheet, arc: i })
    }

    /// Counterclockwise step: returns the next state with the crossed slit
    /// index and its angle in `[0, 2pi)`.
    pub fn forward(&self, s: State) -> Option<(State, usize, f64)> {
        let proto = self.proto(s.sheet);
        let m = self.order[proto].len();
        if m == 0 {
            return None;
        }
        let k = (s.arc + 1) % m;
        let slit = self.order[proto][k];
        let next = self.c.partner(SideAddr { sheet: s.sheet, slit, side: Side::Bottom })?;
        let arc = self.arc_of_slit[self.proto(next.sheet)][next.slit];
        Some((State { sheet: next.sheet, arc }, slit, self.angles[proto][k]))
    }

    /// Clockwise step.
    pub fn backward(&self, s: State) -> Option<(State, usize, f64)> {
        let proto = self.proto(s.sheet);
        let m = self.order[proto].len();
        if m == 0 {
            return None;
        }
        let slit = self.order[proto][s.arc];
        let next = self.c.partner(SideAddr { sheet: s.sheet, slit, side: Side::Top })?;
        let np = self.proto(next.sheet);
        let len = self.order[np].len();
        let arc = (self.arc_of_slit[np][next.slit] + len - 1) % len;
        Some((State { sheet: next.sheet, arc }, slit, self.angles[proto][s.arc]))
    }

    pub fn core_states(&self) -> Vec<State> {
        (0..self.c.core_sheets().len())
            .flat_map(|i| {
                let sheet = SheetAddr::Core(i);
                (0..self.arcs(sheet)).map(move |arc| State { sheet, arc })
            })
            .collect()
    }

    fn budget(&self, start: State) -> u64 {
        let extra = match start.sheet {
            SheetAddr::Copy { k, .. } => k,
            SheetAddr::Core(_) => 0,
        };
        4 * (self.core_states().len() as u64 + self.c.families().len() as u64 + 2) + extra
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Dir {
    Forward,
    Backward,
}

/// One walk from a start state in one direction.
pub(crate) struct Walk {
    /// States visited, starting with the start state.
    pub states: Vec<State>,
    /// `(slit, angle)` of each crossing; `crossings[i]` leads from
    /// `states[i]` to `states[i + 1]`.
    pub crossings: Vec<(usize, f64)>,
    pub end: WalkEnd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum WalkEnd {
    /// Returned to the start state.
    Closed,
    /// Copy index of this family kept increasing.
    Escaped(usize),
}

pub(crate) fn walk(g: &CircleGeometry, start: State, dir: Dir) -> Result<Walk, EndsError> {
    let mut states = vec![start];
    let mut crossings = Vec::new();
    let mut seen: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut cur = start;
    for _ in 0..g.budget(start) {
        let step = match dir {
            Dir::Forward => g.forward(cur),
            Dir::Backward => g.backward(cur),
        };
        let Some((next, slit, angle)) = step else {
            if g.arcs(cur.sheet) == 1 && g.order[g.proto(cur.sheet)].is_empty() {
                // A slit-free sheet: the whole circle is one arc.
                return Ok(Walk { states, crossings, end: WalkEnd::Closed });
            }
            return Err(EndsError::Unglued(g.c.sheet_name(cur.sheet)));
        };
        crossings.push((slit, angle));
        if next == start {
            return Ok(Walk { states, crossings, end: WalkEnd::Closed });
        }
        if let SheetAddr::Copy { family, k } = next.sheet {
            match seen.get(&(family, next.arc)) {
                Some(&k0) if k > k0 => {
                    states.push(next);
                    return Ok(Walk { states, crossings, end: WalkEnd::Escaped(family) });
                }
                _ => {
                    seen.insert((family, next.arc), k);
                }
            }
        }
        states.push(next);
        cur = next;
    }
    Err(EndsError::LiftBudget)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LiftKind {
    Periodic { degree: u64 },
    Escaping { w_minus: String, w_plus: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircleCrossing {
    /// Unwrapped angle `t` of `R e^{it}` at the crossing; the start has
    /// `t` in `[0, 2pi)` and backward crossings lie below it.
    pub angle: f64,
    pub slit: String,
    /// Side crossed, on the sheet left when walking away from the start:
    /// bottom after the start, top before it.
    pub side: Side,
    /// Sheet entered when walking away from the start.
    pub entered: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircleLift {
    pub radius: f64,
    pub start_sheet: String,
    pub start: [f64; 2],
    pub outcome: LiftKind,
    pub crossings: Vec<CircleCrossing>,
}

/// Unwraps crossing angles: each forward crossing is the first angle past
/// the current position, each backward crossing the last one before it.
fn unwrap(mut pos: f64, angles: impl Iterator<Item = f64>, dir: Dir) -> Vec<f64> {
    angles
        .map(|a| {
            let turns = match dir {
                Dir::Forward => ((pos - a) / TAU).floor() + 1.0,
                Dir::Backward => ((pos - a) / TAU).ceil() - 1.0,
            };
            pos = a + TAU * turns;
            pos
        })
        .collect()
}

/// Lifts `t -> R e^{it}` from `start` in both directions.
pub fn lift_circle(c: &SheetComplex, r: f64, start: SheetPoint) -> Result<CircleLift, EndsError> {
    let g = CircleGeometry::new(c, r)?;
    let s0 = g.locate(start, r)?;
    let theta = start.pos.arg().rem_euclid(TAU);
    let slit_name = |sheet: SheetAddr, slit: usize| c.slits_of(sheet)[slit].id.clone();

    let fwd = walk(&g, s0, Dir::Forward)?;
    let fwd_angles = unwrap(theta, fwd.crossings.iter().map(|x| x.1), Dir::Forward);
    let mut crossings: Vec<CircleCrossing> = fwd
        .crossings
        .iter()
        .zip(&fwd_angles)
        .enumerate()
        .map(|(i, ((slit, _), &angle))| CircleCrossing {
            angle,
            slit: slit_name(fwd.states[i].sheet, *slit),
            side: Side::Bottom,
            // A closed walk ends by re-entering the start state.
            entered: c.sheet_name(fwd.states.get(i + 1).unwrap_or(&fwd.states[0]).sheet),
        })
        .collect();

    let outcome = match fwd.end {
        WalkEnd::Closed => LiftKind::Periodic { degree: fwd.states.iter().filter(|s| g.wraps(**s)).count() as u64 },
        WalkEnd::Escaped(plus) => {
            let bwd = walk(&g, s0, Dir::Backward)?;
            let WalkEnd::Escaped(minus) = bwd.end else {
                return Err(EndsError::Inconsistent("backward lift closed while forward lift escaped".into()));
            };
            let bwd_angles = unwrap(theta, bwd.crossings.iter().map(|x| x.1), Dir::Backward);
            let mut back: Vec<CircleCrossing> = bwd
                .crossings
                .iter()
                .zip(&bwd_angles)
                .enumerate()
                .map(|(i, ((slit, _), &angle))| CircleCrossing {
                    angle,
                    slit: slit_name(bwd.states[i].sheet, *slit),
                    side: Side::Top,
                    entered: c.sheet_name(bwd.states[i + 1].sheet),
                })
                .collect();
            back.reverse();
            back.append(&mut crossings);
            crossings = back;
            let fam = |f: usize| c.rams()[c.families()[f].ram].id.clone();
            debug_assert_eq!(c.families()[plus].orientation, Orientation::Plus);
            debug_assert_eq!(c.families()[minus].orientation, Orientation::Minus);
            LiftKind::Escaping { w_minus: fam(minus), w_plus: fam(plus) }
        }
    };
    Ok(CircleLift {
        radius: r,
        start_sheet: c.sheet_name(start.sheet),
        start: [start.pos.re, start.pos.im],
        outcome,
        crossings,
    })
}
