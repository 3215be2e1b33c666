use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{cross, Order, Orientation, SheetAddr, SheetComplex, Side, SideAddr, SideRef, GENERICITY_TOL};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub invariant: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn has(&self, invariant: &str) -> bool {
        self.violations.iter().any(|v| v.invariant == invariant)
    }
}

struct Collector(Vec<Violation>);

impl Collector {
    fn push(&mut self, invariant: &'static str, detail: String) {
        self.0.push(Violation { invariant, detail });
    }
}

/// Checks every structural invariant of a sheet complex. Violations are
/// returned as data; the function never fails.
pub fn validate(c: &SheetComplex) -> ValidationReport {
    let mut v = Collector(Vec::new());
    check_rams_and_slits(c, &mut v);
    check_genericity(c, &mut v);
    check_involution(c, &mut v);
    check_families(c, &mut v);
    check_cycles(c, &mut v);
    ValidationReport { ok: v.0.is_empty(), violations: v.0 }
}

fn side_name(c: &SheetComplex, s: &SideRef) -> String {
    let sheet = &c.core_sheets[s.sheet];
    format!("{}/{}/{}", sheet.id, c.protos[sheet.proto].slits[s.slit].id, s.side)
}

fn check_rams_and_slits(c: &SheetComplex, v: &mut Collector) {
    for r in &c.rams {
        if let Order::Finite(n) = r.order {
            if n < 2 {
                v.push("order-invalid", format!("ram {} registered with order {n}; regular points are not ramification points", r.id));
            }
        }
        if (r.projection - c.z0).norm() <= GENERICITY_TOL {
            v.push("foot-z0", format!("ram {} projects onto z0", r.id));
        }
    }
    for p in &c.protos {
        for s in &p.slits {
            let ram = &c.rams[s.ram];
            if (s.foot - ram.projection).norm() > GENERICITY_TOL {
                v.push("foot-mismatch", format!("slit {}/{} foot differs from projection of {}", p.id, s.id, ram.id));
            }
        }
        for (i, a) in p.slits.iter().enumerate() {
            for b in &p.slits[i + 1..] {
                let overlap = if (a.foot - b.foot).norm() <= GENERICITY_TOL {
                    true
                } else {
                    let da = a.foot - c.z0;
                    let db = b.foot - c.z0;
                    // Rays point away from z0; they meet only if z0, a, b are
                    // collinear with a and b on the same side of z0.
                    (cross(da, db) / (da.norm() * db.norm())).abs() * da.norm().min(db.norm()) <= GENERICITY_TOL
                        && (da.re * db.re + da.im * db.im) > 0.0
                };
                if overlap {
                    v.push("slit-overlap", format!("slits {}/{} and {}/{} intersect", p.id, a.id, p.id, b.id));
                }
            }
        }
    }
}

fn check_genericity(c: &SheetComplex, v: &mut Collector) {
    for (i, a) in c.rams.iter().enumerate() {
        for b in &c.rams[i + 1..] {
            let ab = b.projection - a.projection;
            if ab.norm() <= GENERICITY_TOL {
                continue;
            }
            let dist = cross(ab, c.z0 - a.projection).abs() / ab.norm();
            if dist <= GENERICITY_TOL {
                v.push("z0-genericity", format!("z0 lies on the line through {} and {}", a.id, b.id));
            }
        }
    }
}

fn check_involution(c: &SheetComplex, v: &mut Collector) {
    let mut uses: BTreeMap<SideRef, usize> = BTreeMap::new();
    for (a, b) in &c.gluing {
        if a == b {
            v.push("involution-fixed-point", format!("side {} glued to itself", side_name(c, a)));
        }
        *uses.entry(*a).or_default() += 1;
        *uses.entry(*b).or_default() += 1;
        let sa = &c.slits_of(SheetAddr::Core(a.sheet))[a.slit];
        let sb = &c.slits_of(SheetAddr::Core(b.sheet))[b.slit];
        if sa.ram != sb.ram || (sa.foot - sb.foot).norm() > GENERICITY_TOL {
            v.push("foot-mismatch", format!("glued sides {} and {} have different feet", side_name(c, a), side_name(c, b)));
        }
        if a.side == b.side {
            v.push("side-labels", format!("glued sides {} and {} are both {}", side_name(c, a), side_name(c, b), a.side));
        }
    }
    for f in &c.families {
        *uses.entry(f.attach).or_default() += 1;
    }
    for (s, n) in &uses {
        if *n > 1 {
            v.push("two-star-bound", format!("side {} is used {n} times", side_name(c, s)));
        }
    }
    for (si, sheet) in c.core_sheets.iter().enumerate() {
        for slit in 0..c.protos[sheet.proto].slits.len() {
            for side in [Side::Top, Side::Bottom] {
                let r = SideRef { sheet: si, slit, side };
                if !uses.contains_key(&r) {
                    v.push("involution-incomplete", format!("side {} is neither glued nor attached", side_name(c, &r)));
                }
            }
        }
    }
}

fn check_families(c: &SheetComplex, v: &mut Collector) {
    for f in &c.families {
        let proto = &c.protos[f.proto];
        if proto.slits.len() != 1 || proto.slits[f.chain_slit].ram != f.ram {
            v.push("family-shape", format!("family {} must repeat a sheet whose only slit ends at {}", f.id, c.rams[f.ram].id));
        }
        let attach_slit = &c.slits_of(SheetAddr::Core(f.attach.sheet))[f.attach.slit];
        let want = match f.orientation {
            Orientation::Plus => Side::Bottom,
            Orientation::Minus => Side::Top,
        };
        if attach_slit.ram != f.ram || f.attach.side != want {
            v.push("family-attach", format!("family {} must attach to a {want} side over {}", f.id, c.rams[f.ram].id));
        }
    }
    for (ri, r) in c.rams.iter().enumerate() {
        let plus = c.families_of(ri).filter(|(_, f)| f.orientation == Orientation::Plus).count();
        let minus = c.families_of(ri).filter(|(_, f)| f.orientation == Orientation::Minus).count();
        let ok = match r.order {
            Order::Infinite => plus == 1 && minus == 1,
            Order::Finite(_) => plus == 0 && minus == 0,
        };
        if !ok {
            v.push("family-count", format!("ram {} ({}) has {plus} plus and {minus} minus families", r.id, r.order));
        }
    }
}

/// Walks counterclockwise around each foot and compares the closing length
/// with the registered order.
fn check_cycles(c: &SheetComplex, v: &mut Collector) {
    for (ri, r) in c.rams.iter().enumerate() {
        let sides: BTreeSet<usize> = (0..c.core_sheets.len())
            .filter(|&s| c.slit_with_ram(SheetAddr::Core(s), ri).is_some())
            .collect();
        if sides.is_empty() {
            v.push("ram-unused", format!("ram {} is the foot of no core slit", r.id));
            continue;
        }
        match walk_around(c, ri) {
            Walk::Cycle(visited) => {
                let n = visited.len();
                if r.order != Order::Finite(n as u32) {
                    v.push("cycle-order", format!("walk around {} closes after {} side-crossings but order is {}", r.id, 2 * n, r.order));
                }
                if visited.iter().copied().collect::<BTreeSet<_>>() != sides {
                    v.push("cycle-order", format!("sheets over {} split into several cycles", r.id));
                }
            }
            Walk::Line(visited) => {
                if r.order != Order::Infinite {
                    v.push("cycle-order", format!("walk around {} runs into half-line families but order is {}", r.id, r.order));
                }
                if visited.iter().copied().collect::<BTreeSet<_>>() != sides {
                    v.push("cycle-order", format!("sheets over {} are not on a single line", r.id));
                }
            }
            Walk::Broken => {
                v.push("cycle-order", format!("walk around {} neither closes nor reaches its plus family", r.id));
            }
        }
    }
}

pub(crate) enum Walk {
    /// Core sheets visited counterclockwise, closing up.
    Cycle(Vec<usize>),
    /// Core sheets from the minus attachment to the plus attachment.
    Line(Vec<usize>),
    Broken,
}

/// Counterclockwise walk around the foot `ram` through core sheets.
pub(crate) fn walk_around(c: &SheetComplex, ram: usize) -> Walk {
    let start = match c.families_of(ram).find(|(_, f)| f.orientation == Orientation::Minus) {
        Some((_, f)) => Some((f.attach.sheet, true)),
        None => (0..c.core_sheets.len())
            .find(|&s| c.slit_with_ram(SheetAddr::Core(s), ram).is_some())
            .map(|s| (s, false)),
    };
    let Some((first, is_line)) = start else { return Walk::Broken };
    let mut visited = vec![first];
    let mut cur = first;
    for _ in 0..=c.core_sheets.len() {
        let Some(slit) = c.slit_with_ram(SheetAddr::Core(cur), ram) else { return Walk::Broken };
        let Some(next) = c.partner(SideAddr { sheet: SheetAddr::Core(cur), slit, side: Side::Bottom }) else {
            return Walk::Broken;
        };
        match next.sheet {
            SheetAddr::Core(s) => {
                if s == first && !is_line {
                    return Walk::Cycle(visited);
                }
                if visited.contains(&s) {
                    return Walk::Broken;
                }
                visited.push(s);
                cur = s;
            }
            SheetAddr::Copy { family, .. } => {
                let f = &c.families[family];
                return if is_line && f.ram == ram && f.orientation == Orientation::Plus {
                    Walk::Line(visited)
                } else {
                    Walk::Broken
                };
            }
        }
    }
    Walk::Broken
}
