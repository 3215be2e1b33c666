use num_complex::Complex64;

use super::{cross, SheetAddr, SheetComplex, SheetPoint, Side, SideAddr, SurfaceError, TANGENCY_TOL};

/// Portion of a lifted segment lying on one sheet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftPiece {
    pub sheet: SheetAddr,
    pub from: Complex64,
    pub to: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LiftOutcome {
    Reached(SheetPoint),
    /// The segment ran into the foot of `ram` after travelling `arc_length`.
    HitRamification { ram: usize, arc_length: f64 },
    CrossingBudgetExceeded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftedPath {
    pub pieces: Vec<LiftPiece>,
    pub outcome: LiftOutcome,
}

enum Hit {
    Foot,
    Crossing(Side),
}

/// Where the line `a + t e` meets the ray from `foot` in direction `d`.
/// Returns the parameter `t` and whether the hit is at the foot or the
/// interior, or `None` if they miss. Runs along the ray are degenerate.
fn meet(a: Complex64, e: Complex64, foot: Complex64, d: Complex64) -> Result<Option<(f64, Hit)>, SurfaceError> {
    let len = e.norm();
    let denom = cross(e, d);
    let fa = foot - a;
    if denom.abs() <= TANGENCY_TOL * len {
        // Parallel: touches only if collinear.
        if cross(fa, e).abs() / len > TANGENCY_TOL * (1.0 + fa.norm()) {
            return Ok(None);
        }
        let t_foot = (fa.re * e.re + fa.im * e.im) / (len * len);
        let along = e.re * d.re + e.im * d.im;
        // Moving toward the foot from outside the ray: the foot is hit first.
        if along < 0.0 && t_foot <= 0.0 || along > 0.0 && t_foot > 1.0 {
            return Ok(None);
        }
        if along > 0.0 && t_foot > 0.0 {
            return Ok(Some((t_foot, Hit::Foot)));
        }
        return Err(SurfaceError::DegenerateLift("segment runs along a slit ray".into()));
    }
    let t = cross(fa, d) / denom;
    let u = cross(fa, e) / denom;
    let scale = 1.0 + foot.norm();
    if u < -TANGENCY_TOL * scale {
        return Ok(None);
    }
    if u <= TANGENCY_TOL * scale {
        return Ok(Some((t, Hit::Foot)));
    }
    // Crossing from the left of `d` to its right touches the top side first.
    let side = if denom > 0.0 { Side::Top } else { Side::Bottom };
    Ok(Some((t, Hit::Crossing(side))))
}

fn check_point(c: &SheetComplex, p: SheetPoint) -> Result<(), SurfaceError> {
    let exists = match p.sheet {
        SheetAddr::Core(i) => i < c.core_sheets().len(),
        SheetAddr::Copy { family, k } => family < c.families().len() && k >= 1,
    };
    if !exists {
        return Err(SurfaceError::InvalidPoint("unknown sheet address".into()));
    }
    if !(p.pos.re.is_finite() && p.pos.im.is_finite()) {
        return Err(SurfaceError::InvalidPoint("non-finite position".into()));
    }
    for s in c.slits_of(p.sheet) {
        if on_ray(c, p.pos, s.foot) {
            return Err(SurfaceError::InvalidPoint(format!("{} lies on slit {}", p.pos, s.id)));
        }
    }
    Ok(())
}

fn on_ray(c: &SheetComplex, z: Complex64, foot: Complex64) -> bool {
    let d = c.ray_direction(foot);
    let v = z - foot;
    let along = v.re * d.re + v.im * d.im;
    along >= -TANGENCY_TOL && cross(d, v).abs() <= TANGENCY_TOL * (1.0 + foot.norm())
}

/// Lifts the straight segment from `start` to `target`, crossing slits
/// according to the gluing, for at most `max_crossings` crossings.
pub fn lift_segment(
    c: &SheetComplex,
    start: SheetPoint,
    target: Complex64,
    max_crossings: i64,
) -> Result<LiftedPath, SurfaceError> {
    if max_crossings <= 0 {
        return Err(SurfaceError::NonPositiveBudget);
    }
    check_point(c, start)?;
    let a = start.pos;
    let e = target - a;
    if !(target.re.is_finite() && target.im.is_finite()) || e.norm() == 0.0 {
        return Err(SurfaceError::InvalidPoint("target must be finite and differ from the start".into()));
    }
    let at = |t: f64| if t >= 1.0 { target } else { a + e * t };

    let mut pieces = Vec::new();
    let mut sheet = start.sheet;
    let mut t_cur = 0.0;
    let mut entered: Option<Complex64> = None;
    let mut crossings = 0i64;
    loop {
        let mut best: Option<(f64, usize, Hit)> = None;
        for (i, s) in c.slits_of(sheet).iter().enumerate() {
            if entered.is_some_and(|f| f == s.foot) {
                continue;
            }
            let Some((t, hit)) = meet(a, e, s.foot, c.ray_direction(s.foot))? else { continue };
            if t <= t_cur || t > 1.0 + TANGENCY_TOL {
                continue;
            }
            if best.as_ref().map_or(true, |b| t < b.0) {
                best = Some((t, i, hit));
            }
        }
        let Some((t, slit, hit)) = best else {
            pieces.push(LiftPiece { sheet, from: at(t_cur), to: target });
            return Ok(LiftedPath { pieces, outcome: LiftOutcome::Reached(SheetPoint { sheet, pos: target }) });
        };
        let foot = c.slits_of(sheet)[slit].foot;
        match hit {
            Hit::Foot => {
                pieces.push(LiftPiece { sheet, from: at(t_cur), to: foot });
                let ram = c.slits_of(sheet)[slit].ram;
                return Ok(LiftedPath {
                    pieces,
                    outcome: LiftOutcome::HitRamification { ram, arc_length: (foot - a).norm() },
                });
            }
            Hit::Crossing(_) if t >= 1.0 - TANGENCY_TOL => {
                return Err(SurfaceError::InvalidPoint(format!("target {target} lies on a slit")));
            }
            Hit::Crossing(side) => {
                if crossings == max_crossings {
                    pieces.push(LiftPiece { sheet, from: at(t_cur), to: at(t) });
                    return Ok(LiftedPath { pieces, outcome: LiftOutcome::CrossingBudgetExceeded });
                }
                let next = c
                    .partner(SideAddr { sheet, slit, side })
                    .ok_or_else(|| SurfaceError::Invalid(format!("slit side on {} is not glued", c.sheet_name(sheet))))?;
                pieces.push(LiftPiece { sheet, from: at(t_cur), to: at(t) });
                crossings += 1;
                sheet = next.sheet;
                t_cur = t;
                entered = Some(foot);
            }
        }
    }
}
