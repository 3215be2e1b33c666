#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use logsurf::ends::{classify_ends, lift_circle, LiftKind};
use logsurf::sheet_complex::{CoreSheet, RamPoint, SheetAddr, SheetPoint, SheetProto, Side, SideRef, Slit};
use logsurf::skeleton::{components, skeleton};
use logsurf::{build_model_surface, validate, Complex64, Order, SheetComplex};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn z(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Generic parameters for the model with `n` infinite-order points.
pub fn model_inputs(n: usize) -> (Complex64, Vec<Complex64>, Complex64) {
    let w_list = (0..n).map(|j| Complex64::from_polar(1.0 + 0.15 * j as f64, 0.4 + TAU * j as f64 / n as f64 + 0.1 * (j * j) as f64)).collect();
    (z(0.11, -0.07), w_list, z(-0.7, 0.45))
}

pub fn model(n: usize, k: i64) -> SheetComplex {
    let (z0, w, wc) = model_inputs(n);
    build_model_surface(z0, &w, wc, k).expect("grid model builds")
}

/// The full model grid `n in 1..=4`, `K in -3..=3`.
pub fn grid() -> impl Iterator<Item = (usize, i64)> {
    (1..=4).flat_map(|n| (-3..=3).map(move |k| (n, k)))
}

/// A random model surface with parameters drawn from `rng`.
pub fn random_model<R: Rng>(rng: &mut R) -> (SheetComplex, usize, i64) {
    loop {
        let n = rng.gen_range(1..=4);
        let k = rng.gen_range(-3..=3);
        let p = |rng: &mut R| z(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let w: Vec<Complex64> = (0..n).map(|_| p(rng)).collect();
        if let Ok(c) = build_model_surface(p(rng), &w, p(rng), k) {
            return (c, n, k);
        }
    }
}

/// Independent description of a finite branched cover of the plane.
pub struct CoverOracle {
    pub sheets: usize,
    /// Cycle lengths of the monodromy around a large circle.
    pub at_infinity: Vec<usize>,
    pub genus: i64,
}

fn cycles(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for s in 0..perm.len() {
        if seen[s] {
            continue;
        }
        let mut cyc = vec![s];
        seen[s] = true;
        let mut x = perm[s];
        while x != s {
            seen[x] = true;
            cyc.push(x);
            x = perm[x];
        }
        out.push(cyc);
    }
    out
}

/// A connected branched cover with `d` sheets over `r` branch values, each
/// slit carrying a random permutation. Crossing a slit counterclockwise
/// moves sheet `s` to `perm(s)`; sheets fixed by `perm` carry no slit.
pub fn random_cover<R: Rng>(rng: &mut R, d: usize, r: usize) -> (SheetComplex, CoverOracle) {
    'retry: loop {
        let z0 = z(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
        let feet: Vec<Complex64> = (0..r).map(|_| Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..TAU))).collect();
        let perms: Vec<Vec<usize>> = (0..r)
            .map(|_| loop {
                let mut p: Vec<usize> = (0..d).collect();
                p.shuffle(rng);
                if p.iter().enumerate().any(|(i, &x)| i != x) {
                    break p;
                }
            })
            .collect();
        let mut rams = Vec::new();
        // ram index of (slit, sheet)
        let mut ram_of = BTreeMap::new();
        for (i, p) in perms.iter().enumerate() {
            for cyc in cycles(p).into_iter().filter(|c| c.len() > 1) {
                for &s in &cyc {
                    ram_of.insert((i, s), rams.len());
                }
                rams.push(RamPoint { id: format!("b{i}.{}", cyc[0]), projection: feet[i], order: Order::Finite(cyc.len() as u32) });
            }
        }
        let mut protos = Vec::new();
        let mut slit_ix = BTreeMap::new();
        for s in 0..d {
            let mut slits = Vec::new();
            for i in 0..r {
                if let Some(&ram) = ram_of.get(&(i, s)) {
                    slit_ix.insert((i, s), slits.len());
                    slits.push(Slit { id: format!("l{i}"), foot: feet[i], ram });
                }
            }
            protos.push(SheetProto { id: format!("P{s}"), slits });
        }
        let sheets = (0..d).map(|s| CoreSheet { id: format!("S{s}"), proto: s }).collect();
        let mut gluing = Vec::new();
        for (i, p) in perms.iter().enumerate() {
            for s in 0..d {
                if p[s] != s {
                    gluing.push((
                        SideRef { sheet: s, slit: slit_ix[&(i, s)], side: Side::Bottom },
                        SideRef { sheet: p[s], slit: slit_ix[&(i, p[s])], side: Side::Top },
                    ));
                }
            }
        }
        let Ok(c) = SheetComplex::from_parts(z0, protos, sheets, vec![], gluing, rams) else { continue 'retry };
        if !validate(&c).ok || components(&skeleton(&c).unwrap()).len() != 1 {
            continue 'retry;
        }
        // Monodromy at infinity: compose the slit permutations in the order
        // their rays cross a large circle.
        let big = 10.0;
        let mut order: Vec<(f64, usize)> = feet.iter().enumerate().map(|(i, &f)| (ray_angle(z0, f, big), i)).collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut total: Vec<usize> = (0..d).collect();
        for &(_, i) in &order {
            total = total.iter().map(|&s| perms[i][s]).collect();
        }
        let at_infinity: Vec<usize> = cycles(&total).iter().map(Vec::len).collect();
        let branching: usize = perms.iter().map(|p| cycles(p).iter().map(|c| c.len() - 1).sum::<usize>()).sum::<usize>()
            + at_infinity.iter().map(|l| l - 1).sum::<usize>();
        let euler = 2 * d as i64 - branching as i64;
        return (c, CoverOracle { sheets: d, at_infinity, genus: (2 - euler) / 2 });
    }
}

/// Angle at which the slit ray from `foot` (pointing away from `z0`) meets
/// the circle of radius `r`, found by bisection on the ray parameter.
pub fn ray_angle(z0: Complex64, foot: Complex64, r: f64) -> f64 {
    let d = (foot - z0) / (foot - z0).norm();
    let (mut lo, mut hi) = (0.0, 4.0 * r);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (foot + d * mid).norm() < r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (foot + d * lo).arg().rem_euclid(TAU)
}

/// What a sweep of circle lifts over every arc of every core sheet sees.
#[derive(Debug, PartialEq, Eq)]
pub struct LiftCensus {
    /// Degrees of the distinct periodic lifts, sorted.
    pub periodic: Vec<u64>,
    /// `w_minus -> w_plus` of the escaping lifts.
    pub u: BTreeMap<String, String>,
}

pub fn brute_force_lifts(c: &SheetComplex, r: f64) -> LiftCensus {
    let mut periodic: BTreeMap<Vec<(String, String)>, u64> = BTreeMap::new();
    let mut u = BTreeMap::new();
    for (i, sheet) in c.core_sheets().iter().enumerate() {
        let mut angles: Vec<f64> = c.protos()[sheet.proto].slits.iter().map(|s| ray_angle(c.z0(), s.foot, r)).collect();
        angles.sort_by(f64::total_cmp);
        let mids: Vec<f64> = if angles.is_empty() {
            vec![0.3]
        } else {
            (0..angles.len())
                .map(|j| {
                    let next = if j + 1 < angles.len() { angles[j + 1] } else { angles[0] + TAU };
                    0.5 * (angles[j] + next)
                })
                .collect()
        };
        for phi in mids {
            let start = SheetPoint { sheet: SheetAddr::Core(i), pos: Complex64::from_polar(r, phi) };
            let lift = lift_circle(c, r, start).expect("circle lift");
            match lift.outcome {
                LiftKind::Periodic { degree } => {
                    let mut key: Vec<(String, String)> = lift.crossings.iter().map(|x| (x.entered.clone(), x.slit.clone())).collect();
                    if key.is_empty() {
                        key.push((lift.start_sheet.clone(), String::new()));
                    }
                    key.sort();
                    key.dedup();
                    periodic.insert(key, degree);
                }
                LiftKind::Escaping { w_minus, w_plus } => {
                    let prev = u.insert(w_minus.clone(), w_plus.clone());
                    assert!(prev.is_none() || prev.as_deref() == Some(w_plus.as_str()), "u is not a function at {w_minus}");
                }
            }
        }
    }
    let mut periodic: Vec<u64> = periodic.into_values().collect();
    periodic.sort();
    LiftCensus { periodic, u }
}

/// The same census read off `classify_ends`.
pub fn classified_lifts(c: &SheetComplex) -> LiftCensus {
    let e = classify_ends(c).expect("ends");
    let mut periodic: Vec<u64> = e
        .ends
        .iter()
        .filter_map(|d| match d {
            logsurf::ends::EndDescriptor::FiniteCover { degree } => Some(*degree),
            _ => None,
        })
        .collect();
    periodic.sort();
    LiftCensus { periodic, u: e.u }
}

/// Two sheets glued crosswise along three slits: a torus with one
/// puncture over infinity.
pub fn torus() -> SheetComplex {
    let feet = [z(1.0, 0.2), z(-0.6, 1.1), z(-0.4, -1.3)];
    let rams: Vec<RamPoint> =
        feet.iter().enumerate().map(|(i, &f)| RamPoint { id: format!("t{i}"), projection: f, order: Order::Finite(2) }).collect();
    let slits: Vec<Slit> = feet.iter().enumerate().map(|(i, &f)| Slit { id: format!("l{i}"), foot: f, ram: i }).collect();
    let protos = vec![SheetProto { id: "P".into(), slits }];
    let sheets = vec![CoreSheet { id: "A".into(), proto: 0 }, CoreSheet { id: "B".into(), proto: 0 }];
    let mut gluing = Vec::new();
    for i in 0..3 {
        gluing.push((SideRef { sheet: 0, slit: i, side: Side::Bottom }, SideRef { sheet: 1, slit: i, side: Side::Top }));
        gluing.push((SideRef { sheet: 1, slit: i, side: Side::Bottom }, SideRef { sheet: 0, slit: i, side: Side::Top }));
    }
    SheetComplex::from_parts(z(0.05, 0.0), protos, sheets, vec![], gluing, rams).unwrap()
}
