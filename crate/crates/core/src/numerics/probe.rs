use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::asymptotic::integrate_ray;
use super::{integrate, ExpForm, NumericsError, Piece};

/// Doublings allowed when certifying a ray tail.
const MAX_CHUNKS: usize = 40;
/// Doublings allowed when shrinking the arc between two neighbouring rays.
const MAX_ARC_DOUBLINGS: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    /// Mean of the member limits.
    pub location: Complex64,
    pub rays: usize,
    /// Largest distance between two member limits.
    pub diameter: f64,
    /// Smallest member ray index.
    pub first_ray: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub rays: usize,
    /// Point at which the primitive vanishes.
    pub base: Complex64,
    pub clusters: Vec<Cluster>,
    /// Rays whose tail could not be certified finite.
    pub unclustered: usize,
    /// Limit along every ray, where it exists.
    pub limits: Vec<Option<Complex64>>,
}

struct RayLimit {
    value: Complex64,
    /// Modulus at which the tail bound holds.
    reach: f64,
}

fn angle(k: usize, n_rays: usize) -> f64 {
    TAU * (k as f64 + 0.5) / n_rays as f64
}

/// Finds the points added by the flat-metric completion over `|z| > R`.
///
/// The primitive is normalised at 0 when `Q` has no poles and at
/// `r0 = min(1, R)/2` otherwise, reaching the ray through `r0 e^{i theta}`
/// along the arc of radius `r0`. Along each of `n_rays` directions the
/// limit at infinity is computed when the envelope tail can be certified.
/// Neighbouring rays are linked when their limits lie within `cluster_tol`
/// and the arc joining them far out has flat length at most `cluster_tol`;
/// clusters are the linked groups.
pub fn completion_probe(f: &ExpForm, r: f64, n_rays: usize, cluster_tol: f64) -> Result<ProbeReport, NumericsError> {
    if !(r > 0.0) || n_rays < 64 || !(cluster_tol > 0.0) {
        return Err(NumericsError::Precondition("need R > 0, at least 64 rays and a positive tolerance".into()));
    }
    let tol = (1e-3 * cluster_tol).min(1e-9);
    let lead = f.p().leading();
    let n = f.n() as i32;
    let r0 = 0.5 * r.min(1.0);
    let base = if f.has_pole() { Complex64::new(r0, 0.0) } else { Complex64::new(0.0, 0.0) };

    let limits: Vec<Option<RayLimit>> = (0..n_rays)
        .into_par_iter()
        .map(|k| {
            let theta = angle(k, n_rays);
            let u = Complex64::from_polar(1.0, theta);
            if (lead * u.powi(n)).re >= -1e-12 * lead.norm() {
                return Ok(None);
            }
            let ray = if f.has_pole() {
                let head = [
                    Piece::Arc { centre: 0.0.into(), radius: r0, from: 0.0, to: theta },
                    Piece::Segment(u * r0, u * r),
                ];
                let head = f.integrate_pieces(&head, tol)?.value;
                integrate_ray(f, u * r, u, r, tol, MAX_CHUNKS)?
                    .map(|t| RayLimit { value: head + t.value, reach: r + t.reach })
            } else {
                integrate_ray(f, base, u, r, tol, MAX_CHUNKS)?.map(|t| RayLimit { value: t.value, reach: t.reach })
            };
            Ok(ray)
        })
        .collect::<Result<_, NumericsError>>()?;

    let links: Vec<bool> = (0..n_rays)
        .into_par_iter()
        .map(|k| {
            let j = (k + 1) % n_rays;
            let (Some(a), Some(b)) = (&limits[k], &limits[j]) else { return Ok(false) };
            if (a.value - b.value).norm() > cluster_tol {
                return Ok(false);
            }
            let (from, to) = (angle(k, n_rays), angle(k, n_rays) + TAU / n_rays as f64);
            let mut rho = a.reach.max(b.reach);
            for _ in 0..MAX_ARC_DOUBLINGS {
                let density = |x: Complex64| Complex64::new(f.envelope(Complex64::from_polar(rho, x.re)) * rho, 0.0);
                let len = integrate(density, &[Piece::Segment(from.into(), to.into())], 1e-6)?.value.re;
                if len <= cluster_tol {
                    return Ok(true);
                }
                if !len.is_finite() {
                    break;
                }
                rho *= 2.0;
            }
            Ok(false)
        })
        .collect::<Result<_, NumericsError>>()?;

    let mut groups: Vec<Vec<usize>> = Vec::new();
    // Walk the circle starting just after a break so that no group wraps.
    let start = (0..n_rays).find(|&k| !links[k]).map_or(0, |k| (k + 1) % n_rays);
    let mut current: Vec<usize> = Vec::new();
    for step in 0..n_rays {
        let k = (start + step) % n_rays;
        if limits[k].is_none() {
            continue;
        }
        current.push(k);
        if !links[k] {
            groups.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        groups.push(current);
    }
    let mut clusters: Vec<Cluster> = groups
        .into_iter()
        .map(|g| {
            let vals: Vec<Complex64> = g.iter().map(|&k| limits[k].as_ref().unwrap().value).collect();
            let location = vals.iter().sum::<Complex64>() / vals.len() as f64;
            let diameter = vals
                .iter()
                .enumerate()
                .flat_map(|(i, a)| vals[i + 1..].iter().map(move |b| (a - b).norm()))
                .fold(0.0, f64::max);
            Cluster { location, rays: g.len(), diameter, first_ray: *g.iter().min().unwrap() }
        })
        .collect();
    clusters.sort_by_key(|c| c.first_ray);
    let unclustered = limits.iter().filter(|l| l.is_none()).count();
    Ok(ProbeReport {
        rays: n_rays,
        base,
        clusters,
        unclustered,
        limits: limits.into_iter().map(|l| l.map(|l| l.value)).collect(),
    })
}
