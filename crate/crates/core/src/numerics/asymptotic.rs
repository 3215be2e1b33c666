use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use super::{ExpForm, Laurent, NumericsError, Piece};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticValue {
    pub sector: usize,
    /// Direction of the ray, in `[0, 2 pi)`.
    pub direction: f64,
    pub value: Complex64,
    pub est_error: f64,
}

/// Bisectors of the sectors in which the leading term of `P` has negative
/// real part.
pub fn descent_directions(p: &Laurent<Complex64>) -> Vec<f64> {
    let n = p.degree().unwrap_or(0).max(1) as usize;
    let arg = p.leading().arg();
    (0..n).map(|s| ((PI - arg + TAU * s as f64) / n as f64).rem_euclid(TAU)).collect()
}

/// Result of integrating along a ray until the tail is certified small.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RayIntegral {
    pub value: Complex64,
    pub est_error: f64,
    /// Parameter at which the tail bound was established.
    pub reach: f64,
}

/// `int_{start}^{start + inf u} f`, integrating over `[0, first]` and then
/// doubling chunks. After each chunk the tail beyond `t` is bounded by
/// `g(t) / lambda(t)`, valid when the logarithmic decay rate `lambda` of the
/// envelope `g` does not drop below `lambda(t) > 0` further out (checked at
/// `1.5t`, `2t` and `4t`). Returns `None` if no bound below
/// `tol * max(1, |value|)` is reached within `max_chunks` chunks.
pub(crate) fn integrate_ray(
    f: &ExpForm,
    start: Complex64,
    u: Complex64,
    first: f64,
    tol: f64,
    max_chunks: usize,
) -> Result<Option<RayIntegral>, NumericsError> {
    let (mut value, mut est_error) = (Complex64::new(0.0, 0.0), 0.0);
    let (mut lo, mut hi) = (0.0, first);
    let at = |t: f64| start + u * t;
    for _ in 0..max_chunks {
        let chunk = f.integrate_pieces(&[Piece::Segment(at(lo), at(hi))], 0.1 * tol)?;
        value += chunk.value;
        est_error += chunk.est_error;
        let rate = f.decay_rate(at(hi), u);
        let steady = [1.5, 2.0, 4.0].iter().all(|s| f.decay_rate(at(hi * s), u) >= rate);
        if rate > 0.0 && steady {
            let tail = f.envelope(at(hi)) / rate;
            if tail.is_finite() && tail + est_error <= tol * value.norm().max(1.0) {
                return Ok(Some(RayIntegral { value, est_error: est_error + tail, reach: hi }));
            }
        }
        (lo, hi) = (hi, 2.0 * hi);
    }
    Ok(None)
}

/// Limits of the primitive from `base` along the `n` descent directions.
pub fn asymptotic_values(f: &ExpForm, base: Complex64, tol: f64) -> Result<Vec<AsymptoticValue>, NumericsError> {
    if f.has_pole() {
        return Err(NumericsError::Precondition("Q must be a polynomial".into()));
    }
    if !(tol > 0.0) {
        return Err(NumericsError::Precondition(format!("tolerance {tol} must be positive")));
    }
    let first = 1.0 + base.norm();
    descent_directions(f.p())
        .into_iter()
        .enumerate()
        .map(|(sector, direction)| {
            let u = Complex64::from_polar(1.0, direction);
            let ray = integrate_ray(f, base, u, first, tol, 64)?.ok_or(NumericsError::TailNotDecaying { sector })?;
            Ok(AsymptoticValue { sector, direction, value: ray.value, est_error: ray.est_error })
        })
        .collect()
}
