use std::collections::BTreeMap;

use serde::Serialize;

use super::{cycles_of, ensure_valid, walk, CircleGeometry, Dir, EndsError, State, WalkEnd};
use crate::ends::default_radius;
use crate::sheet_complex::{walk_around, Order, Orientation, SheetAddr, SheetComplex, Walk};

/// Segment lengths measured on the core as given.
///
/// `a[w]` counts edges of the core segment of the line over `w`. `a_prime[w]`
/// counts the full turns made by the circle lift at infinity between leaving
/// the minus family of `w` and entering the plus family of `u(w)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawLengths {
    /// Infinite-order points, in registration order.
    pub rams: Vec<usize>,
    pub u: BTreeMap<usize, usize>,
    pub a: BTreeMap<usize, i64>,
    pub a_prime: BTreeMap<usize, i64>,
}

impl RawLengths {
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        cycles_of(&self.u)
    }

    /// Inverse of `u`.
    pub fn d(&self, w: usize) -> usize {
        *self.u.iter().find(|(_, &v)| v == w).expect("u is a permutation").0
    }

    /// Lengths after moving `minus` copies of the minus family and `plus`
    /// copies of the plus family of `w` into the core.
    pub fn extend(&mut self, w: usize, minus: i64, plus: i64) {
        *self.a.get_mut(&w).unwrap() += minus + plus;
        *self.a_prime.get_mut(&w).unwrap() += minus;
        let d = self.d(w);
        *self.a_prime.get_mut(&d).unwrap() += plus;
    }

    /// `a'_j - a_j` split as evenly as possible over each cycle.
    fn targets(&self, cycle: &[usize]) -> Vec<i64> {
        let n = cycle.len() as i64;
        let s: i64 = cycle.iter().map(|w| self.a_prime[w] - self.a[w]).sum();
        (0..n).map(|j| s.div_euclid(n) + i64::from(j < s.rem_euclid(n))).collect()
    }

    /// Smallest `c1` for which every target difference fits.
    pub fn required_c1(&self) -> i64 {
        self.cycles()
            .iter()
            .flat_map(|cy| self.targets(cy))
            .map(|t| (t.abs() + 1) / 2)
            .max()
            .unwrap_or(0)
    }
}

pub fn raw_lengths(c: &SheetComplex) -> Result<RawLengths, EndsError> {
    ensure_valid(c)?;
    let g = CircleGeometry::new(c, default_radius(c))?;
    let mut out = RawLengths { rams: Vec::new(), u: BTreeMap::new(), a: BTreeMap::new(), a_prime: BTreeMap::new() };
    for (ri, r) in c.rams().iter().enumerate() {
        if r.order != Order::Infinite {
            continue;
        }
        let (minus, _) = c
            .families_of(ri)
            .find(|(_, f)| f.orientation == Orientation::Minus)
            .ok_or_else(|| EndsError::Inconsistent(format!("{} has no minus family", r.id)))?;
        let w = walk(&g, State { sheet: SheetAddr::Copy { family: minus, k: 1 }, arc: 0 }, Dir::Forward)?;
        let WalkEnd::Escaped(plus) = w.end else {
            return Err(EndsError::Inconsistent(format!("lift from the minus family of {} closes", r.id)));
        };
        if c.families()[plus].orientation != Orientation::Plus {
            return Err(EndsError::Inconsistent(format!("lift from {} escapes into a minus family", r.id)));
        }
        let turns = w.states.iter().filter(|s| matches!(s.sheet, SheetAddr::Core(_)) && g.wraps(**s)).count();
        let Walk::Line(path) = walk_around(c, ri) else {
            return Err(EndsError::Inconsistent(format!("the sheets over {} do not form a line", r.id)));
        };
        out.rams.push(ri);
        out.u.insert(ri, c.families()[plus].ram);
        out.a.insert(ri, path.len() as i64 - 1);
        out.a_prime.insert(ri, turns as i64);
    }
    Ok(out)
}

/// Initial segments of the two half-lines over one infinite-order point that
/// are moved into the core.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HalfLines {
    pub ram: String,
    pub minus_family: String,
    pub plus_family: String,
    pub minus_extension: u64,
    pub plus_extension: u64,
}

/// A choice of finite core for which every segment length lies within `c1`
/// of `2N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoreDecomposition {
    #[serde(rename = "N")]
    pub big_n: i64,
    pub c1: i64,
    pub c2: i64,
    pub halflines: Vec<HalfLines>,
    pub a: BTreeMap<String, i64>,
    pub a_prime: BTreeMap<String, i64>,
    /// Number of sheets in the enlarged core.
    pub core_sheets: usize,
}

impl CoreDecomposition {
    /// The same surface with the chosen half-line segments stored as core
    /// sheets.
    pub fn materialize(&self, c: &SheetComplex) -> SheetComplex {
        let mut out = c.clone();
        for h in &self.halflines {
            for (id, count) in [(&h.minus_family, h.minus_extension), (&h.plus_family, h.plus_extension)] {
                let f = out.families().iter().position(|f| &f.id == id).expect("family exists");
                out = out.promote_copies(f, count as usize);
            }
        }
        out
    }
}

/// Enlarges the core along the half-lines so that all `a_j`, `a'_j` land in
/// `[2N - c1, 2N + c1]`, with `N` the least integer at least
/// `8 (#infinite + 1)(c1 + c2)` that keeps every extension non-negative.
pub fn core_decomposition(c: &SheetComplex, c1: i64, c2: i64) -> Result<CoreDecomposition, EndsError> {
    if c1 < 2 || c2 < 2 {
        return Err(EndsError::BadConstants { c1, c2 });
    }
    let raw = raw_lengths(c)?;
    let mut target = BTreeMap::new();
    let mut plus_ext: BTreeMap<usize, i64> = BTreeMap::new();
    for cyc in raw.cycles() {
        let t = raw.targets(&cyc);
        if let Some(&bad) = t.iter().find(|x| x.abs() > 2 * c1) {
            return Err(EndsError::SpreadTooLarge { c1, spread: bad });
        }
        // y_{j+1} = y_j + t_j - D_j keeps a'_j - a_j = t_j.
        let mut y = vec![0i64; cyc.len()];
        for j in 0..cyc.len() - 1 {
            let w = cyc[j];
            y[j + 1] = y[j] + t[j] - (raw.a_prime[&w] - raw.a[&w]);
        }
        let lo = *y.iter().min().unwrap();
        for (j, &w) in cyc.iter().enumerate() {
            plus_ext.insert(w, y[j] - lo);
            target.insert(w, t[j]);
        }
    }

    let mut big_n = 8 * (raw.rams.len() as i64 + 1) * (c1 + c2);
    for &w in &raw.rams {
        let need = raw.a[&w] + plus_ext[&w] + target[&w].div_euclid(2);
        big_n = big_n.max((need + 1).div_euclid(2));
    }

    let id = |r: usize| c.rams()[r].id.clone();
    let fam = |r: usize, o: Orientation| {
        c.families_of(r).find(|(_, f)| f.orientation == o).expect("infinite ram has both families").1.id.clone()
    };
    let mut halflines = Vec::new();
    let mut a = BTreeMap::new();
    let mut a_prime = BTreeMap::new();
    let mut added = 0;
    for &w in &raw.rams {
        let t = target[&w];
        let aw = 2 * big_n - t.div_euclid(2);
        let x = aw - raw.a[&w] - plus_ext[&w];
        debug_assert!(x >= 0);
        added += (x + plus_ext[&w]) as usize;
        halflines.push(HalfLines {
            ram: id(w),
            minus_family: fam(w, Orientation::Minus),
            plus_family: fam(w, Orientation::Plus),
            minus_extension: x as u64,
            plus_extension: plus_ext[&w] as u64,
        });
        a.insert(id(w), aw);
        a_prime.insert(id(w), aw + t);
    }
    Ok(CoreDecomposition {
        big_n,
        c1,
        c2,
        halflines,
        a,
        a_prime,
        core_sheets: c.core_sheets().len() + added,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sheet_complex::build_model_surface;
    use num_complex::Complex64;

    fn model(k: i64) -> SheetComplex {
        let z = Complex64::new;
        build_model_surface(z(0.0, 0.0), &[z(1.0, 0.0), z(0.0, 1.0)], z(-1.0, 1.0), k).unwrap()
    }

    #[test]
    fn model_normalization() {
        let d = core_decomposition(&model(0), 2, 2).unwrap();
        assert_eq!(d.big_n, 96);
        for v in d.a.values().chain(d.a_prime.values()) {
            assert!((190..=194).contains(v));
        }
    }

    #[test]
    fn materialized_core_has_the_promised_lengths() {
        let c = model(-1);
        let d = core_decomposition(&c, 2, 3).unwrap();
        let big = d.materialize(&c);
        assert_eq!(big.core_sheets().len(), d.core_sheets);
        let raw = raw_lengths(&big).unwrap();
        for &w in &raw.rams {
            let id = &c.rams()[w].id;
            assert_eq!(raw.a[&w], d.a[id]);
            assert_eq!(raw.a_prime[&w], d.a_prime[id]);
        }
    }

    #[test]
    fn extend_predicts_promotion() {
        let c = model(2);
        let mut raw = raw_lengths(&c).unwrap();
        let w = raw.rams[1];
        let minus = c.families_of(w).find(|(_, f)| f.orientation == Orientation::Minus).unwrap().0;
        let plus = c.families_of(w).find(|(_, f)| f.orientation == Orientation::Plus).unwrap().0;
        let bigger = c.promote_copies(minus, 3).promote_copies(plus, 5);
        raw.extend(w, 3, 5);
        assert_eq!(raw_lengths(&bigger).unwrap(), raw);
    }

    #[test]
    fn rejects_small_constants() {
        assert!(matches!(core_decomposition(&model(0), 1, 2), Err(EndsError::BadConstants { .. })));
    }
}
