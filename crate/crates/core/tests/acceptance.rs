//! Acceptance criteria. Each test prints a single `PASS`/`FAIL` line and
//! asserts it.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use common::*;
use logsurf::ends::{
    classify_ends, core_decomposition, default_radius, embedding_witness, end_index, raw_lengths, topology_census,
    CycleEnd, EndDescriptor, CALIBRATION_OFFSET,
};
use logsurf::numerics::{
    asymptotic_values, completion_probe, integrate_form, laurent_residue_exact, residue_constants, rn_approx_error,
    ExpForm, Laurent, Scalar,
};
use logsurf::skeleton::{betti, finite_completion, ramification_census, skeleton};
use logsurf::{build_model_surface, validate, Complex64, Order, SheetComplex};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, name: &str, result: Result<String, String>) {
    // Written to the raw handle so the line shows even when output is captured.
    let line = match &result {
        Ok(detail) => format!("criterion {id:>2} PASS  {name}: {detail}\n"),
        Err(why) => format!("criterion {id:>2} FAIL  {name}: {why}\n"),
    };
    std::io::stderr().write_all(line.as_bytes()).unwrap();
    if let Err(why) = result {
        panic!("criterion {id} failed: {why}");
    }
}

fn check(cond: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(why()) }
}

fn cycle_ends(c: &SheetComplex) -> Vec<CycleEnd> {
    classify_ends(c)
        .unwrap()
        .ends
        .into_iter()
        .filter_map(|e| match e {
            EndDescriptor::Cycle(ce) => Some(ce),
            _ => None,
        })
        .collect()
}

fn expected_census(n: usize, k: i64) -> Vec<Order> {
    let mut v = vec![Order::Infinite; n];
    let finite: Vec<i64> = if k >= 0 { vec![n as i64 + k] } else { vec![n as i64, 2] };
    v.extend(finite.into_iter().filter(|&o| o > 1).map(|o| Order::Finite(o as u32)));
    v.sort_by_key(|o| format!("{o:?}"));
    v
}

#[test]
fn criterion_01_model_census_grid() {
    let r = (|| {
        for (n, k) in grid() {
            let t = Instant::now();
            let c = model(n, k);
            check(validate(&c).ok, || format!("n={n} K={k} does not validate"))?;
            let mut got: Vec<Order> = ramification_census(&skeleton(&c).unwrap()).unwrap().into_iter().map(|x| x.1).collect();
            got.sort_by_key(|o| format!("{o:?}"));
            check(got == expected_census(n, k), || format!("n={n} K={k}: census {got:?}"))?;
            check(t.elapsed() < Duration::from_secs(1), || format!("n={n} K={k} took {:?}", t.elapsed()))?;
        }
        Ok("28 grid cases".into())
    })();
    report(1, "model census grid", r);
}

#[test]
fn criterion_02_rank_checks() {
    let r = (|| {
        for (n, k) in grid() {
            let b1 = betti(&finite_completion(&skeleton(&model(n, k)).unwrap()).unwrap());
            let want = if k >= 0 { 0 } else { 1 };
            check(b1 == want, || format!("n={n} K={k}: b1 = {b1}, expected {want}"))?;
        }
        Ok("b1 of the completed skeleton is 0 for K >= 0 and 1 for K < 0".into())
    })();
    report(2, "rank checks", r);
}

#[test]
fn criterion_03_ends() {
    let r = (|| {
        for (n, k) in grid() {
            let c = model(n, k);
            let e = classify_ends(&c).unwrap();
            let cycles: Vec<&CycleEnd> = e.ends.iter().filter_map(|d| if let EndDescriptor::Cycle(x) = d { Some(x) } else { None }).collect();
            let covers: Vec<u64> = e.ends.iter().filter_map(|d| if let EndDescriptor::FiniteCover { degree } = d { Some(*degree) } else { None }).collect();
            check(cycles.len() == 1 && cycles[0].cycle.len() == n, || format!("n={n} K={k}: cycle ends {cycles:?}"))?;
            let want: Vec<u64> = if k >= 0 { vec![] } else { vec![(-k) as u64] };
            check(covers == want, || format!("n={n} K={k}: finite covers {covers:?}, expected {want:?}"))?;
        }
        Ok("one cycle end through all infinite points; one finite cover of degree -K when K < 0".into())
    })();
    report(3, "ends", r);
}

#[test]
fn criterion_04_index_round_trip() {
    let r = (|| {
        for (n, k) in grid() {
            let ends = cycle_ends(&model(n, k));
            let idx = end_index(&ends[0]).unwrap();
            check(idx == k, || format!("n={n} K={k}: index {idx}"))?;
        }
        Ok(format!("end_index = K on all 28 cases (calibration offset {CALIBRATION_OFFSET})"))
    })();
    report(4, "index round-trip", r);
}

#[test]
fn criterion_05_index_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let r = (|| {
        for trial in 0..100 {
            let (n, k) = (rng.gen_range(1..=4), rng.gen_range(-3..=3));
            let base = model(n, k);
            let mut c = base.clone();
            // Same number of copies moved from each half-line of a point.
            for w in raw_lengths(&base).unwrap().rams {
                let len = rng.gen_range(0..=6);
                for (f, _) in base.families_of(w) {
                    c = c.promote_copies(f, len);
                }
            }
            let (c1, c2) = (rng.gen_range(2..=6), rng.gen_range(2..=6));
            let d = core_decomposition(&c, c1, c2).map_err(|e| format!("trial {trial}: {e}"))?;
            let raw = raw_lengths(&c).unwrap();
            for cyc in raw.cycles() {
                let id = |w: &usize| c.rams()[*w].id.clone();
                let e = CycleEnd {
                    cycle: cyc.iter().map(id).collect(),
                    projections: vec![[0.0, 0.0]; cyc.len()],
                    a: cyc.iter().map(|w| d.a[&id(w)]).collect(),
                    a_prime: cyc.iter().map(|w| d.a_prime[&id(w)]).collect(),
                    index: 0,
                };
                let idx = end_index(&e).unwrap();
                check(idx == k, || format!("trial {trial} (n={n}, K={k}, c1={c1}, c2={c2}): index {idx}"))?;
            }
        }
        Ok("100 renormalizations".into())
    })();
    report(5, "index invariance", r);
}

#[test]
fn criterion_06_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let r = (|| {
        let mut corpus: Vec<(String, SheetComplex)> = grid().map(|(n, k)| (format!("model n={n} K={k}"), model(n, k))).collect();
        for i in 0..25 {
            let c = if i % 2 == 0 {
                random_model(&mut rng).0
            } else {
                let (d, s) = (rng.gen_range(2..=4), rng.gen_range(1..=4));
                random_cover(&mut rng, d, s).0
            };
            corpus.push((format!("random #{i}"), c));
        }
        for (name, c) in &corpus {
            let want = classified_lifts(c);
            for r in [default_radius(c), 1.7 * default_radius(c)] {
                let got = brute_force_lifts(c, r);
                check(got == want, || format!("{name} at R={r}: brute force {got:?} vs classified {want:?}"))?;
            }
        }
        Ok(format!("{} complexes at two radii", corpus.len()))
    })();
    report(6, "oracle equivalence", r);
}

#[test]
fn criterion_07_witness_soundness() {
    let r = (|| {
        for (n, k) in grid() {
            let c = model(n, k);
            let ends = classify_ends(&c).unwrap();
            let d = ends.decomposition.as_ref().unwrap();
            for e in cycle_ends(&c) {
                let w = embedding_witness(&e, d).map_err(|x| format!("n={n} K={k}: {x}"))?;
                let (a, ap) = (&e.a, &e.a_prime);
                for j in 0..n - 1 {
                    check(w.k_prime[j + 1] == ap[j] - (w.k[j] + 1) && w.k[j + 1] == a[j + 1] - w.k_prime[j + 1], || {
                        format!("n={n} K={k}: recursion fails at j={j}")
                    })?;
                }
                for j in 0..n {
                    let slack = j as i64 * d.c1 + d.c2;
                    check((w.k[j] - d.big_n).abs() <= slack, || format!("n={n} K={k}: k_{j} out of range"))?;
                }
                check(w.k_prime[0] + w.k[0] + 1 == a[0], || format!("n={n} K={k}: closing condition"))?;
                let s: i64 = a.iter().zip(ap).map(|(x, y)| y - x).sum::<i64>() - (n as i64 - 1);
                check(w.closing_index == s, || format!("n={n} K={k}: closing index {} vs {s}", w.closing_index))?;
                check(s + CALIBRATION_OFFSET == k && w.target.k == k, || format!("n={n} K={k}: target K {}", w.target.k))?;
                let t = &w.target;
                let cz = |p: [f64; 2]| Complex64::new(p[0], p[1]);
                let host = build_model_surface(cz(t.z0), &t.w_list.iter().map(|p| cz(*p)).collect::<Vec<_>>(), cz(t.w), t.k)
                    .map_err(|x| format!("n={n} K={k}: target does not build: {x}"))?;
                let hi = end_index(&cycle_ends(&host)[0]).unwrap();
                check(hi == k, || format!("n={n} K={k}: target model has index {hi}"))?;
            }
        }
        Ok("recursion, range and closing hold; target models rebuild with the same index".into())
    })();
    report(7, "witness soundness", r);
}

#[test]
fn criterion_08_topology() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let r = (|| {
        let mut count = 0;
        for (n, k) in grid() {
            let t = topology_census(&model(n, k)).map_err(|e| e.to_string())?;
            let want = if k >= 0 { (0, 1) } else { (0, 2) };
            check((t.genus, t.punctures) == want, || format!("n={n} K={k}: (g, p) = ({}, {})", t.genus, t.punctures))?;
            count += 1;
        }
        for i in 0..40 {
            let (d, s) = (rng.gen_range(2..=5), rng.gen_range(1..=5));
            let (c, oracle) = random_cover(&mut rng, d, s);
            let t = topology_census(&c).map_err(|e| format!("cover #{i}: {e}"))?;
            let b1 = betti(&finite_completion(&skeleton(&c).unwrap()).unwrap()) as i64;
            check(2 - 2 * t.genus as i64 - t.punctures as i64 == 1 - b1, || format!("cover #{i}: Euler relation"))?;
            check(t.genus as i64 == oracle.genus && t.punctures as usize == oracle.at_infinity.len(), || {
                format!("cover #{i}: (g, p) = ({}, {}), Riemann-Hurwitz gives ({}, {})", t.genus, t.punctures, oracle.genus, oracle.at_infinity.len())
            })?;
            count += 1;
        }
        for _ in 0..20 {
            let (c, _, _) = random_model(&mut rng);
            let t = topology_census(&c).map_err(|e| e.to_string())?;
            let b1 = betti(&finite_completion(&skeleton(&c).unwrap()).unwrap()) as i64;
            check(2 - 2 * t.genus as i64 - t.punctures as i64 == 1 - b1, || "random model: Euler relation".to_string())?;
            count += 1;
        }
        let t = topology_census(&torus()).map_err(|e| e.to_string())?;
        check((t.genus, t.punctures) == (1, 1), || format!("torus: ({}, {})", t.genus, t.punctures))?;
        Ok(format!("{} complexes", count + 1))
    })();
    report(8, "topology", r);
}

#[test]
fn criterion_09_numerics() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let t0 = Instant::now();
    let r = (|| {
        let forms = [
            ExpForm::new(Laurent::parse("1,1;0,0;0,-0.5").unwrap(), Laurent::parse("0,-0.3,1").unwrap()).unwrap(),
            ExpForm::new(Laurent::parse("-2:1,0,0,1").unwrap(), Laurent::parse("0,1").unwrap()).unwrap(),
        ];
        let mut worst: f64 = 0.0;
        for i in 0..200 {
            let f = &forms[i % 2];
            let z = Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..std::f64::consts::TAU));
            // Around the circle |z| = 1.25 to the argument of z, then radially.
            let steps = 16;
            let mut path: Vec<Complex64> = (0..=steps).map(|s| Complex64::from_polar(1.25, z.arg() * s as f64 / steps as f64)).collect();
            let h = 1e-5 * z.norm();
            let f_at = |w: Complex64| {
                let mut p = path.clone();
                p.push(w);
                integrate_form(f, &p, 1e-13).map(|q| q.value)
            };
            let fd = (f_at(z + h).map_err(|e| e.to_string())? - f_at(z - h).map_err(|e| e.to_string())?) / (2.0 * h);
            let exact = f.eval(z);
            let rel = (fd - exact).norm() / exact.norm();
            worst = worst.max(rel);
            check(rel <= 1e-6, || format!("point {z}: relative derivative error {rel:e}"))?;
            path.clear();
        }
        let gauss = asymptotic_values(&ExpForm::new(Laurent::parse("1").unwrap(), Laurent::parse("0,0,1").unwrap()).unwrap(), 0.0.into(), 1e-12)
            .map_err(|e| e.to_string())?;
        let h = std::f64::consts::PI.sqrt() / 2.0;
        check(gauss.len() == 2, || "two values for P = z^2".into())?;
        check((gauss[0].value - Complex64::new(0.0, h)).norm() <= 1e-8 && (gauss[1].value - Complex64::new(0.0, -h)).norm() <= 1e-8, || {
            format!("values {:?}", gauss.iter().map(|g| g.value).collect::<Vec<_>>())
        })?;
        let ex = asymptotic_values(&ExpForm::new(Laurent::parse("1").unwrap(), Laurent::parse("0,1").unwrap()).unwrap(), 0.0.into(), 1e-12)
            .map_err(|e| e.to_string())?;
        check(ex.len() == 1 && (ex[0].value + 1.0).norm() <= 1e-10, || format!("value {}", ex[0].value))?;
        check(t0.elapsed() < Duration::from_secs(30), || format!("took {:?}", t0.elapsed()))?;
        Ok(format!("worst relative derivative error {worst:.2e}, {:?}", t0.elapsed()))
    })();
    report(9, "numerics: derivative and asymptotic values", r);
}

fn rat(n: i64) -> BigRational {
    BigRational::from_i64(n)
}

/// Residue of `(z^-m - c z^(-m-n)) (1 + z^n/N)^N`, expanding the power by
/// the binomial theorem with exact binomial coefficients.
fn rn_residue(m: i64, n: i64, big_n: i64, c: &BigRational) -> BigRational {
    let q = &Laurent::monomial(rat(1), -m) - &Laurent::monomial(c.clone(), -m - n);
    let mut coeffs = vec![BigRational::zero(); (m + n) as usize];
    for i in 0..=((m + n - 1) / n).min(big_n) {
        let binom: BigInt = (0..i).map(|j| BigInt::from(big_n - j)).product::<BigInt>() / (1..=i).map(BigInt::from).product::<BigInt>();
        coeffs[(i * n) as usize] = BigRational::new(binom, BigInt::from(big_n).pow(i as u32));
    }
    (&q * &Laurent::new(0, coeffs)).coeff(-1)
}

#[test]
fn criterion_10_residues() {
    let r = (|| {
        for (m, n) in [(1i64, 1i64), (3, 2), (2, 2), (5, 2)] {
            let c = residue_constants(m as u64, n as u64, None).map_err(|e| e.to_string())?;
            let integral_k0 = (m - 1) % n == 0;
            let k0 = (m - 1) / n;
            let want = if integral_k0 { rat(k0 + 1) } else { rat(0) };
            check(c == want, || format!("(m,n)=({m},{n}): C = {c}"))?;
            let q = &Laurent::monomial(rat(1), -m) - &Laurent::monomial(c.clone(), -m - n);
            let res = laurent_residue_exact(&q, &Laurent::monomial(rat(1), n)).unwrap();
            check(res.is_zero(), || format!("(m,n)=({m},{n}): residue with C is {res}"))?;
            let mut prev: Option<BigRational> = None;
            for big_n in 1..=1024i64 {
                if integral_k0 && big_n == k0 {
                    check(residue_constants(m as u64, n as u64, Some(big_n as u64)).is_err(), || "N = k0 has no constant".into())?;
                    continue;
                }
                let cn = residue_constants(m as u64, n as u64, Some(big_n as u64)).map_err(|e| e.to_string())?;
                let res = rn_residue(m, n, big_n, &cn);
                check(res.is_zero(), || format!("(m,n)=({m},{n}) N={big_n}: residue with C_N is {res}"))?;
                if big_n >= 2 * k0 + 2 {
                    let gap = (&cn - &c).abs();
                    if let Some(p) = &prev {
                        check(if c == cn { gap <= *p } else { gap < *p }, || format!("(m,n)=({m},{n}) N={big_n}: |C_N - C| not decreasing"))?;
                    }
                    prev = Some(gap);
                }
            }
            let last = prev.unwrap();
            check(last <= BigRational::new(1.into(), 100.into()), || format!("(m,n)=({m},{n}): |C_1024 - C| = {last}"))?;
        }
        Ok("exact residues vanish for N = 1..1024; |C_N - C| decreases".into())
    })();
    report(10, "residues", r);
}

/// Maximum error over 64 samples of the annulus (0.5, 2) for (m, n) = (1, 1),
/// from a 50-digit evaluation of the closed-form primitives.
const RN_ORACLE: [(u64, f64); 3] = [(8, 0.2858364646595652), (64, 0.040221771038155415), (512, 0.0051255162232948091)];

#[test]
fn criterion_11_rn_convergence() {
    let r = (|| {
        let rep = rn_approx_error(1, 1, &[8, 64, 512], (0.5, 2.0), 64, 1e-12).map_err(|e| e.to_string())?;
        for (row, (big_n, want)) in rep.rows.iter().zip(RN_ORACLE) {
            check(row.big_n == big_n && (row.max_error - want).abs() <= 1e-6 * want, || {
                format!("N={big_n}: {} vs oracle {want}", row.max_error)
            })?;
        }
        check(rep.rows.windows(2).all(|w| w[1].max_error < w[0].max_error), || "errors do not decrease".into())?;
        Ok(rep.rows.iter().map(|r| format!("N={}: {:.6e}", r.big_n, r.max_error)).collect::<Vec<_>>().join(", "))
    })();
    report(11, "R_N convergence", r);
}

#[test]
fn criterion_12_completion_probe() {
    let r = (|| {
        let mut out = Vec::new();
        for (k, n) in [(0usize, 1usize), (0, 2), (1, 2), (2, 3)] {
            let t = Instant::now();
            let q = Laurent::monomial(Complex64::new(1.0, 0.0), k as i64);
            let p = Laurent::monomial(Complex64::new(1.0, 0.0), n as i64);
            let rep = completion_probe(&ExpForm::new(q, p).unwrap(), 2.0, 360, 2e-4).map_err(|e| e.to_string())?;
            check(rep.clusters.len() == n, || format!("z^{k} e^(z^{n}): {} clusters", rep.clusters.len()))?;
            check(rep.clusters.iter().all(|c| c.rays >= 360 / (2 * n)), || format!("z^{k} e^(z^{n}): cluster sizes"))?;
            check(t.elapsed() < Duration::from_secs(60), || format!("z^{k} e^(z^{n}) took {:?}", t.elapsed()))?;
            out.push(format!("(k,n)=({k},{n}): {} clusters", n));
        }
        Ok(out.join(", "))
    })();
    report(12, "completion probe", r);
}
