//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Tolerances, sample sizes, seeds and time budgets are pinned below. The
//! process exits nonzero only for failures that are not listed in
//! `KNOWN_FAILING`.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use coxvol::asymptotics::{
    designated_subsequences, h0_scan, kappa_estimates, nu_vol_estimate, ray_scan, slope_estimates, fitted_slope,
    Grid, ScanOptions,
};
use coxvol::cusp::{build_recurrent_point, cusp_volume_ratios, height, ExcursionSchedule, ScheduleGenerator};
use coxvol::oracle::{brute_force_reduce, chi_oracle};
use coxvol::prelude::*;
use coxvol::scalar::factorial;
use coxvol::volume::sandwich_constant;
use coxvol_cli::commands::lengths_for_delta;
use coxvol_cli::output::parse_doc;
use dashu::integer::{IBig, UBig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const SEED: u64 = 20240611;

// 1
const C1_REFLECTIONS_PER_N: usize = 2000;
const C1_ORBIT_SAMPLES_PER_N: usize = 200;
const C1_BUDGET: Duration = Duration::from_secs(10);
// 2
const C2_BUDGET: Duration = Duration::from_secs(60);
// 3
const C3_SAMPLES: usize = 500;
const C3_BUDGET: Duration = Duration::from_secs(30);
// 4
const C4_SAMPLES: usize = 1000;
const C4_DEPTH: usize = 8;
const C4_BUDGET: Duration = Duration::from_secs(120);
// 5
const C5_TOL: f64 = 0.05;
const C5_BUDGET: Duration = Duration::from_secs(300);
// 6
const C6_BITS: usize = 512;
const C6_Q_END: i64 = 60;
const C6_WINDOW: usize = 5;
const C6_TOL: f64 = 0.15;
/// Frozen envelope constant: `C⁻¹ s^{N/2} ≤ vol ≤ C s` at every row, i.e. the
/// ratio lies in `[1 − ln C/|ln s|, N/2 + ln C/|ln s|]`.
const C6_ENVELOPE_LN_C: f64 = 2.0;
const C6_BUDGET: Duration = Duration::from_secs(15 * 60);
// 7
const C7_TOL: f64 = 0.2;
const C7_M_MAX_BITS: usize = 30;
const C7_BUDGET: Duration = Duration::from_secs(20 * 60);
// 8
const C8_SAMPLES: usize = 1000;
/// Calibrated horoball level `L_N`.
const C8_LEVEL: f64 = 4.0;
/// Calibrated `c_N` for N = 3..6.
const C8_C: [(usize, f64); 4] = [(3, 16.0), (4, 48.0), (5, 128.0), (6, 320.0)];
// 9
const C9_T_COUNT: usize = 33;
const C9_HILL_SLOPE: (f64, f64) = (1.0, 0.1);
const C9_VALLEY_SLOPE: (f64, f64) = (1.5, 0.15);
const C9_BUDGET: Duration = Duration::from_secs(10 * 60);
// 10
const C10_N: usize = 5;
const C10_COUNT: usize = 3;
const C10_Q_END: i64 = 200;
const C10_KAPPA_MINUS: (f64, f64) = (2.3, 2.7);
const C10_NU: (f64, f64) = (2.3, 2.7);
const C10_KAPPA_HILL_MIN: f64 = 3.6;
const C10_BUDGET: Duration = Duration::from_secs(30 * 60);

/// Criteria expected to fail at desk horizon; see the project notes.
const KNOWN_FAILING: &[u32] = &[7];

struct Outcome {
    pass: bool,
    detail: String,
}

type Check = fn() -> Result<Outcome, String>;

fn main() {
    let criteria: [(u32, &str, Duration, Check); 10] = [
        (1, "exactness core", C1_BUDGET, c1),
        (2, "h0 oracle equivalence", C2_BUDGET, c2),
        (3, "nonvanishing sandwich", C3_BUDGET, c3),
        (4, "reduction oracle", C4_BUDGET, c4),
        (5, "divergent slopes", C5_BUDGET, c5),
        (6, "oscillation reproduction", C6_BUDGET, c6),
        (7, "section-count mirror", C7_BUDGET, c7),
        (8, "cusp asymptotics", Duration::MAX, c8),
        (9, "figure-1 regression", C9_BUDGET, c9),
        (10, "kappa/nu estimators", C10_BUDGET, c10),
    ];
    let mut unexpected = 0;
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let res = check();
        let elapsed = start.elapsed();
        let (pass, mut detail) = match res {
            Ok(o) => (o.pass && elapsed <= budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if elapsed > budget {
            detail.push_str(&format!("; over budget {:?}", budget));
        }
        let known = KNOWN_FAILING.contains(&id);
        let status = match (pass, known) {
            (true, false) => "PASS",
            (true, true) => "PASS (listed as known failing)",
            (false, true) => "FAIL (known)",
            (false, false) => {
                unexpected += 1;
                "FAIL"
            }
        };
        println!("criterion {id:>2} {status}: {name}: {detail} [{:.1}s]", elapsed.as_secs_f64());
    }
    if unexpected > 0 {
        println!("{unexpected} unexpected failure(s)");
        std::process::exit(1);
    }
}

fn int_vec(rng: &mut ChaCha8Rng, n: usize, lo: i64, hi: i64) -> LatticeVector<Rational> {
    let xs: Vec<i64> = (0..=n).map(|_| rng.gen_range(lo..=hi)).collect();
    LatticeVector::from_ints(&Exact, &xs).unwrap()
}

/// A random reduced word (no letter repeated twice in a row).
fn random_word(rng: &mut ChaCha8Rng, n: usize, len: usize) -> Word {
    let mut letters: Vec<usize> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = rng.gen_range(0..=n);
        if letters.last() != Some(&l) {
            letters.push(l);
        }
    }
    Word::from_letters(letters)
}

fn c1() -> Result<Outcome, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut failures = Vec::new();
    let mut reflections = 0;
    for n in 2..=6 {
        let mut x = int_vec(&mut rng, n, -6, 6);
        let mut y = int_vec(&mut rng, n, -6, 6);
        let form = pair(&x, &y).unwrap();
        let (nx, ny) = (norm_sq(&x), norm_sq(&y));
        for _ in 0..C1_REFLECTIONS_PER_N {
            let i = rng.gen_range(0..=n);
            let (rx, ry) = (reflect(i, &x).unwrap(), reflect(i, &y).unwrap());
            if reflect(i, &rx).unwrap() != x {
                failures.push(format!("N={n}: σ_{i} is not an involution"));
            }
            (x, y) = (rx, ry);
            reflections += 1;
        }
        if pair(&x, &y).unwrap() != form || norm_sq(&x) != nx || norm_sq(&y) != ny {
            failures.push(format!("N={n}: form changed along the reflection walk"));
        }
        let mut done = 0;
        while done < C1_ORBIT_SAMPLES_PER_N {
            let base = int_vec(&mut rng, n, 0, 6);
            if base.is_zero() {
                continue;
            }
            done += 1;
            let len = rng.gen_range(0..=12);
            let v = apply_word(&random_word(&mut rng, n, len), &base).unwrap();
            let r = reduce_to_chamber(&v, 10_000).map_err(|e| e.to_string())?;
            let again = reduce_to_chamber(&r.reduced, 10_000).map_err(|e| e.to_string())?;
            if r.reduced != base || apply_word(&r.word, &v).unwrap() != r.reduced {
                failures.push(format!("N={n}: reduction of {:?}", v.to_strings()));
            }
            if !again.word.is_empty() || again.reduced != r.reduced {
                failures.push(format!("N={n}: reduction is not idempotent"));
            }
            for k in 1..=n {
                if vol_k(&v, k).unwrap() != vol_k(&base, k).unwrap() {
                    failures.push(format!("N={n}: vol_{k} not invariant"));
                }
            }
        }
    }
    Ok(Outcome {
        pass: failures.is_empty(),
        detail: match failures.first() {
            None => format!("{reflections} reflections, {} orbit samples, exact", 5 * C1_ORBIT_SAMPLES_PER_N),
            Some(f) => format!("{} mismatches, first: {f}", failures.len()),
        },
    })
}

fn c2() -> Result<Outcome, String> {
    let mut total = 0usize;
    let mut bad = Vec::new();
    for n in 2..=6usize {
        let dim = n + 1;
        let gs: Vec<Vec<i64>> = (0..4usize.pow(dim as u32))
            .map(|mut code| {
                (0..dim)
                    .map(|_| {
                        let d = (code % 4) as i64;
                        code /= 4;
                        d
                    })
                    .collect::<Vec<i64>>()
            })
            .filter(|g| g.iter().filter(|&&c| c == 0).count() <= 1)
            .collect();
        total += gs.len();
        let mism: Vec<String> = gs
            .par_iter()
            .filter_map(|g| {
                let v = LatticeVector::from_ints(&Exact, g).unwrap();
                let (a, b) = (h0_nef_big(&v), chi_oracle(&v));
                match (a, b) {
                    (Ok(a), Ok(b)) if a == b => None,
                    (a, b) => Some(format!("{g:?}: {a:?} vs {b:?}")),
                }
            })
            .collect();
        bad.extend(mism);
    }
    Ok(Outcome {
        pass: bad.is_empty(),
        detail: match bad.first() {
            None => format!("{total} classes agree, N=2..6"),
            Some(f) => format!("{} mismatches, first {f}", bad.len()),
        },
    })
}

fn c3() -> Result<Outcome, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let mut bad = Vec::new();
    let mut tightest = f64::INFINITY;
    for n in 3..=6usize {
        let c_n = Rational::from(sandwich_constant(n).unwrap());
        let nf = Rational::from(factorial(n));
        let mut done = 0;
        while done < C3_SAMPLES {
            let g = int_vec(&mut rng, n, 0, 9);
            if g.coords().iter().filter(|c| c.is_zero()).count() > 1 {
                continue;
            }
            done += 1;
            let lower = volume(&g).unwrap() / nf.clone();
            let h = Rational::from(h0_nef_big(&g).map_err(|e| e.to_string())?);
            if !(lower <= h && h <= c_n.clone() * lower.clone()) {
                bad.push(format!("N={n} G={:?}", g.to_strings()));
            }
            tightest = tightest.min(Scalar::to_f64(&(h / lower)));
        }
    }
    Ok(Outcome {
        pass: bad.is_empty(),
        detail: match bad.first() {
            None => format!("{} classes, min h0·N!/vol = {tightest:.4}", 4 * C3_SAMPLES),
            Some(f) => format!("{} violations, first {f}", bad.len()),
        },
    })
}

fn c4() -> Result<Outcome, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let mut points = Vec::new();
    for n in [3usize, 4] {
        while points.len() < C4_SAMPLES * (n - 2) {
            let base = int_vec(&mut rng, n, 0, 5);
            if base.is_zero() {
                continue;
            }
            let len = rng.gen_range(0..=C4_DEPTH);
            points.push(apply_word(&random_word(&mut rng, n, len), &base).unwrap());
        }
    }
    let bad: Vec<String> = points
        .par_iter()
        .filter_map(|v| {
            let g = reduce_to_chamber(v, 10_000);
            let b = brute_force_reduce(v, C4_DEPTH);
            match (g, b) {
                (Ok(g), Ok(b)) if g.reduced == b.reduced && g.word.len() >= b.word.len() => None,
                (g, b) => Some(format!("{:?}: greedy {:?} bfs {:?}", v.to_strings(), g.map(|r| r.reduced.to_strings()), b.map(|r| r.reduced.to_strings()))),
            }
        })
        .collect();
    Ok(Outcome {
        pass: bad.is_empty(),
        detail: match bad.first() {
            None => format!("{} points agree (N=3,4, depth {C4_DEPTH})", points.len()),
            Some(f) => format!("{} disagreements, first {f}", bad.len()),
        },
    })
}

fn c5() -> Result<Outcome, String> {
    let grid = Grid::range(2, 4, 30);
    let mut worst = 0f64;
    let mut bad = Vec::new();
    let mut cases = 0;
    for n in 3..=5usize {
        let a = LatticeVector::<Rational>::u(&Exact, n).unwrap();
        for k in 1..n {
            let coeffs: BTreeMap<usize, Rational> = (0..k).map(|i| (i, Rational::from(i as i64 + 1))).collect();
            let word = Word::from_letters([n, k % n, n]);
            let spec = BoundaryPointSpec::divergent(n, word, coeffs).map_err(|e| e.to_string())?;
            let table = ray_scan(&spec, &a, &grid, &ScanOptions::default()).map_err(|e| e.to_string())?;
            let slope = fitted_slope(&table).map_err(|e| e.to_string())?;
            let target = (n - k) as f64;
            worst = worst.max((slope - target).abs());
            if (slope - target).abs() > C5_TOL {
                bad.push(format!("N={n} |S_d|={k}: slope {slope:.4}"));
            }
            cases += 1;
        }
    }
    Ok(Outcome {
        pass: bad.is_empty(),
        detail: format!("{cases} specs, max |slope − (N−|S_d|)| = {worst:.2e} (tol {C5_TOL}){}", fmt_bad(&bad)),
    })
}

fn fmt_bad(bad: &[String]) -> String {
    if bad.is_empty() {
        String::new()
    } else {
        format!("; {}", bad.join("; "))
    }
}

/// The L = 3, N = 3 schedule, built through the `construct` mapping of the
/// δ target 1.25.
fn oscillating_schedule() -> Result<ExcursionSchedule, String> {
    let lengths = lengths_for_delta(&(Rational::from(5) / Rational::from(4)), 3).map_err(|e| e.to_string())?;
    ExcursionSchedule::from_generator(3, vec![0, 1, 2, 3], ScheduleGenerator { lengths, count: 4 })
        .map_err(|e| e.to_string())
}

fn nearest_row(ts: &[f64], t: f64) -> usize {
    (0..ts.len()).min_by(|&i, &j| (ts[i] - t).abs().total_cmp(&(ts[j] - t).abs())).expect("rows")
}

fn c6() -> Result<Outcome, String> {
    let n = 3usize;
    let half = n as f64 / 2.0;
    let sched = oscillating_schedule()?;
    let rp = build_recurrent_point::<BigFloat>(&sched, sched.len()).map_err(|e| e.to_string())?;
    let a = LatticeVector::<BigFloat>::u(&C6_BITS, n).unwrap();
    let grid = Grid::range(2, 4, C6_Q_END);
    let table = ray_scan(&rp.spec, &a, &grid, &ScanOptions::default()).map_err(|e| e.to_string())?;
    let est = slope_estimates(&table, C6_WINDOW).map_err(|e| e.to_string())?;
    let ts: Vec<f64> = table.rows.iter().map(|r| r.t).collect();
    let horizon = ts.iter().copied().fold(f64::MIN, f64::max);
    let des = designated_subsequences(&sched, horizon).map_err(|e| e.to_string())?;
    let at = |t: f64| est.windowed[nearest_row(&ts, t)];
    let valley_max = des.valleys.iter().filter_map(|d| at(d.t)).fold(f64::NEG_INFINITY, f64::max);
    let hill_min = des.hills.iter().filter_map(|d| at(d.t)).fold(f64::INFINITY, f64::min);
    let delta = 1.25;
    let mut envelope_bad = Vec::new();
    for r in &table.rows {
        let ls = r.s.ln();
        let ok = r.error.is_none()
            && r.ln_vol_unit - ls <= C6_ENVELOPE_LN_C
            && r.ln_vol_unit - half * ls >= -C6_ENVELOPE_LN_C;
        if !ok {
            envelope_bad.push(format!("q={}", r.q));
        }
    }
    let pass = valley_max >= half - C6_TOL && hill_min <= delta + C6_TOL && envelope_bad.is_empty();
    Ok(Outcome {
        pass,
        detail: format!(
            "valleys {} max windowed {valley_max:.3} (>= {:.2}); hills {} min windowed {hill_min:.3} (<= {:.2}); \
             envelope ln C = {C6_ENVELOPE_LN_C} holds on {}/{} rows; raw ratio in [{:.3}, {:.3}]",
            des.valleys.len(),
            half - C6_TOL,
            des.hills.len(),
            delta + C6_TOL,
            table.rows.len() - envelope_bad.len(),
            table.rows.len(),
            est.ratio_min,
            est.ratio_max,
        ),
    })
}

fn c7() -> Result<Outcome, String> {
    let n = 3usize;
    let sched = oscillating_schedule()?;
    let rp = build_recurrent_point::<Rational>(&sched, sched.len()).map_err(|e| e.to_string())?;
    let cap = IBig::from(2).pow(C7_M_MAX_BITS);
    let des = designated_subsequences(&sched, f64::INFINITY).map_err(|e| e.to_string())?;
    let mut ms: Vec<IBig> = des.hills.iter().chain(&des.valleys).map(|d| d.m.clone()).filter(|m| *m <= cap).collect();
    ms.sort();
    ms.dedup();
    let a = LatticeVector::<Rational>::u(&Exact, n).unwrap().scale(&Rational::from(2));
    let table = h0_scan(&rp.spec, &a, &ms, &ScanOptions::default()).map_err(|e| e.to_string())?;
    let ratio = |m: &IBig| table.rows.iter().find(|r| &r.m == m).map(|r| r.log_h0_over_log_m);
    let hills: Vec<(String, f64)> =
        des.hills.iter().filter(|d| d.m <= cap).filter_map(|d| ratio(&d.m).map(|r| (d.m.to_string(), r))).collect();
    let valleys: Vec<(String, f64)> =
        des.valleys.iter().filter(|d| d.m <= cap).filter_map(|d| ratio(&d.m).map(|r| (d.m.to_string(), r))).collect();
    let hill_max = hills.iter().map(|h| h.1).fold(f64::NEG_INFINITY, f64::max);
    let valley_min = valleys.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    let sandwich = table.rows.iter().all(|r| r.sandwich_ok == Some(true));
    let (hill_bar, valley_bar) = (n as f64 - 1.25 - C7_TOL, n as f64 / 2.0 + C7_TOL);
    let list = |v: &[(String, f64)]| v.iter().map(|(m, r)| format!("m={m}:{r:.4}")).collect::<Vec<_>>().join(",");
    Ok(Outcome {
        pass: !hills.is_empty() && !valleys.is_empty() && hill_max >= hill_bar && valley_min <= valley_bar && sandwich,
        detail: format!(
            "hills [{}] max {hill_max:.4} (>= {hill_bar:.2}); valleys [{}] min {valley_min:.4} (<= {valley_bar:.2}); \
             sandwich {} on {} rows",
            list(&hills),
            list(&valleys),
            if sandwich { "exact" } else { "VIOLATED" },
            table.rows.len(),
        ),
    })
}

fn c8() -> Result<Outcome, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let mut parts = Vec::new();
    let mut pass = true;
    for (n, c) in C8_C {
        let (mut lo, mut hi) = (f64::INFINITY, 0f64);
        let mut kept = 0;
        while kept < C8_SAMPLES {
            let i = rng.gen_range(0..=n);
            let mut j = rng.gen_range(0..=n);
            while j == i {
                j = rng.gen_range(0..=n);
            }
            let cusp = CuspId::new(i, j, n).unwrap();
            let mut a = cusp.vector::<Rational>(&Exact, n).unwrap();
            let e: usize = rng.gen_range(2..40);
            let eps = Rational::from_parts(IBig::ONE, UBig::from(2u8).pow(e));
            for k in 0..=n {
                for l in k + 1..=n {
                    let w = Rational::from_parts(IBig::from(rng.gen_range(0..100i64)), UBig::from(100u8));
                    a = a.add_scaled(&(w * eps.clone()), &LatticeVector::omega_hat(&Exact, n, k, l).unwrap()).unwrap();
                }
            }
            let Ok(h) = height(cusp, &a) else { continue };
            if h.to_f64() < C8_LEVEL {
                continue;
            }
            kept += 1;
            let (r1, rn) = cusp_volume_ratios(cusp, &a).map_err(|e| e.to_string())?;
            lo = lo.min(r1.min(rn));
            hi = hi.max(r1.max(rn));
        }
        let ok = lo >= 1.0 / c && hi <= c;
        pass &= ok;
        parts.push(format!("N={n} ratios in [{lo:.4}, {hi:.4}] vs c={c}"));
    }
    Ok(Outcome { pass, detail: format!("{C8_SAMPLES} samples per N at Ht >= {C8_LEVEL}: {}", parts.join("; ")) })
}

fn figure1_text() -> Result<String, String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let t = C9_T_COUNT.to_string();
    let code = coxvol_cli::run(["coxvol", "figure1", "--t-grid", &t], &mut out, &mut err);
    if code != 0 {
        return Err(String::from_utf8_lossy(&err).into_owned());
    }
    String::from_utf8(out).map_err(|e| e.to_string())
}

fn classes(text: &str) -> Vec<(String, f64, String)> {
    let (meta, _) = parse_doc(text);
    meta.into_iter()
        .filter_map(|(k, v)| {
            let t = k.strip_prefix("slope.t_")?.to_string();
            let (s, c) = v.split_once(' ')?;
            Some((t, s.parse().ok()?, c.to_string()))
        })
        .collect()
}

fn c9() -> Result<Outcome, String> {
    let golden_path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/figure1.csv");
    let golden = std::fs::read_to_string(&golden_path).map_err(|e| format!("{}: {e}", golden_path.display()))?;
    let first = figure1_text()?;
    let second = figure1_text()?;
    let (c1, c2) = (classes(&first), classes(&second));
    let stable = c1.iter().map(|c| (&c.0, &c.2)).eq(c2.iter().map(|c| (&c.0, &c.2)));
    let (_, mut rdr) = parse_doc(&first);
    let rows = rdr.records().count();
    let mut off = Vec::new();
    for (t, s, c) in &c1 {
        let (centre, tol) = if c == "hill" { C9_HILL_SLOPE } else { C9_VALLEY_SLOPE };
        if (s - centre).abs() > tol {
            off.push(format!("t={t}: {c} slope {s}"));
        }
    }
    let hills: Vec<&str> = c1.iter().filter(|c| c.2 == "hill").map(|c| c.0.as_str()).collect();
    let pass = first == golden && stable && rows == C9_T_COUNT * 21 && c1.len() == C9_T_COUNT && off.is_empty();
    Ok(Outcome {
        pass,
        detail: format!(
            "golden {}; classification {} across re-runs; {rows} cells; hills at t = {}; {} valleys{}",
            if first == golden { "matches" } else { "DIFFERS" },
            if stable { "stable" } else { "UNSTABLE" },
            hills.join(","),
            c1.len() - hills.len(),
            fmt_bad(&off),
        ),
    })
}

fn c10() -> Result<Outcome, String> {
    let n = C10_N;
    let lengths = lengths_for_delta(&Rational::ONE, n).map_err(|e| e.to_string())?;
    let sched = ExcursionSchedule::from_generator(n, (0..=n).collect(), ScheduleGenerator { lengths, count: C10_COUNT })
        .map_err(|e| e.to_string())?;

    let rp = build_recurrent_point::<BigFloat>(&sched, sched.len()).map_err(|e| e.to_string())?;
    let a = LatticeVector::<BigFloat>::u(&C6_BITS, n).unwrap();
    let table =
        ray_scan(&rp.spec, &a, &Grid::range(2, 4, C10_Q_END), &ScanOptions::default()).map_err(|e| e.to_string())?;
    let nu = nu_vol_estimate(&table, C6_WINDOW).map_err(|e| e.to_string())?;

    let rp = build_recurrent_point::<Rational>(&sched, sched.len()).map_err(|e| e.to_string())?;
    let des = designated_subsequences(&sched, f64::INFINITY).map_err(|e| e.to_string())?;
    let mut ms: Vec<IBig> = des.hills.iter().chain(&des.valleys).map(|d| d.m.clone()).collect();
    ms.sort();
    ms.dedup();
    let a = LatticeVector::<Rational>::u(&Exact, n).unwrap().scale(&Rational::from(2));
    let h0 = h0_scan(&rp.spec, &a, &ms, &ScanOptions::default()).map_err(|e| e.to_string())?;
    let k = kappa_estimates(&h0, &des).map_err(|e| e.to_string())?;

    let within = |x: f64, (lo, hi): (f64, f64)| lo <= x && x <= hi;
    let pass = within(k.kappa_r_minus_hat, C10_KAPPA_MINUS)
        && within(nu.real, C10_NU)
        && k.kappa_r_plus_hat >= C10_KAPPA_HILL_MIN;
    Ok(Outcome {
        pass,
        detail: format!(
            "kappa_R_minus_hat {:.4} in [{}, {}]; nu_vol {:.4} in [{}, {}] (q = 4..{C10_Q_END}); kappa hill {:.4} >= {C10_KAPPA_HILL_MIN}; {} hills, {} valleys",
            k.kappa_r_minus_hat,
            C10_KAPPA_MINUS.0,
            C10_KAPPA_MINUS.1,
            nu.real,
            C10_NU.0,
            C10_NU.1,
            k.kappa_r_plus_hat,
            des.hills.len(),
            des.valleys.len(),
        ),
    })
}
