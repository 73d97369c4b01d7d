//! Ray scans `vol(D + sA)`, section scans `h⁰(⌊mD⌋ + A)` and the slope
//! estimators built on them.
//!
//! Estimates are finite-horizon quantities; every table records the grid it
//! was computed on.

use dashu::base::BitTest;
use dashu::integer::IBig;
use rayon::prelude::*;

use crate::boundary::{materialize, BoundaryCurve, BoundaryPointSpec};
use crate::chamber::{reduce_with, ReductionConfig};
use crate::cusp::{closest_approach_ratio, floor_sqrt, phi_from_reduced, s_to_t_f64, ExcursionSchedule};
use crate::error::{Error, Result};
use crate::lattice::{norm_sq, pair, LatticeVector};
use crate::scalar::{factorial, BigFloat, Rational, Scalar};
use crate::volume::{h0_nef_big, sandwich_constant, top_of_nef, SymmetricProfile};

/// Geometric grid `s = base^{−q}` (or `m = base^q`), `q` ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    pub base: u32,
    pub q: Vec<i64>,
}

impl Grid {
    pub fn range(base: u32, q_start: i64, q_end: i64) -> Self {
        Self { base, q: (q_start..=q_end).collect() }
    }

    pub fn describe(&self) -> String {
        match (self.q.first(), self.q.last()) {
            (Some(a), Some(b)) => format!("base={} q={}..{} ({} points)", self.base, a, b, self.q.len()),
            _ => format!("base={} empty", self.base),
        }
    }

    /// `base^{−q}` exactly.
    pub fn s(&self, q: i64) -> Rational {
        pow_rational(self.base, -q)
    }
}

fn pow_rational(base: u32, e: i64) -> Rational {
    let p = Rational::from(IBig::from(base).pow(e.unsigned_abs() as usize));
    if e >= 0 {
        p
    } else {
        Rational::ONE / p
    }
}

/// Default step cap for a ray-scan row at `s = 2^{−q}`.
pub fn default_max_steps(q: i64) -> u64 {
    10 * q.max(0) as u64 + 1000
}

/// Options shared by the scans.
#[derive(Clone, Debug, Default)]
pub struct ScanOptions {
    /// Fixed iteration cap per row; `None` uses [`default_max_steps`].
    pub max_steps: Option<u64>,
    /// Truncation depth for schedule programs.
    pub depth: Option<usize>,
    /// Keep failing rows (with their error) instead of failing the scan.
    pub keep_row_errors: bool,
}

impl ScanOptions {
    fn reduction(&self, q: i64) -> ReductionConfig {
        ReductionConfig::with_max_steps(self.max_steps.unwrap_or_else(|| default_max_steps(q)))
    }
}

/// One row of a ray scan.
#[derive(Clone, Debug, PartialEq)]
pub struct RayScanRow<S> {
    pub q: i64,
    pub s: S,
    pub t: f64,
    /// `vol(a_s)`, `a_s = s·A + p` with `p` normalized.
    pub vol: Option<S>,
    /// `ln vol_N(s·Â + P̂)`, the unit-basepoint normalization.
    pub ln_vol_unit: f64,
    pub log_vol_over_log_s: f64,
    pub phi: f64,
    pub word_length: u64,
    pub clamped: bool,
    pub error: Option<String>,
}

/// A ray scan with its metadata (ordered key/value pairs).
#[derive(Clone, Debug, PartialEq)]
pub struct RayScanTable<S> {
    pub n: usize,
    pub rows: Vec<RayScanRow<S>>,
    pub meta: Vec<(String, String)>,
}

impl<S: Scalar> RayScanTable<S> {
    /// Rows without errors and with positive volume: `(ln s, ln vol_unit)`.
    pub fn points(&self) -> Vec<(usize, f64, f64)> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.error.is_none() && r.vol.as_ref().is_some_and(|v| v.is_positive()))
            .map(|(i, r)| (i, r.s.ln(), r.ln_vol_unit))
            .collect()
    }

    pub fn first_error(&self) -> Option<(&RayScanRow<S>, &str)> {
        self.rows.iter().find_map(|r| r.error.as_deref().map(|e| (r, e)))
    }
}

/// Scans `vol(s·A + D)` over the grid. `D` is scaled so that
/// `⟨A, D⟩ = ⟨A, A⟩/2`, which makes `s` the geodesic parameter of the
/// unit-speed ray from `A/‖A‖` towards `[D]`.
pub fn ray_scan<S: Scalar>(
    d: &BoundaryPointSpec<S>,
    a: &LatticeVector<S>,
    grid: &Grid,
    opts: &ScanOptions,
) -> Result<RayScanTable<S>> {
    let ctx = a.ctx();
    let m = materialize(d, &ctx, opts.depth)?;
    let mut table = ray_scan_vector(&m.vector, a, grid, opts)?;
    if let Some(c) = &m.certificate {
        if let Some(r) = c.decay_rate {
            table.meta.push(("certificate_decay_rate".into(), format!("{r:.6e}")));
        }
        if let Some(l) = c.ln_increments.last() {
            table.meta.push(("certificate_last_ln_increment".into(), format!("{l:.6}")));
        }
    }
    Ok(table)
}

/// Normalizes `p` so that `⟨A, p⟩ = ⟨A, A⟩/2`; returns the scaled vector and
/// the factor.
pub fn normalize_against<S: Scalar>(p: &LatticeVector<S>, a: &LatticeVector<S>) -> Result<(LatticeVector<S>, S)> {
    let ap = pair(a, p)?;
    if !ap.is_positive() {
        return Err(Error::ZeroPairing);
    }
    let c = norm_sq(a) / (ap * a.coord(0).lift(2));
    Ok((p.scale(&c), c))
}

/// [`ray_scan`] on an already materialized vector.
pub fn ray_scan_vector<S: Scalar>(
    p: &LatticeVector<S>,
    a: &LatticeVector<S>,
    grid: &Grid,
    opts: &ScanOptions,
) -> Result<RayScanTable<S>> {
    a.check_same(p)?;
    if !a.coords().iter().all(|x| x.is_positive()) {
        return Err(Error::Domain("the ray direction A must be ample".into()));
    }
    let ctx = a.ctx();
    let n = a.n();
    let (p, scale) = normalize_against(p, a)?;
    let aa = norm_sq(a);
    let ln_norm = 0.5 * n as f64 * aa.ln();

    let rows: Vec<RayScanRow<S>> = grid
        .q
        .par_iter()
        .map(|&q| {
            let s = S::from_rational(&ctx, &grid.s(q));
            let t = s_to_t_f64(&s);
            let mut row = RayScanRow {
                q,
                s: s.clone(),
                t,
                vol: None,
                ln_vol_unit: f64::NAN,
                log_vol_over_log_s: f64::NAN,
                phi: f64::NAN,
                word_length: 0,
                clamped: false,
                error: None,
            };
            let v = match a.scale(&s).add(&p) {
                Ok(v) => v,
                Err(e) => {
                    row.error = Some(e.to_string());
                    return row;
                }
            };
            match reduce_with(&v, &opts.reduction(q)) {
                Ok(r) => {
                    let tau_n = SymmetricProfile::of(&r.reduced).taus[n].clone();
                    row.vol = Some(top_of_nef(&r.reduced));
                    row.ln_vol_unit = tau_n.ln() - ln_norm;
                    row.log_vol_over_log_s = row.ln_vol_unit / s.ln();
                    row.phi = phi_from_reduced(&r.reduced, &norm_sq(&v));
                    row.word_length = r.word.len();
                    row.clamped = r.clamped();
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect();

    if !opts.keep_row_errors {
        // Recompute the failing row to return a typed error.
        if let Some(r) = rows.iter().find(|r| r.error.is_some()) {
            let s = S::from_rational(&ctx, &grid.s(r.q));
            let v = a.scale(&s).add(&p)?;
            if let Err(e) = reduce_with(&v, &opts.reduction(r.q)) {
                return Err(Error::AtRow { s: s.to_decimal(), source: Box::new(e) });
            }
        }
    }

    let meta = vec![
        ("n".into(), n.to_string()),
        ("backend".into(), S::describe(&ctx)),
        ("a".into(), a.to_strings().join(" ")),
        ("d_scale".into(), scale.to_decimal()),
        ("grid".into(), grid.describe()),
        ("normalization".into(), "<A,D> = <A,A>/2; ratio uses vol_N of s*A/|A| + D/|A|".into()),
    ];
    Ok(RayScanTable { n, rows, meta })
}

/// Least-squares slope of `y` against `x` with intercept.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Least-squares slope of `y = δ·x` through the origin.
pub fn origin_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Slope of `ln vol` against `ln s` over all usable rows, with intercept.
pub fn fitted_slope<S: Scalar>(table: &RayScanTable<S>) -> Result<f64> {
    let pts = table.points();
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.iter().map(|&(_, x, y)| (x, y)).unzip();
    ols_slope(&xs, &ys).ok_or(Error::InsufficientRows { needed: 2, got: pts.len() })
}

/// Output of [`slope_estimates`].
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeEstimates {
    pub delta_inf_hat: f64,
    pub delta_sup_hat: f64,
    /// Extremes of the raw ratio `log vol / log s`.
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// Windowed slope per table row (`None` where undefined).
    pub windowed: Vec<Option<f64>>,
    /// Largest `q` of the table.
    pub horizon_q: i64,
}

/// Windowed estimates of `δ`: for each row, the least-squares fit of
/// `ln vol_N = δ·ln s` through the origin over the `window` rows centred on
/// it. This is the smoothed version of the ratio `log vol/log s` whose
/// liminf/limsup define `δ^inf`, `δ^sup`.
pub fn slope_estimates<S: Scalar>(table: &RayScanTable<S>, window: usize) -> Result<SlopeEstimates> {
    let window = window.max(1);
    let pts = table.points();
    if pts.len() < window + 2 {
        return Err(Error::InsufficientRows { needed: window + 2, got: pts.len() });
    }
    let mut windowed = vec![None; table.rows.len()];
    let half = window / 2;
    let last = pts.len() - window;
    for (k, &(row, _, _)) in pts.iter().enumerate() {
        let start = k.saturating_sub(half).min(last);
        let slice = &pts[start..start + window];
        let (xs, ys): (Vec<f64>, Vec<f64>) = slice.iter().map(|&(_, x, y)| (x, y)).unzip();
        windowed[row] = origin_slope(&xs, &ys);
    }
    let ws: Vec<f64> = windowed.iter().flatten().copied().collect();
    let ratios: Vec<f64> = pts.iter().map(|&(_, x, y)| y / x).collect();
    let fold = |v: &[f64], f: fn(f64, f64) -> f64, init: f64| v.iter().copied().fold(init, f);
    Ok(SlopeEstimates {
        delta_inf_hat: fold(&ws, f64::min, f64::INFINITY),
        delta_sup_hat: fold(&ws, f64::max, f64::NEG_INFINITY),
        ratio_min: fold(&ratios, f64::min, f64::INFINITY),
        ratio_max: fold(&ratios, f64::max, f64::NEG_INFINITY),
        windowed,
        horizon_q: table.rows.iter().map(|r| r.q).max().unwrap_or(0),
    })
}

/// One designated time along the ray.
#[derive(Clone, Debug, PartialEq)]
pub struct Designated {
    /// Excursion index (1-based).
    pub index: usize,
    pub t: f64,
    /// Ray parameter at (approximately, for hills) this time.
    pub s: Rational,
    /// `⌊e^{2t}⌋`.
    pub m: IBig,
}

/// Hill (deep in a cusp) and valley (back near the thick part) times of a
/// schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct SubsequenceDesignation {
    pub hills: Vec<Designated>,
    pub valleys: Vec<Designated>,
    pub derivation: String,
}

/// Designated subsequences along the ray `s·u + p`, `p` the schedule's limit
/// approximation with `⟨u,p⟩ = N+1`.
///
/// Valley `n` is the closest approach to `g_n·u`, with
/// `e^{2t̃_n} = r_n = (⟨u,g_n u⟩ − ⟨p,g_n u⟩)/⟨p,g_n u⟩`, `m̃_n = ⌊r_n⌋` and
/// `s̃_n = 1/(r_n − 1)` exactly. Hill `n` is the midpoint of valleys `n−1`
/// and `n` (`t̃_0 = 0`), with `m = ⌊√(r_{n−1} r_n)⌋` and `s = 1/(m − 1)`.
/// The last excursion of a truncated schedule has no valley and is skipped.
pub fn designated_subsequences(schedule: &ExcursionSchedule, horizon_t: f64) -> Result<SubsequenceDesignation> {
    schedule.validate()?;
    let d = schedule.len();
    let p = schedule.limit_point(d)?;
    let orbit = schedule.orbit_points(d)?;
    let mut ratios = vec![Rational::ONE];
    for x in orbit.iter().take(d).skip(1) {
        ratios.push(closest_approach_ratio(&p, x)?);
    }
    let mut hills = Vec::new();
    let mut valleys = Vec::new();
    for k in 1..ratios.len() {
        let r = &ratios[k];
        if *r <= Rational::from(2) {
            return Err(Error::DesignationMismatch(format!("valley {k} lies before the basepoint")));
        }
        let t = 0.5 * r.ln();
        let hill_sq = ratios[k - 1].clone() * r.clone();
        let m_hill = floor_sqrt(&hill_sq);
        let t_hill = 0.25 * hill_sq.ln();
        if t_hill <= horizon_t && m_hill > IBig::from(2) {
            hills.push(Designated {
                index: k,
                t: t_hill,
                s: Rational::ONE / Rational::from(m_hill.clone() - IBig::ONE),
                m: m_hill,
            });
        }
        if t <= horizon_t {
            valleys.push(Designated { index: k, t, s: Rational::ONE / (r.clone() - Rational::ONE), m: r.floor() });
        }
    }
    let derivation = match &schedule.generator {
        Some(g) => format!("{} x{} on support {:?}", g.lengths.describe(), g.count, schedule.support),
        None => format!("{} explicit excursions on support {:?}", d, schedule.support),
    };
    Ok(SubsequenceDesignation { hills, valleys, derivation })
}

/// Coordinate-wise floor.
pub fn rounddown(v: &LatticeVector<Rational>) -> LatticeVector<Rational> {
    v.map(|x| Rational::from(x.floor()))
}

/// One row of an h⁰ scan.
#[derive(Clone, Debug, PartialEq)]
pub struct SectionScanRow {
    pub m: IBig,
    pub h0: Option<IBig>,
    pub log_h0_over_log_m: f64,
    pub word_length: u64,
    /// `m^N·vol(D + A/(2m))`.
    pub lower: Option<Rational>,
    /// `C_N·m^N·vol(D + A/m)`.
    pub upper: Option<Rational>,
    pub sandwich_ok: Option<bool>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SectionScanTable {
    pub n: usize,
    pub rows: Vec<SectionScanRow>,
    pub meta: Vec<(String, String)>,
}

impl SectionScanTable {
    /// Rows with an `h⁰`: `(ln m, ln h⁰)`.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter_map(|r| r.h0.as_ref().map(|h| (Rational::from(r.m.clone()).ln(), Rational::from(h.clone()).ln())))
            .collect()
    }

    /// Slope of `ln h⁰` against `ln m` with intercept.
    pub fn fitted_slope(&self) -> Result<f64> {
        let pts = self.points();
        let (xs, ys): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
        ols_slope(&xs, &ys).ok_or(Error::InsufficientRows { needed: 2, got: pts.len() })
    }
}

/// `m = ⌈base^q⌉` for the grid exponents.
pub fn m_grid(grid: &Grid) -> Vec<IBig> {
    grid.q.iter().map(|&q| pow_rational(grid.base, q).ceil()).collect()
}

/// Scans `h⁰(⌊mD⌋ + A)` for the given `m`, with `D` normalized by
/// `⟨u, D⟩ = N+1`. Rows whose reduced class is not big are kept with an
/// error.
pub fn h0_scan(
    d: &BoundaryPointSpec<Rational>,
    a: &LatticeVector<Rational>,
    ms: &[IBig],
    opts: &ScanOptions,
) -> Result<SectionScanTable> {
    let n = a.n();
    let min_a = a.coords().iter().min().cloned();
    if min_a.map_or(true, |m| m < Rational::from(2)) || a.coords().iter().any(|x| !x.denominator().is_one()) {
        return Err(Error::Domain("A must be integral with all coordinates >= 2".into()));
    }
    let m = materialize(d, &crate::scalar::Exact, opts.depth)?;
    let dvec = crate::cusp::normalize_u_slice(&m.vector);
    let c_n = Rational::from(sandwich_constant(n)?);
    let n_fact = Rational::from(factorial(n));

    let results: Vec<(SectionScanRow, Option<Error>)> = ms
        .par_iter()
        .map(|m| {
            let mut row = SectionScanRow {
                m: m.clone(),
                h0: None,
                log_h0_over_log_m: f64::NAN,
                word_length: 0,
                lower: None,
                upper: None,
                sandwich_ok: None,
                error: None,
            };
            let res = (|| -> Result<()> {
                if *m < IBig::ONE {
                    return Err(Error::Domain("m must be positive".into()));
                }
                let mq = Rational::from(m.clone());
                let steps = opts.max_steps.unwrap_or_else(|| default_max_steps(2 * m.bit_len() as i64));
                let cfg = ReductionConfig::with_max_steps(steps);
                let g = rounddown(&dvec.scale(&mq)).add(a)?;
                let r = reduce_with(&g, &cfg)?;
                row.word_length = r.word.len();
                let mn = mq.clone().pow(n);
                let vol_at = |denom: Rational| -> Result<Rational> {
                    let v = dvec.add(&a.scale(&(Rational::ONE / denom)))?;
                    Ok(top_of_nef(&reduce_with(&v, &cfg)?.reduced))
                };
                let lower = mn.clone() * vol_at(mq.clone() * Rational::from(2))?;
                let upper = c_n.clone() * mn * vol_at(mq.clone())?;
                row.lower = Some(lower.clone());
                row.upper = Some(upper.clone());
                let h0 = h0_nef_big(&r.reduced)?;
                let scaled = Rational::from(h0.clone()) * n_fact.clone();
                row.sandwich_ok = Some(lower <= scaled && scaled <= upper);
                row.log_h0_over_log_m = Rational::from(h0.clone()).ln() / mq.ln();
                row.h0 = Some(h0);
                Ok(())
            })();
            match res {
                Ok(()) => (row, None),
                Err(e) => {
                    row.error = Some(e.to_string());
                    (row, Some(e))
                }
            }
        })
        .collect();

    let mut rows = Vec::with_capacity(results.len());
    for (row, err) in results {
        match err {
            // Rows whose reduced class is not big are reported, never fatal.
            Some(e) if !opts.keep_row_errors && !matches!(e, Error::NotBig { .. }) => {
                return Err(Error::AtRow { s: format!("1/{}", row.m), source: Box::new(e) });
            }
            _ => rows.push(row),
        }
    }
    let meta = vec![
        ("n".into(), n.to_string()),
        ("backend".into(), "exact".into()),
        ("a".into(), a.to_strings().join(" ")),
        ("rounding".into(), "floor in the omega basis".into()),
        ("normalization".into(), "<u,D> = N+1".into()),
        ("sandwich_constant".into(), c_n.to_string()),
    ];
    Ok(SectionScanTable { n, rows, meta })
}

/// Output of [`kappa_estimates`].
#[derive(Clone, Debug, PartialEq)]
pub struct KappaEstimates {
    /// Minimum of `log h⁰/log m` on the designated valleys.
    pub kappa_r_minus_hat: f64,
    /// Maximum of `log h⁰/log m` on the designated hills.
    pub kappa_r_plus_hat: f64,
    /// Maximum over the whole grid (an all-grid estimate).
    pub kappa_sup_hat: f64,
    /// Minimum over the whole grid.
    pub all_grid_min: f64,
    /// Largest `m` of the table.
    pub horizon_m: IBig,
}

pub fn kappa_estimates(table: &SectionScanTable, designation: &SubsequenceDesignation) -> Result<KappaEstimates> {
    let ok: Vec<&SectionScanRow> = table.rows.iter().filter(|r| r.h0.is_some()).collect();
    if ok.is_empty() {
        return Err(Error::InsufficientRows { needed: 1, got: 0 });
    }
    let find = |m: &IBig| ok.iter().find(|r| &r.m == m).map(|r| r.log_h0_over_log_m);
    let horizon = ok.iter().map(|r| r.m.clone()).max().expect("nonempty");
    let pick = |list: &[Designated]| -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for d in list.iter().filter(|d| d.m <= horizon) {
            out.push(find(&d.m).ok_or_else(|| {
                Error::DesignationMismatch(format!("designated m = {} is not a table row", d.m))
            })?);
        }
        Ok(out)
    };
    let valleys = pick(&designation.valleys)?;
    let hills = pick(&designation.hills)?;
    let all: Vec<f64> = ok.iter().map(|r| r.log_h0_over_log_m).collect();
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(KappaEstimates {
        kappa_r_minus_hat: if valleys.is_empty() { min(&all) } else { min(&valleys) },
        kappa_r_plus_hat: if hills.is_empty() { max(&all) } else { max(&hills) },
        kappa_sup_hat: max(&all),
        all_grid_min: min(&all),
        horizon_m: horizon,
    })
}

/// `ν̂^ℝ_vol = N − δ̂^sup` and its floor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NuVolEstimate {
    pub real: f64,
    pub integer: i64,
}

pub fn nu_vol_estimate<S: Scalar>(table: &RayScanTable<S>, window: usize) -> Result<NuVolEstimate> {
    let est = slope_estimates(table, window)?;
    let real = table.n as f64 - est.delta_sup_hat;
    Ok(NuVolEstimate { real, integer: real.floor() as i64 })
}

/// One cell of the Figure-1 grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Figure1Cell {
    pub t: f64,
    pub q: i64,
    pub s: BigFloat,
    pub vol: Option<BigFloat>,
    pub ln_vol_unit: f64,
    pub error: Option<String>,
}

/// Per-`t` slope and its classification.
#[derive(Clone, Debug, PartialEq)]
pub struct Figure1Column {
    pub t: f64,
    pub slope: Option<f64>,
    /// `hill` (slope nearer 1) or `valley` (nearer N/2).
    pub class: &'static str,
}

/// `vol(D_t + s·A)` on a `t × q` grid; `D_t` is normalized against `A` as
/// in [`ray_scan`].
pub fn figure1_grid(
    curve: &BoundaryCurve,
    a: &LatticeVector<BigFloat>,
    ts: &[f64],
    grid: &Grid,
    opts: &ScanOptions,
) -> Result<Vec<Figure1Cell>> {
    let bits = a.ctx();
    let mut cells = Vec::with_capacity(ts.len() * grid.q.len());
    for &t in ts {
        let tb = BigFloat::parse(&bits, &format!("{t:e}"))?;
        let d = curve.point(&tb)?;
        let opts = ScanOptions { keep_row_errors: true, ..opts.clone() };
        let table = ray_scan_vector(&d, a, grid, &opts)?;
        for r in table.rows {
            cells.push(Figure1Cell { t, q: r.q, s: r.s, vol: r.vol, ln_vol_unit: r.ln_vol_unit, error: r.error });
        }
    }
    Ok(cells)
}

/// Fits the slope of `ln vol` against `ln s` for every `t` column (with
/// intercept) and labels it.
pub fn figure1_columns(cells: &[Figure1Cell], n: usize) -> Vec<Figure1Column> {
    let mut ts: Vec<f64> = Vec::new();
    for c in cells {
        if ts.last() != Some(&c.t) {
            ts.push(c.t);
        }
    }
    let mid = 0.5 * (1.0 + n as f64 / 2.0);
    ts.into_iter()
        .map(|t| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = cells
                .iter()
                .filter(|c| c.t == t && c.error.is_none() && c.vol.as_ref().is_some_and(|v| v.is_positive()))
                .map(|c| (c.s.ln(), c.ln_vol_unit))
                .unzip();
            let slope = ols_slope(&xs, &ys);
            let class = match slope {
                Some(k) if k < mid => "hill",
                Some(_) => "valley",
                None => "undetermined",
            };
            Figure1Column { t, slope, class }
        })
        .collect()
}
