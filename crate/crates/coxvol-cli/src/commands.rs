//! Subcommand implementations. Each returns the full text it would print.

use std::path::Path;

use coxvol::asymptotics::*;
use coxvol::boundary::BoundaryCurve;
use coxvol::chamber::{reduce_with, ReductionConfig};
use coxvol::cusp::{build_recurrent_point, solve_l_for_delta, ExcursionSchedule};
use coxvol::cusp::{LengthGenerator, ScheduleGenerator};
use coxvol::lattice::LatticeVector;
use coxvol::scalar::{parse_rational, BigFloat, Exact, Rational, Scalar};
use sha2::{Digest, Sha256};

use crate::config::{BackendKind, RunConfig};
use crate::output::{fmt_f64, CsvDoc};
use crate::schema::{CertificateJson, SpecJson};
use crate::{CliError, Command, TOOL_VERSION};

pub const RAY_COLUMNS: [&str; 11] = [
    "q",
    "s",
    "t",
    "vol",
    "ln_vol_unit",
    "log_vol_over_log_s",
    "phi",
    "word_length",
    "clamped",
    "error",
    "windowed_slope",
];

pub const H0_COLUMNS: [&str; 9] =
    ["m", "h0", "log_h0_over_log_m", "word_length", "lower", "upper", "sandwich_ok", "error", "designation"];

pub const FIGURE1_COLUMNS: [&str; 6] = ["t", "q", "s", "vol", "ln_vol_unit", "error"];

pub fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<String, CliError> {
    match cmd {
        Command::Reduce { coords } => reduce(cfg, coords),
        Command::RayScan { spec, a } => ray_scan_cmd(cfg, spec, a.as_deref())?.render(),
        Command::H0Scan { spec, a, designated, m_max_bits } => {
            h0_scan_cmd(cfg, spec, a.as_deref(), *designated, *m_max_bits)?.render()
        }
        Command::Construct { l, delta_target, count, support } => {
            construct(cfg, l.as_deref(), delta_target.as_deref(), *count, support.as_deref())
        }
        Command::Figure1 { t_grid, s_grid } => {
            let ts = TGrid::parse(t_grid)?;
            let qs = s_grid.as_deref().map(parse_q_range).transpose()?;
            figure1(cfg, &ts, qs)?.render()
        }
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Shared metadata block: tool version, command, config hash and settings.
fn header(command: &str, cfg: &RunConfig, extra: &[(String, String)]) -> Vec<(String, String)> {
    let mut meta = vec![
        ("tool".to_string(), TOOL_VERSION.to_string()),
        ("command".to_string(), command.to_string()),
        ("config_hash".to_string(), cfg.hash(extra)),
    ];
    for (k, v) in cfg.pairs() {
        meta.push((format!("config.{k}"), v));
    }
    meta.extend(extra.iter().cloned());
    meta
}

fn split_list(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|p| !p.is_empty()).collect()
}

fn parse_vector<S: Scalar>(ctx: &S::Ctx, s: &str, n: Option<usize>) -> Result<LatticeVector<S>, CliError> {
    let parts = split_list(s);
    if let Some(n) = n {
        if parts.len() != n + 1 {
            return Err(CliError::Usage(format!("expected {} coordinates for N = {n}, got {}", n + 1, parts.len())));
        }
    }
    let coords = parts
        .iter()
        .map(|p| S::parse(ctx, p).map_err(|e| CliError::Usage(e.to_string())))
        .collect::<Result<Vec<S>, _>>()?;
    Ok(LatticeVector::new(coords)?)
}

fn read_spec(path: &Path, cfg: &RunConfig) -> Result<(SpecJson, String), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read spec {}: {e}", path.display())))?;
    let json = SpecJson::parse(&text)?;
    if let Some(n) = cfg.n {
        if n != json.n {
            return Err(CliError::Usage(format!("--n {n} disagrees with the spec's n = {}", json.n)));
        }
    }
    Ok((json, sha256_hex(text.as_bytes())))
}

fn scan_options(cfg: &RunConfig) -> ScanOptions {
    ScanOptions { max_steps: cfg.max_steps, depth: cfg.depth, keep_row_errors: true }
}

pub fn reduce(cfg: &RunConfig, coords: &str) -> Result<String, CliError> {
    let rc = cfg.max_steps.map(ReductionConfig::with_max_steps).unwrap_or_default();
    match cfg.backend {
        BackendKind::Exact => reduce_text::<Rational>(&Exact, coords, cfg.n, &rc),
        BackendKind::Float => reduce_text::<BigFloat>(&cfg.bits, coords, cfg.n, &rc),
    }
}

fn reduce_text<S: Scalar>(ctx: &S::Ctx, coords: &str, n: Option<usize>, rc: &ReductionConfig) -> Result<String, CliError> {
    let v = parse_vector::<S>(ctx, coords, n)?;
    let r = reduce_with(&v, rc)?;
    let reduced: Vec<String> = r.reduced.coords().iter().map(Scalar::to_decimal).collect();
    let word = match r.word.to_vec(4096) {
        Some(w) => format!("{w:?}"),
        None => "<omitted>".to_string(),
    };
    let mut out = format!(
        "reduced: {}\nword: {word}\nword_length: {}\nsteps: {}\n",
        reduced.join(","),
        r.word.len(),
        r.steps
    );
    if r.clamped() {
        out.push_str(&format!("clamped: {:?}\n", r.clamps));
    }
    Ok(out)
}

pub fn ray_scan_cmd(cfg: &RunConfig, spec_path: &Path, a: Option<&str>) -> Result<CsvDoc, CliError> {
    let (json, input_hash) = read_spec(spec_path, cfg)?;
    let grid = Grid::range(cfg.base, cfg.q_start.unwrap_or(4), cfg.q_end.unwrap_or(30));
    match cfg.backend {
        BackendKind::Exact => ray_doc::<Rational>(&Exact, cfg, &json, a, &grid, input_hash),
        BackendKind::Float => ray_doc::<BigFloat>(&cfg.bits, cfg, &json, a, &grid, input_hash),
    }
}

fn ray_doc<S: Scalar>(
    ctx: &S::Ctx,
    cfg: &RunConfig,
    json: &SpecJson,
    a: Option<&str>,
    grid: &Grid,
    input_hash: String,
) -> Result<CsvDoc, CliError> {
    let spec = json.to_spec::<S>(ctx)?;
    let a = match a {
        Some(s) => parse_vector::<S>(ctx, s, Some(json.n))?,
        None => LatticeVector::u(ctx, json.n)?,
    };
    let extra = vec![("input_sha256".to_string(), input_hash), ("grid".to_string(), grid.describe())];
    let table = ray_scan(&spec, &a, grid, &scan_options(cfg))?;

    let mut doc = CsvDoc::new(&RAY_COLUMNS);
    doc.meta = header("ray-scan", cfg, &extra);
    for (k, v) in &table.meta {
        doc.meta(format!("table.{k}"), v.clone());
    }
    let est = slope_estimates(&table, cfg.window);
    match &est {
        Ok(e) => {
            doc.meta("estimate.horizon_q", e.horizon_q.to_string());
            doc.meta("estimate.delta_inf_hat", fmt_f64(e.delta_inf_hat));
            doc.meta("estimate.delta_sup_hat", fmt_f64(e.delta_sup_hat));
            doc.meta("estimate.ratio_min", fmt_f64(e.ratio_min));
            doc.meta("estimate.ratio_max", fmt_f64(e.ratio_max));
            doc.meta("estimate.fitted_slope", fitted_slope(&table).map(fmt_f64).unwrap_or_default());
            doc.meta("estimate.nu_vol_real", fmt_f64(table.n as f64 - e.delta_sup_hat));
        }
        Err(e) => doc.meta("estimate", format!("unavailable ({e})")),
    }
    if let Some(sched) = json.pure_schedule()? {
        let t_max = table.rows.iter().map(|r| r.t).fold(0.0, f64::max);
        let des = designated_subsequences(&sched, t_max)?;
        let ts = |v: &[Designated]| v.iter().map(|d| format!("{:.4}", d.t)).collect::<Vec<_>>().join(" ");
        doc.meta("designation.hills_t", ts(&des.hills));
        doc.meta("designation.valleys_t", ts(&des.valleys));
    }
    let windowed = est.as_ref().map(|e| e.windowed.clone()).unwrap_or_else(|_| vec![None; table.rows.len()]);
    for (r, w) in table.rows.iter().zip(windowed) {
        doc.rows.push(vec![
            r.q.to_string(),
            r.s.to_decimal(),
            fmt_f64(r.t),
            r.vol.as_ref().map(Scalar::to_decimal).unwrap_or_default(),
            fmt_f64(r.ln_vol_unit),
            fmt_f64(r.log_vol_over_log_s),
            fmt_f64(r.phi),
            r.word_length.to_string(),
            r.clamped.to_string(),
            r.error.clone().unwrap_or_default(),
            w.map(fmt_f64).unwrap_or_default(),
        ]);
    }
    Ok(doc)
}

pub fn h0_scan_cmd(
    cfg: &RunConfig,
    spec_path: &Path,
    a: Option<&str>,
    designated: bool,
    m_max_bits: u32,
) -> Result<CsvDoc, CliError> {
    if cfg.backend != BackendKind::Exact {
        return Err(CliError::Usage("h0-scan runs on the exact backend only".into()));
    }
    let (json, input_hash) = read_spec(spec_path, cfg)?;
    let spec = json.to_spec::<Rational>(&Exact)?;
    let a = match a {
        Some(s) => parse_vector::<Rational>(&Exact, s, Some(json.n))?,
        None => LatticeVector::u(&Exact, json.n)?.scale(&Rational::from(2)),
    };
    let mut extra = vec![("input_sha256".to_string(), input_hash)];
    let mut tags: Vec<(coxvol::asymptotics::Designated, &'static str)> = Vec::new();
    let mut designation = None;
    let ms = if designated {
        let sched = json
            .pure_schedule()?
            .ok_or_else(|| CliError::Usage("--designated needs a purely recurrent schedule spec".into()))?;
        let horizon_t = 0.5 * m_max_bits as f64 * std::f64::consts::LN_2 + 1.0;
        let des = designated_subsequences(&sched, horizon_t)?;
        let cap = Rational::from(2).pow(m_max_bits as usize);
        for d in &des.hills {
            tags.push((d.clone(), "hill"));
        }
        for d in &des.valleys {
            tags.push((d.clone(), "valley"));
        }
        tags.retain(|(d, _)| Rational::from(d.m.clone()) <= cap);
        let mut ms: Vec<_> = tags.iter().map(|(d, _)| d.m.clone()).collect();
        ms.sort();
        ms.dedup();
        extra.push(("m_grid".to_string(), format!("designated, m <= 2^{m_max_bits}")));
        extra.push(("designation".to_string(), des.derivation.clone()));
        designation = Some(des);
        ms
    } else {
        let grid = Grid::range(cfg.base, cfg.q_start.unwrap_or(1), cfg.q_end.unwrap_or(20));
        extra.push(("m_grid".to_string(), format!("ceil of {}", grid.describe())));
        m_grid(&grid)
    };
    let table = h0_scan(&spec, &a, &ms, &scan_options(cfg))?;

    let mut doc = CsvDoc::new(&H0_COLUMNS);
    doc.meta = header("h0-scan", cfg, &extra);
    for (k, v) in &table.meta {
        doc.meta(format!("table.{k}"), v.clone());
    }
    if let Ok(k) = table.fitted_slope() {
        doc.meta("estimate.fitted_slope", fmt_f64(k));
    }
    if let Some(des) = &designation {
        if let Ok(k) = kappa_estimates(&table, des) {
            doc.meta("estimate.horizon_m", k.horizon_m.to_string());
            doc.meta("estimate.kappa_r_minus_hat", fmt_f64(k.kappa_r_minus_hat));
            doc.meta("estimate.kappa_r_plus_hat", fmt_f64(k.kappa_r_plus_hat));
            doc.meta("estimate.kappa_sup_hat", fmt_f64(k.kappa_sup_hat));
            doc.meta("estimate.all_grid_min", fmt_f64(k.all_grid_min));
        }
    }
    for r in &table.rows {
        let tag: Vec<&str> = tags.iter().filter(|(d, _)| d.m == r.m).map(|(_, t)| *t).collect();
        doc.rows.push(vec![
            r.m.to_string(),
            r.h0.as_ref().map(ToString::to_string).unwrap_or_default(),
            fmt_f64(r.log_h0_over_log_m),
            r.word_length.to_string(),
            r.lower.as_ref().map(Scalar::to_decimal).unwrap_or_default(),
            r.upper.as_ref().map(Scalar::to_decimal).unwrap_or_default(),
            r.sandwich_ok.map(|b| b.to_string()).unwrap_or_default(),
            r.error.clone().unwrap_or_default(),
            tag.join("+"),
        ]);
    }
    Ok(doc)
}

/// Length family for a target `δ^inf`: super-geometric at 1, `n^10` at
/// `N/2`, geometric `L^n` with `L` found by bisection in between.
pub fn lengths_for_delta(delta: &Rational, n: usize) -> Result<LengthGenerator, CliError> {
    let half = Rational::from(n as i64) / Rational::from(2);
    if *delta == Rational::ONE {
        Ok(LengthGenerator::SuperGeometric)
    } else if *delta == half {
        Ok(LengthGenerator::Polynomial { exponent: 10 })
    } else if *delta > Rational::ONE && *delta < half {
        let l = solve_l_for_delta(Scalar::to_f64(delta), n, 1e-12)?;
        Ok(LengthGenerator::Geometric { l })
    } else {
        Err(CliError::Usage(format!("delta target {delta} lies outside [1, {half}]")))
    }
}

pub fn construct(
    cfg: &RunConfig,
    l: Option<&str>,
    delta_target: Option<&str>,
    count: usize,
    support: Option<&str>,
) -> Result<String, CliError> {
    let n = cfg.n.unwrap_or(3);
    let usage = |m: String| CliError::Usage(m);
    let lengths = match (l, delta_target) {
        (Some(l), None) => {
            let l: f64 = l.trim().parse().map_err(|e| usage(format!("--L `{l}`: {e}")))?;
            if !(l > 1.0 && l.is_finite()) {
                return Err(usage(format!("--L must exceed 1, got {l}")));
            }
            LengthGenerator::Geometric { l }
        }
        (None, Some(d)) => lengths_for_delta(&parse_rational(d).map_err(|e| usage(e.to_string()))?, n)?,
        _ => return Err(usage("give exactly one of --L and --delta-target".into())),
    };
    let support = match support {
        None => (0..=n).collect(),
        Some(s) => split_list(s)
            .iter()
            .map(|p| p.parse::<usize>().map_err(|e| usage(format!("--support `{p}`: {e}"))))
            .collect::<Result<Vec<_>, _>>()?,
    };
    if count == 0 {
        return Err(usage("--count must be positive".into()));
    }
    let gen = ScheduleGenerator { lengths: lengths.clone(), count };
    let schedule = ExcursionSchedule::from_generator(n, support, gen)?;
    let depth = cfg.depth.unwrap_or(count).min(count);
    let rp = build_recurrent_point::<Rational>(&schedule, depth)?;

    let mut json = SpecJson::from_spec(&rp.spec)?;
    json.certificate = Some(CertificateJson::from_certificate(&rp.certificate));
    let mut extra = vec![("lengths".to_string(), lengths.describe()), ("count".to_string(), count.to_string())];
    if let Some(d) = delta_target {
        extra.push(("delta_target".to_string(), d.trim().to_string()));
    }
    if let LengthGenerator::Geometric { l } = lengths {
        extra.push(("l".to_string(), format!("{l}")));
        let half = n as f64 / 2.0;
        let target = half - (half - 1.0) * (l - 1.0) / (l + 1.0);
        let target = format!("{target}");
        extra.push(("delta_inf_predicted".to_string(), target));
    }
    for (k, v) in header("construct", cfg, &extra) {
        json.meta.insert(k, v);
    }
    let mut out = json.to_pretty();
    out.push('\n');
    Ok(out)
}

/// The Figure-1 curve: from `ω_{0̂1}` to `ω_{0̂2}` in the plane cut by
/// `u + 2ω_N`.
pub fn figure1_curve(n: usize, bits: usize) -> Result<(BoundaryCurve, [LatticeVector<BigFloat>; 3]), CliError> {
    let p0 = LatticeVector::<BigFloat>::omega_hat(&bits, n, 0, 1)?;
    let p1 = LatticeVector::<BigFloat>::omega_hat(&bits, n, 0, 2)?;
    let aux = LatticeVector::<BigFloat>::u(&bits, n)?
        .add_scaled(&BigFloat::from_i64(&bits, 2), &LatticeVector::omega(&bits, n, n)?)?;
    let curve = BoundaryCurve::new(&p0, &p1, &aux)?;
    Ok((curve, [p0, p1, aux]))
}

/// The `t` values of a Figure-1 run.
#[derive(Clone, Debug, PartialEq)]
pub enum TGrid {
    Count(usize),
    Values(Vec<f64>),
}

impl TGrid {
    /// A bare integer is a count; anything else is a list of values.
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let usage = |m: String| CliError::Usage(format!("--t-grid: {m}"));
        let s = s.trim();
        if let Ok(k) = s.parse::<usize>() {
            if k < 2 {
                return Err(usage("a count must be at least 2".into()));
            }
            return Ok(TGrid::Count(k));
        }
        let mut ts = Vec::new();
        for p in split_list(s) {
            let t: f64 = p.parse().map_err(|e| usage(format!("`{p}`: {e}")))?;
            if !(0.0..=1.0).contains(&t) {
                return Err(usage(format!("t = {t} lies outside [0, 1]")));
            }
            ts.push(t);
        }
        if ts.is_empty() {
            return Err(usage("no values".into()));
        }
        Ok(TGrid::Values(ts))
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            TGrid::Count(k) => (0..*k).map(|i| i as f64 / (*k - 1) as f64).collect(),
            TGrid::Values(v) => v.clone(),
        }
    }

    fn meta(&self) -> (String, String) {
        match self {
            TGrid::Count(k) => ("t_count".into(), k.to_string()),
            TGrid::Values(v) => ("t_values".into(), v.iter().map(|t| fmt_f64(*t)).collect::<Vec<_>>().join(" ")),
        }
    }
}

/// `Q0..Q1`, inclusive.
pub fn parse_q_range(s: &str) -> Result<(i64, i64), CliError> {
    let usage = || CliError::Usage(format!("--s-grid `{s}`: expected Q0..Q1"));
    let (a, b) = s.trim().split_once("..").ok_or_else(usage)?;
    let a: i64 = a.trim().parse().map_err(|_| usage())?;
    let b: i64 = b.trim().parse().map_err(|_| usage())?;
    Ok((a, b))
}

pub fn figure1(cfg: &RunConfig, t_grid: &TGrid, q_range: Option<(i64, i64)>) -> Result<CsvDoc, CliError> {
    let n = cfg.n.unwrap_or(3);
    let bits = cfg.bits;
    let (curve, [p0, p1, aux]) = figure1_curve(n, bits)?;
    let ts = t_grid.values();
    let (q0, q1) = q_range.unwrap_or((cfg.q_start.unwrap_or(4), cfg.q_end.unwrap_or(24)));
    let grid = Grid::range(cfg.base, q0, q1);
    let a = LatticeVector::<BigFloat>::u(&bits, n)?;
    let cells = figure1_grid(&curve, &a, &ts, &grid, &scan_options(cfg))?;
    let cols = figure1_columns(&cells, n);

    let show = |v: &LatticeVector<BigFloat>| v.coords().iter().map(|x| fmt_f64(x.to_f64())).collect::<Vec<_>>().join(" ");
    let extra = vec![
        ("curve.p0".to_string(), show(&p0)),
        ("curve.p1".to_string(), show(&p1)),
        ("curve.aux".to_string(), show(&aux)),
        ("grid".to_string(), grid.describe()),
        t_grid.meta(),
        ("a".to_string(), "u".to_string()),
    ];
    let mut doc = CsvDoc::new(&FIGURE1_COLUMNS);
    doc.meta = header("figure1", cfg, &extra);
    doc.meta("backend", format!("float:{bits}"));
    doc.meta("curve.theta", format!("{:.12}", curve.theta().to_f64()));
    for c in &cols {
        let slope = c.slope.map(|k| format!("{k:.6}")).unwrap_or_default();
        doc.meta(format!("slope.t_{}", c.t), format!("{slope} {}", c.class));
    }
    for c in &cells {
        doc.rows.push(vec![
            fmt_f64(c.t),
            c.q.to_string(),
            c.s.to_decimal(),
            c.vol.as_ref().map(Scalar::to_decimal).unwrap_or_default(),
            fmt_f64(c.ln_vol_unit),
            c.error.clone().unwrap_or_default(),
        ]);
    }
    Ok(doc)
}
