//! Cusps, heights, the distance proxy and excursion schedules.

use std::fmt;

use dashu::integer::IBig;

use crate::boundary::{projective_distance, BoundaryPointSpec, RecurrentProgram};
use crate::chamber::{apply_word, reduce_with, ReductionConfig};
use crate::error::{Error, Result};
use crate::lattice::{check_n, norm_sq, pair, pair_with_u, LatticeVector};
use crate::scalar::{BigFloat, Exact, Rational, Scalar};
use crate::volume::SymmetricProfile;
use crate::word::Word;

/// Unordered pair `{i, j}` labelling the cusp of `ω_{îĵ}`; stored with `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CuspId {
    i: usize,
    j: usize,
}

impl CuspId {
    pub fn new(i: usize, j: usize, n: usize) -> Result<Self> {
        if i == j || i > n || j > n {
            return Err(Error::InvalidCusp { i, j, n });
        }
        Ok(Self { i: i.min(j), j: i.max(j) })
    }
    pub fn i(&self) -> usize {
        self.i
    }
    pub fn j(&self) -> usize {
        self.j
    }
    pub fn contains(&self, k: usize) -> bool {
        self.i == k || self.j == k
    }
    /// `ω_{îĵ}` in the given backend.
    pub fn vector<S: Scalar>(&self, ctx: &S::Ctx, n: usize) -> Result<LatticeVector<S>> {
        LatticeVector::omega_hat(ctx, n, self.i, self.j)
    }
}

impl fmt::Display for CuspId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.i, self.j)
    }
}

fn cusp_pairing<S: Scalar>(c: CuspId, v: &LatticeVector<S>) -> Result<(S, S)> {
    let q = norm_sq(v);
    if !q.is_positive() {
        return Err(Error::NonTimelike);
    }
    let w = pair(v, &c.vector(&v.ctx(), v.n())?)?;
    if !w.is_positive() {
        return Err(Error::ZeroPairing);
    }
    Ok((q, w))
}

/// `Ht_{ij}(v) = ‖v‖ / ⟨v, ω_{îĵ}⟩`, at the backend's working precision.
pub fn height<S: Scalar>(c: CuspId, v: &LatticeVector<S>) -> Result<BigFloat> {
    let (q, w) = cusp_pairing(c, v)?;
    let bits = S::working_bits(&v.ctx());
    Ok(q.to_bigfloat(bits).sqrt() / w.to_bigfloat(bits))
}

/// `Ht_{ij}(v)²`, exact in the backend.
pub fn height_sq<S: Scalar>(c: CuspId, v: &LatticeVector<S>) -> Result<S> {
    let (q, w) = cusp_pairing(c, v)?;
    Ok(q / (w.clone() * w))
}

/// `Ht_{ij}(v) ≥ level`, decided without square roots.
pub fn in_horoball<S: Scalar>(c: CuspId, v: &LatticeVector<S>, level: &S) -> Result<bool> {
    let (q, w) = cusp_pairing(c, v)?;
    if !level.is_positive() {
        return Ok(true);
    }
    Ok(q >= level.clone() * level.clone() * w.clone() * w)
}

/// `t = ½·log((1+s)/s)`.
pub fn s_to_t(s: &BigFloat) -> Result<BigFloat> {
    if !s.is_positive() {
        return Err(Error::Domain(format!("s_to_t needs s > 0, got {s}")));
    }
    let one = BigFloat::one(&s.ctx());
    let half = BigFloat::from_frac(&s.ctx(), 1, 2);
    Ok(half * ((one + s.clone()) / s.clone()).ln_full())
}

/// `s = 1/(e^{2t} − 1)`, the inverse of [`s_to_t`].
pub fn t_to_s(t: &BigFloat) -> Result<BigFloat> {
    if !t.is_positive() {
        return Err(Error::Domain(format!("t_to_s needs t > 0, got {t}")));
    }
    let one = BigFloat::one(&t.ctx());
    let two = BigFloat::from_i64(&t.ctx(), 2);
    Ok(one.clone() / ((two * t.clone()).exp() - one))
}

/// [`s_to_t`] for any backend, in `f64`. Accurate for `s` far below the
/// `f64` range.
pub fn s_to_t_f64<S: Scalar>(s: &S) -> f64 {
    let ln_s = s.ln();
    let ln1p = if ln_s < -30.0 { s.to_f64() } else { (s.to_f64()).ln_1p() };
    0.5 * (ln1p - ln_s)
}

/// `ln vol_1(reduce(v)) − ½ ln⟨v,v⟩`: log of `vol_1` at the unit
/// representative of `[v]`.
pub fn phi_proxy<S: Scalar>(v: &LatticeVector<S>) -> Result<f64> {
    phi_proxy_with(v, &ReductionConfig::default())
}

pub fn phi_proxy_with<S: Scalar>(v: &LatticeVector<S>, cfg: &ReductionConfig) -> Result<f64> {
    let q = norm_sq(v);
    if !q.is_positive() {
        return Err(Error::NonTimelike);
    }
    let r = reduce_with(v, cfg)?;
    Ok(phi_from_reduced(&r.reduced, &q))
}

/// φ from an already reduced vector and the (invariant) norm square.
pub fn phi_from_reduced<S: Scalar>(reduced: &LatticeVector<S>, norm_sq: &S) -> f64 {
    SymmetricProfile::of(reduced).taus[1].ln() - 0.5 * norm_sq.ln()
}

/// `φ(u)`, the additive offset making the proxy vanish at the basepoint `u`:
/// `ln(N+1) − ½ ln(2(N+1))`.
pub fn calibration_offset(n: usize) -> f64 {
    let m = (n + 1) as f64;
    m.ln() - 0.5 * (2.0 * m).ln()
}

/// `(σ_i σ_j)^k`.
pub fn excursion_word(c: CuspId, k: u64) -> Word {
    Word::alternating_power(c.i, c.j, k)
}

/// Largest unipotent power produced by a length generator.
pub const K_CAP: u64 = 1_000_000_000;
/// Default smallest admissible power.
pub const DEFAULT_K_MIN: u64 = 3;
/// Default lower bound on `log k` for every excursion.
pub const DEFAULT_GLUING_THRESHOLD: f64 = 1.0;

/// Excursion length sequences `ℓ_n` (n ≥ 1).
#[derive(Clone, Debug, PartialEq)]
pub enum LengthGenerator {
    /// `ℓ_n = Lⁿ`.
    Geometric { l: f64 },
    /// `ℓ_n = n^p`.
    Polynomial { exponent: u32 },
    /// `ℓ_n = 10^{10^n}`.
    SuperGeometric,
}

impl LengthGenerator {
    /// `ℓ_n`; may be `+inf` for the fast-growing families.
    pub fn length(&self, n: u32) -> f64 {
        match self {
            LengthGenerator::Geometric { l } => l.powi(n as i32),
            LengthGenerator::Polynomial { exponent } => (n as f64).powi(*exponent as i32),
            LengthGenerator::SuperGeometric => 10f64.powf(10f64.powi(n as i32)),
        }
    }

    /// `k_n = round(exp(ℓ_n))`, capped at [`K_CAP`].
    pub fn power(&self, n: u32) -> u64 {
        let l = self.length(n);
        if l >= (K_CAP as f64).ln() {
            K_CAP
        } else {
            (l.exp().round() as u64).min(K_CAP)
        }
    }

    pub fn describe(&self) -> String {
        match self {
            LengthGenerator::Geometric { l } => format!("geometric(L={l})"),
            LengthGenerator::Polynomial { exponent } => format!("polynomial(n^{exponent})"),
            LengthGenerator::SuperGeometric => "supergeometric(10^10^n)".into(),
        }
    }
}

/// Generator settings recorded alongside a schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleGenerator {
    pub lengths: LengthGenerator,
    pub count: usize,
}

/// One excursion `(σ_a σ_b)^power` into the cusp `cusp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Excursion {
    pub cusp: CuspId,
    pub power: u64,
}

/// A sequence of cusp excursions inside the subgroup generated by `support`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExcursionSchedule {
    /// Rank parameter of the ambient lattice (`N+1` coordinates).
    pub n: usize,
    pub support: Vec<usize>,
    pub excursions: Vec<Excursion>,
    pub generator: Option<ScheduleGenerator>,
    pub k_min: u64,
    pub gluing_threshold: f64,
}

impl ExcursionSchedule {
    /// Explicit excursions with default thresholds; validated.
    pub fn new(n: usize, support: Vec<usize>, excursions: Vec<Excursion>) -> Result<Self> {
        let s = Self {
            n,
            support,
            excursions,
            generator: None,
            k_min: DEFAULT_K_MIN,
            gluing_threshold: DEFAULT_GLUING_THRESHOLD,
        };
        s.validate()?;
        Ok(s)
    }

    /// Cusps `{s_m, s_{m+1}}` cycling through the support, with powers from
    /// the length generator.
    pub fn from_generator(n: usize, support: Vec<usize>, gen: ScheduleGenerator) -> Result<Self> {
        let mut support = support;
        support.sort_unstable();
        support.dedup();
        let r = support.len();
        if r < 3 {
            return Err(Error::InvalidSchedule(format!("support needs at least 3 indices, got {r}")));
        }
        let mut excursions = Vec::with_capacity(gen.count);
        for m in 0..gen.count {
            let cusp = CuspId::new(support[m % r], support[(m + 1) % r], n)?;
            excursions.push(Excursion { cusp, power: gen.lengths.power(m as u32 + 1) });
        }
        let s = Self {
            n,
            support,
            excursions,
            generator: Some(gen),
            k_min: DEFAULT_K_MIN,
            gluing_threshold: DEFAULT_GLUING_THRESHOLD,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.excursions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.excursions.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        check_n(self.n)?;
        let bad = |m: String| Err(Error::InvalidSchedule(m));
        let mut sorted = self.support.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.support.len() {
            return bad("support has repeated indices".into());
        }
        if sorted.len() < 3 {
            return bad(format!("support needs at least 3 indices, got {}", sorted.len()));
        }
        if let Some(&m) = sorted.last() {
            if m > self.n {
                return bad(format!("support index {m} out of range for N = {}", self.n));
            }
        }
        if self.excursions.is_empty() {
            return bad("no excursions".into());
        }
        for (idx, e) in self.excursions.iter().enumerate() {
            if !sorted.contains(&e.cusp.i) || !sorted.contains(&e.cusp.j) {
                return bad(format!("excursion {idx} uses cusp {} outside the support", e.cusp));
            }
            if e.power < self.k_min {
                return bad(format!("excursion {idx} has power {} < k_min = {}", e.power, self.k_min));
            }
            if (e.power as f64).ln() <= self.gluing_threshold {
                return bad(format!("excursion {idx}: log k = {:.3} is below the gluing threshold", (e.power as f64).ln()));
            }
            if idx > 0 {
                let prev = self.excursions[idx - 1].cusp;
                let shared = [e.cusp.i, e.cusp.j].iter().filter(|&&k| prev.contains(k)).count();
                if shared == 0 {
                    return bad(format!("excursions {} and {idx} use non-adjacent cusps", idx - 1));
                }
            }
        }
        Ok(())
    }

    /// The first `depth` excursions.
    pub fn truncated(&self, depth: usize) -> Result<Self> {
        if depth == 0 || depth > self.len() {
            return Err(Error::InvalidSchedule(format!(
                "depth {depth} outside 1..={}",
                self.len()
            )));
        }
        let mut s = self.clone();
        s.excursions.truncate(depth);
        if let Some(g) = &mut s.generator {
            g.count = depth;
        }
        Ok(s)
    }

    /// `W_d = e_1 ⋯ e_d`. Each `e_n` alternates the two cusp indices and
    /// starts with the lowest index differing from the previous last letter,
    /// so the concatenation is reduced.
    pub fn word(&self, depth: usize) -> Word {
        let mut w = Word::new();
        for e in self.excursions.iter().take(depth) {
            let (a, b) = match w.last_letter() {
                Some(l) if l == e.cusp.i => (e.cusp.j, e.cusp.i),
                _ => (e.cusp.i, e.cusp.j),
            };
            w.push_alternating(a, b, 2 * e.power);
        }
        w
    }

    /// Exact orbit points `g_m·u` for `m = 0..=depth`, with `g_m` the prefix
    /// of the first `m` excursions (each `g_m` an integer vector).
    pub fn orbit_points(&self, depth: usize) -> Result<Vec<LatticeVector<Rational>>> {
        let u = LatticeVector::<Rational>::u(&Exact, self.n)?;
        let mut out = vec![u.clone()];
        for m in 1..=depth.min(self.len()) {
            out.push(apply_word(&self.word(m), &u)?);
        }
        Ok(out)
    }

    /// Exact limit approximation `g_d·u` scaled so that `⟨p, u⟩ = N+1`.
    pub fn limit_point(&self, depth: usize) -> Result<LatticeVector<Rational>> {
        let u = LatticeVector::<Rational>::u(&Exact, self.n)?;
        let g = apply_word(&self.word(depth), &u)?;
        Ok(normalize_u_slice(&g))
    }
}

/// Scales `v` so that `⟨v, u⟩ = N+1`.
pub fn normalize_u_slice<S: Scalar>(v: &LatticeVector<S>) -> LatticeVector<S> {
    let target = S::from_i64(&v.ctx(), v.n() as i64 + 1);
    v.scale(&(target / pair_with_u(v)))
}

/// Convergence record of a truncated construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    /// `ln` of the projective distances between consecutive truncations
    /// `[g_{m−1}u]`, `[g_m u]`, m = 1..=depth.
    pub ln_increments: Vec<f64>,
    /// Mean per-excursion contraction factor of the increments (needs at
    /// least two increments).
    pub decay_rate: Option<f64>,
}

impl Certificate {
    pub fn from_orbit(points: &[LatticeVector<Rational>]) -> Result<Self> {
        let mut ln_increments = Vec::with_capacity(points.len().saturating_sub(1));
        for w in points.windows(2) {
            ln_increments.push(projective_distance(&w[0], &w[1])?.ln());
        }
        let decay_rate = (ln_increments.len() >= 2).then(|| {
            let k = ln_increments.len() - 1;
            ((ln_increments[k] - ln_increments[0]) / k as f64).exp()
        });
        Ok(Self { ln_increments, decay_rate })
    }

    /// Every increment must be smaller than the previous one and the mean
    /// contraction must be below `max_rate`.
    pub fn check(&self, max_rate: f64) -> Result<()> {
        for (m, w) in self.ln_increments.windows(2).enumerate() {
            if !(w[1] < w[0]) {
                return Err(Error::NonConvergent(format!(
                    "increment {} does not shrink (ln {:.3} -> {:.3})",
                    m + 2,
                    w[0],
                    w[1]
                )));
            }
        }
        if let Some(r) = self.decay_rate {
            if !(r < max_rate) {
                return Err(Error::NonConvergent(format!("decay rate {r:.3e} is not below {max_rate}")));
            }
        }
        Ok(())
    }
}

/// A constructed recurrent point with its certificate.
#[derive(Clone, Debug)]
pub struct RecurrentPoint<S> {
    pub spec: BoundaryPointSpec<S>,
    pub certificate: Certificate,
}

/// Default bound on the certified contraction rate.
pub const DEFAULT_MAX_DECAY_RATE: f64 = 0.5;

/// Truncates the schedule at `depth`, certifies geometric decay of the
/// successive approximations and returns the boundary spec.
pub fn build_recurrent_point<S: Scalar>(schedule: &ExcursionSchedule, depth: usize) -> Result<RecurrentPoint<S>> {
    schedule.validate()?;
    let sched = schedule.truncated(depth)?;
    let points: Vec<LatticeVector<Rational>> =
        sched.orbit_points(depth)?.iter().map(normalize_u_slice).collect();
    let certificate = Certificate::from_orbit(&points)?;
    certificate.check(DEFAULT_MAX_DECAY_RATE)?;
    let spec = BoundaryPointSpec {
        n: sched.n,
        word: Word::new(),
        divergent: Default::default(),
        recurrent: Some(RecurrentProgram::Schedule(sched)),
    };
    Ok(RecurrentPoint { spec, certificate })
}

/// `(L−1)/(L+1)`.
pub fn limsup_ratio<S: Scalar>(l: &S) -> Result<S> {
    let one = S::one(&l.ctx());
    if *l <= one {
        return Err(Error::Domain(format!("L must exceed 1, got {l}")));
    }
    Ok((l.clone() - one.clone()) / (l.clone() + one))
}

/// `N/2 − ((N−2)/2)·(L−1)/(L+1)`.
pub fn delta_inf_target<S: Scalar>(l: &S, n: usize) -> Result<S> {
    check_n(n)?;
    let ctx = l.ctx();
    let r = limsup_ratio(l)?;
    Ok(S::from_frac(&ctx, n as i64, 2) - S::from_frac(&ctx, n as i64 - 2, 2) * r)
}

/// Inverts [`delta_inf_target`] in `L` by bisection (the map is decreasing
/// in `L`). Targets must lie strictly inside `(1, N/2)`.
pub fn solve_l_for_delta(delta: f64, n: usize, tol: f64) -> Result<f64> {
    check_n(n)?;
    let half = n as f64 / 2.0;
    if !(delta > 1.0 && delta < half) {
        return Err(Error::Domain(format!("delta target {delta} must lie strictly inside (1, {half})")));
    }
    let f = |l: f64| half - (half - 1.0) * (l - 1.0) / (l + 1.0);
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    while f(hi) > delta {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::NonConvergent("bracketing L failed".into()));
        }
    }
    while hi - lo > tol * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if f(mid) > delta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `e^{2t̃}` for the point of the ray `s·u + p` closest to `x`, where `p` is
/// normalized by `⟨u, p⟩ = N+1`: `(⟨u,x⟩ − ⟨p,x⟩)/⟨p,x⟩`.
pub fn closest_approach_ratio(p: &LatticeVector<Rational>, x: &LatticeVector<Rational>) -> Result<Rational> {
    let px = pair(p, x)?;
    if px <= Rational::ZERO {
        return Err(Error::ZeroPairing);
    }
    let ux = pair_with_u(x);
    Ok((ux - px.clone()) / px)
}

/// `⌊√q⌋` for a nonnegative rational.
pub fn floor_sqrt(q: &Rational) -> IBig {
    crate::scalar::isqrt(&q.floor())
}

/// `(vol_1(â)/Ht, vol_N(â)/Ht^{N−2})` for a nef `a` with `â = a/‖a‖`, in
/// `f64` logs-then-exp so that deep cusp points do not overflow.
pub fn cusp_volume_ratios<S: Scalar>(c: CuspId, a: &LatticeVector<S>) -> Result<(f64, f64)> {
    let (q, w) = cusp_pairing(c, a)?;
    if a.coords().iter().any(|x| x.is_negative()) {
        return Err(Error::NotNef);
    }
    let n = a.n() as f64;
    let prof = SymmetricProfile::of(a);
    let ln_norm = 0.5 * q.ln();
    let ln_ht = ln_norm - w.ln();
    let r1 = prof.taus[1].ln() - ln_norm - ln_ht;
    let rn = prof.taus[a.n()].ln() - n * ln_norm - (n - 2.0) * ln_ht;
    Ok((r1.exp(), rn.exp()))
}
