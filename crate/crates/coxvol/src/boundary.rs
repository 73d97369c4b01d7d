//! Constructive boundary points and their divergent–recurrent decomposition.

use std::collections::BTreeMap;

use crate::chamber::{apply_word, reduce_with, ReductionConfig};
use crate::cusp::{normalize_u_slice, Certificate, ExcursionSchedule, DEFAULT_MAX_DECAY_RATE};
use crate::error::{Error, Result};
use crate::lattice::{embed_at, is_isotropic, pair, pair_with_omega, pair_with_u, LatticeVector};
use crate::scalar::{BigFloat, Rational, Scalar};
use crate::word::Word;

/// Default reduction depth used to look for parabolic content.
pub const DEFAULT_PARABOLIC_DEPTH: u64 = 10;

/// Recurrent part of a boundary spec.
///
/// Programs live in the lattice of rank `k+1`, `k = N − |S_d|`, and are
/// placed on the indices outside `S_d` by the conformal embedding. `support`
/// is given in those local indices.
#[derive(Clone, Debug, PartialEq)]
pub enum RecurrentProgram<S> {
    ExplicitIsotropic { support: Vec<usize>, vector: LatticeVector<S> },
    Schedule(ExcursionSchedule),
}

impl<S: Scalar> RecurrentProgram<S> {
    /// Rank parameter `k` of the lattice the program lives in.
    pub fn rank_n(&self) -> usize {
        match self {
            RecurrentProgram::ExplicitIsotropic { vector, .. } => vector.n(),
            RecurrentProgram::Schedule(s) => s.n,
        }
    }

    pub fn local_support(&self) -> Vec<usize> {
        match self {
            RecurrentProgram::ExplicitIsotropic { support, .. } => support.clone(),
            RecurrentProgram::Schedule(s) => s.support.clone(),
        }
    }
}

/// `w·(q_d + q_r)` with `q_d = Σ_{i∈S_d} c_i ω_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryPointSpec<S> {
    pub n: usize,
    pub word: Word,
    pub divergent: BTreeMap<usize, S>,
    pub recurrent: Option<RecurrentProgram<S>>,
}

impl<S: Scalar> BoundaryPointSpec<S> {
    /// A purely divergent spec.
    pub fn divergent(n: usize, word: Word, coeffs: BTreeMap<usize, S>) -> Result<Self> {
        let s = Self { n, word, divergent: coeffs, recurrent: None };
        s.validate()?;
        Ok(s)
    }

    /// The spec of `ω_{îĵ}`.
    pub fn omega_hat(ctx: &S::Ctx, n: usize, i: usize, j: usize) -> Result<Self> {
        let v = LatticeVector::<S>::omega_hat(ctx, n, i, j)?;
        let coeffs = (0..=n).filter(|&k| k != i && k != j).map(|k| (k, v.coord(k).clone())).collect();
        Self::divergent(n, Word::new(), coeffs)
    }

    /// The indices carrying the recurrent program, in increasing order.
    pub fn embedding_positions(&self) -> Vec<usize> {
        (0..=self.n).filter(|k| !self.divergent.contains_key(k)).collect()
    }

    pub fn s_d(&self) -> Vec<usize> {
        self.divergent.keys().copied().collect()
    }

    /// Global indices of the recurrent support.
    pub fn s_r(&self) -> Vec<usize> {
        let pos = self.embedding_positions();
        match &self.recurrent {
            None => Vec::new(),
            Some(p) => {
                let mut v: Vec<usize> = p.local_support().iter().map(|&l| pos[l]).collect();
                v.sort_unstable();
                v
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        crate::lattice::check_n(self.n)?;
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if let Some(m) = self.word.max_letter() {
            if m > self.n {
                return Err(Error::IndexOutOfRange { index: m, n: self.n });
            }
        }
        for (&k, c) in &self.divergent {
            if k > self.n {
                return Err(Error::IndexOutOfRange { index: k, n: self.n });
            }
            if !c.is_positive() {
                return bad(format!("divergent coefficient at {k} must be positive"));
            }
        }
        if self.divergent.len() > self.n.saturating_sub(1) {
            return bad(format!("|S_d| = {} exceeds N-1 = {}", self.divergent.len(), self.n - 1));
        }
        let Some(prog) = &self.recurrent else {
            if self.divergent.is_empty() {
                return bad("spec has neither a divergent nor a recurrent part".into());
            }
            return Ok(());
        };
        let k = self.n - self.divergent.len();
        if prog.rank_n() != k {
            return Err(Error::InvalidRecurrent(format!(
                "program rank N' = {} but N - |S_d| = {k}",
                prog.rank_n()
            )));
        }
        let mut sup = prog.local_support();
        sup.sort_unstable();
        sup.dedup();
        if sup.len() < 3 {
            return Err(Error::InvalidRecurrent(format!("|S_r| = {} must be at least 3", sup.len())));
        }
        if sup.iter().any(|&l| l > k) {
            return Err(Error::InvalidRecurrent("support index outside the program lattice".into()));
        }
        match prog {
            RecurrentProgram::Schedule(s) => s.validate()?,
            RecurrentProgram::ExplicitIsotropic { vector, .. } => {
                if !is_isotropic(vector) {
                    return Err(Error::InvalidRecurrent("explicit vector is not isotropic".into()));
                }
                if !pair_with_u(vector).is_positive() {
                    return Err(Error::InvalidRecurrent("explicit vector is not future pointing".into()));
                }
                // Limit points of W_S lie in the span of the roots α_i, i ∈ S,
                // i.e. orthogonal to ω_l for l ∉ S.
                let tol = S::tolerance(&vector.ctx()).map(|e| e * vector.max_abs());
                for l in (0..=k).filter(|l| !sup.contains(l)) {
                    let q = pair_with_omega(vector, l);
                    let ok = match &tol {
                        None => q.is_zero(),
                        Some(t) => q.abs() <= *t,
                    };
                    if !ok {
                        return Err(Error::InvalidRecurrent(format!(
                            "explicit vector is not orthogonal to ω_{l} outside its support"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Result of [`materialize`].
#[derive(Clone, Debug, PartialEq)]
pub struct Materialized<S> {
    pub vector: LatticeVector<S>,
    /// Present for schedule programs.
    pub certificate: Option<Certificate>,
}

fn q_d<S: Scalar>(ctx: &S::Ctx, spec: &BoundaryPointSpec<S>) -> Result<LatticeVector<S>> {
    let mut v = LatticeVector::<S>::zero(ctx, spec.n)?;
    for (&k, c) in &spec.divergent {
        v.coords_mut()[k] = c.clone();
    }
    Ok(v)
}

/// `q_r` in the ambient lattice and the schedule certificate if any.
fn q_r<S: Scalar>(
    ctx: &S::Ctx,
    spec: &BoundaryPointSpec<S>,
    depth: Option<usize>,
) -> Result<Option<(LatticeVector<S>, Option<Certificate>)>> {
    let Some(prog) = &spec.recurrent else { return Ok(None) };
    let (local, cert) = match prog {
        RecurrentProgram::ExplicitIsotropic { vector, .. } => (vector.clone(), None),
        RecurrentProgram::Schedule(sched) => {
            let d = depth.unwrap_or(sched.len());
            let sched = sched.truncated(d)?;
            let points: Vec<LatticeVector<Rational>> =
                sched.orbit_points(d)?.iter().map(normalize_u_slice).collect();
            let cert = Certificate::from_orbit(&points)?;
            cert.check(DEFAULT_MAX_DECAY_RATE)?;
            let last = points.last().expect("depth >= 1");
            (LatticeVector::from_rationals(ctx, last), Some(cert))
        }
    };
    let v = if spec.divergent.is_empty() {
        local
    } else {
        embed_at(spec.n, &spec.embedding_positions(), &local)?
    };
    Ok(Some((v, cert)))
}

/// Assembles `w·(q_d + q_r)`. Schedule programs are truncated at `depth`
/// excursions (all of them when `None`) and certified.
pub fn materialize<S: Scalar>(
    spec: &BoundaryPointSpec<S>,
    ctx: &S::Ctx,
    depth: Option<usize>,
) -> Result<Materialized<S>> {
    spec.validate()?;
    let mut q = q_d(ctx, spec)?;
    let mut certificate = None;
    if let Some((r, cert)) = q_r(ctx, spec, depth)? {
        q = q.add(&r)?;
        certificate = cert;
    }
    Ok(Materialized { vector: apply_word(&spec.word, &q)?, certificate })
}

/// Output of [`decompose`].
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition<S> {
    pub p_d: LatticeVector<S>,
    pub p_r: LatticeVector<S>,
    pub s_d: Vec<usize>,
    pub s_r: Vec<usize>,
    pub coset_word: Word,
}

/// Options for [`decompose`].
#[derive(Clone, Debug)]
pub struct DecomposeConfig {
    /// Reduction iterations spent looking for parabolic content in explicit
    /// programs.
    pub parabolic_depth: u64,
    /// Truncation of schedule programs.
    pub depth: Option<usize>,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        Self { parabolic_depth: DEFAULT_PARABOLIC_DEPTH, depth: None }
    }
}

/// Divergent–recurrent decomposition of a constructive boundary spec.
pub fn decompose<S: Scalar>(spec: &BoundaryPointSpec<S>, ctx: &S::Ctx) -> Result<Decomposition<S>> {
    decompose_with(spec, ctx, &DecomposeConfig::default())
}

pub fn decompose_with<S: Scalar>(
    spec: &BoundaryPointSpec<S>,
    ctx: &S::Ctx,
    cfg: &DecomposeConfig,
) -> Result<Decomposition<S>> {
    spec.validate()?;
    let spec = absorb_parabolic(spec, ctx, cfg.parabolic_depth)?;
    let n = spec.n;
    let qd = q_d(ctx, &spec)?;
    let p_d = apply_word(&spec.word, &qd)?;
    let p_r = match q_r(ctx, &spec, cfg.depth)? {
        Some((r, _)) => apply_word(&spec.word, &r)?,
        None => LatticeVector::zero(ctx, n)?,
    };
    let s_d = spec.s_d();
    let s_r = spec.s_r();
    let coset_word = canonical_coset(&spec.word, n, &s_d, &s_r);
    Ok(Decomposition { p_d, p_r, s_d, s_r, coset_word })
}

/// Strips the maximal right suffix of letters from `T = [N] ∖ (S_d ∪ S_r)`.
pub fn canonical_coset(word: &Word, n: usize, s_d: &[usize], s_r: &[usize]) -> Word {
    let in_t = |l: usize| l <= n && !s_d.contains(&l) && !s_r.contains(&l);
    let mut w = word.clone();
    while let Some(l) = w.last_letter() {
        if !in_t(l) {
            break;
        }
        w.pop();
    }
    w
}

/// Rewrites an explicit program that reduces into the chamber within the
/// depth cap as divergent content, maximizing `|S_d|`.
fn absorb_parabolic<S: Scalar>(spec: &BoundaryPointSpec<S>, ctx: &S::Ctx, depth: u64) -> Result<BoundaryPointSpec<S>> {
    let Some(RecurrentProgram::ExplicitIsotropic { vector, .. }) = &spec.recurrent else {
        return Ok(spec.clone());
    };
    let cfg = ReductionConfig::with_max_steps(depth);
    let reduced = match reduce_with(vector, &cfg) {
        Ok(r) => r,
        Err(Error::StepCapExceeded { .. }) => return Ok(spec.clone()),
        Err(Error::NonConvergent(_)) => return Err(Error::AmbiguousAtDepth { depth }),
        Err(e) => return Err(e),
    };
    if reduced.clamped() {
        return Err(Error::AmbiguousAtDepth { depth });
    }
    // q_r' = g⁻¹ r', so q = g̃⁻¹(q_d + φ(r')) with g̃ the word on the
    // embedded indices, which fixes q_d.
    let pos = spec.embedding_positions();
    let lifted: Word = {
        let mut w = Word::new();
        for r in reduced.word.runs() {
            w.push_alternating(pos[r.a as usize], pos[r.b as usize], r.len);
        }
        w
    };
    let r_emb = if spec.divergent.is_empty() {
        reduced.reduced.clone()
    } else {
        embed_at(spec.n, &pos, &reduced.reduced)?
    };
    let total = q_d(ctx, spec)?.add(&r_emb)?;
    let divergent: BTreeMap<usize, S> =
        total.coords().iter().enumerate().filter(|(_, c)| c.is_positive()).map(|(k, c)| (k, c.clone())).collect();
    let word = spec.word.concat(&lifted.inverse());
    let out = BoundaryPointSpec { n: spec.n, word, divergent, recurrent: None };
    out.validate()?;
    Ok(out)
}

/// Projective distance of `[x]`, `[y]` in the slice `⟨v, u⟩ = 1`, max norm.
pub fn projective_distance<S: Scalar>(x: &LatticeVector<S>, y: &LatticeVector<S>) -> Result<S> {
    x.check_same(y)?;
    let px = pair_with_u(x);
    let py = pair_with_u(y);
    if !px.is_positive() || !py.is_positive() {
        return Err(Error::Domain("projective distance needs ⟨v,u⟩ > 0".into()));
    }
    let mut best = S::zero(&x.ctx());
    for (a, b) in x.coords().iter().zip(y.coords()) {
        let d = (a.clone() / px.clone() - b.clone() / py.clone()).abs();
        if d > best {
            best = d;
        }
    }
    Ok(best)
}

/// Circle of isotropic rays through `[p0]` and `[p1]` inside
/// `span{p0, p1, aux}`, cut by the slice `⟨v, aux⟩ = ⟨p0, aux⟩`.
#[derive(Clone, Debug)]
pub struct BoundaryCurve {
    e0: LatticeVector<BigFloat>,
    f0: LatticeVector<BigFloat>,
    e2: LatticeVector<BigFloat>,
    scale: BigFloat,
    theta: BigFloat,
}

impl BoundaryCurve {
    pub fn new(
        p0: &LatticeVector<BigFloat>,
        p1: &LatticeVector<BigFloat>,
        aux: &LatticeVector<BigFloat>,
    ) -> Result<Self> {
        let bits = p0.ctx();
        for p in [p0, p1] {
            if !is_isotropic(p) || !pair_with_u(p).is_positive() {
                return Err(Error::InvalidSpec("curve endpoints must be isotropic and future pointing".into()));
            }
        }
        if !pair(p0, p1)?.is_positive() {
            return Err(Error::InvalidSpec("curve endpoints must pair positively".into()));
        }
        let aa = pair(aux, aux)?;
        if !aa.is_positive() {
            return Err(Error::NonTimelike);
        }
        let e0 = aux.scale(&(BigFloat::one(&bits) / aa.sqrt()));
        let c0 = pair(p0, &e0)?;
        let c1 = pair(p1, &e0)?;
        if !c0.is_positive() || !c1.is_positive() {
            return Err(Error::ZeroPairing);
        }
        let one = BigFloat::one(&bits);
        let f0 = p0.scale(&(one.clone() / c0.clone())).sub(&e0)?;
        let f1 = p1.scale(&(one.clone() / c1)).sub(&e0)?;
        // Spacelike unit vectors: ⟨f,f⟩ = −1, so the Euclidean angle on e0^⊥
        // uses −⟨·,·⟩.
        let cos = -pair(&f0, &f1)?;
        let g = f1.add_scaled(&pair(&f1, &f0)?, &f0)?;
        let sin_sq = -pair(&g, &g)?;
        let tol = BigFloat::tolerance(&bits).expect("float tolerance");
        if sin_sq <= tol {
            return Err(Error::DegenerateSpan);
        }
        let sin = sin_sq.sqrt();
        let e2 = g.scale(&(one / sin.clone()));
        let theta = atan2(&sin, &cos);
        Ok(Self { e0, f0, e2, scale: c0, theta })
    }

    /// Angle between the endpoint rays.
    pub fn theta(&self) -> &BigFloat {
        &self.theta
    }

    /// `D_t`; `t = 0` gives `p0`, `t = 1` a positive multiple of `p1`.
    pub fn point(&self, t: &BigFloat) -> Result<LatticeVector<BigFloat>> {
        let (c, s) = (t.clone() * self.theta.clone()).cos_sin();
        let v = self.e0.add_scaled(&c, &self.f0)?.add_scaled(&s, &self.e2)?;
        Ok(v.scale(&self.scale))
    }
}

/// Curve point with `u` as the auxiliary direction.
pub fn boundary_curve(
    p0: &LatticeVector<BigFloat>,
    p1: &LatticeVector<BigFloat>,
    t: &BigFloat,
) -> Result<LatticeVector<BigFloat>> {
    let aux = LatticeVector::<BigFloat>::u(&p0.ctx(), p0.n())?;
    BoundaryCurve::new(p0, p1, &aux)?.point(t)
}

/// `atan2(y, x)` for `y > 0`, refined by Newton steps from an `f64` guess.
fn atan2(y: &BigFloat, x: &BigFloat) -> BigFloat {
    let bits = y.ctx();
    let mut theta = BigFloat::parse(&bits, &format!("{:e}", y.to_f64().atan2(x.to_f64()))).expect("finite angle");
    // f(θ) = x·sin θ − y·cos θ vanishes at the target angle, with
    // f'(θ) = x·cos θ + y·sin θ.
    let mut prev_good = 53usize;
    while prev_good < bits + 16 {
        let (c, s) = theta.cos_sin();
        let f = x.clone() * s.clone() - y.clone() * c.clone();
        let df = x.clone() * c + y.clone() * s;
        theta = theta - f / df;
        prev_good *= 2;
    }
    theta
}
