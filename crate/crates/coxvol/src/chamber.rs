//! Reflections, word action, and greedy reduction into the nef chamber.

use crate::error::{Error, Result};
use crate::lattice::{is_timelike_positive, pair_with_omega, LatticeVector};
use crate::scalar::Scalar;
use crate::word::Word;

/// Default iteration cap for [`reduce_to_chamber`] callers without a better
/// estimate.
pub const DEFAULT_MAX_STEPS: u64 = 100_000;

/// `σ_i`: `x_i ↦ −x_i`, `x_j ↦ x_j + 2x_i`.
pub fn reflect<S: Scalar>(i: usize, v: &LatticeVector<S>) -> Result<LatticeVector<S>> {
    v.check_index(i)?;
    let mut out = v.clone();
    reflect_in_place(i, &mut out);
    Ok(out)
}

fn reflect_in_place<S: Scalar>(i: usize, v: &mut LatticeVector<S>) {
    let xi = v.coord(i).clone();
    let two_xi = xi.clone() + xi.clone();
    for (j, x) in v.coords_mut().iter_mut().enumerate() {
        if j == i {
            *x = -xi.clone();
        } else {
            *x = x.clone() + two_xi.clone();
        }
    }
}

/// Applies `n` reflections alternating `σ_j, σ_i, σ_j, …` (σ_j first) in
/// closed form.
///
/// With `a = x_i`, `b = x_j` and `S = a + b`, the m-th reflected value is
/// `b + mS`, the other coordinates gain `2nb + S·n(n−1)`, and the pair ends
/// at `(a − 2n'S, b + 2n'S)` for `n = 2n'` or `(a + 2b + 2n'S, −(b + 2n'S))`
/// for `n = 2n' + 1`.
pub fn apply_alternating<S: Scalar>(v: &mut LatticeVector<S>, j: usize, i: usize, n: u64) {
    if n == 0 {
        return;
    }
    if n <= 3 || i == j {
        let mut next = j;
        for _ in 0..n {
            reflect_in_place(next, v);
            next = if next == j { i } else { j };
        }
        return;
    }
    let ctx = v.ctx();
    let a = v.coord(i).clone();
    let b = v.coord(j).clone();
    let s = a.clone() + b.clone();
    let nn = S::from_u64(&ctx, n);
    let half = S::from_u64(&ctx, n / 2);
    let two = S::from_i64(&ctx, 2);
    let shift = two.clone() * nn.clone() * b.clone() + s.clone() * nn.clone() * (nn - S::one(&ctx));
    let two_half_s = two.clone() * half * s;
    let (new_i, new_j) = if n % 2 == 0 {
        (a - two_half_s.clone(), b + two_half_s)
    } else {
        (a + two * b.clone() + two_half_s.clone(), -(b + two_half_s))
    };
    for (l, x) in v.coords_mut().iter_mut().enumerate() {
        if l == i {
            *x = new_i.clone();
        } else if l == j {
            *x = new_j.clone();
        } else {
            *x = x.clone() + shift.clone();
        }
    }
}

/// Applies a word; the rightmost letter acts first.
pub fn apply_word<S: Scalar>(word: &Word, v: &LatticeVector<S>) -> Result<LatticeVector<S>> {
    if let Some(m) = word.max_letter() {
        v.check_index(m)?;
    }
    let mut out = v.clone();
    for run in word.runs().iter().rev() {
        // Letters of the run in application order: last, previous, ...
        let first = run.last() as usize;
        let second = if run.len >= 2 { run.letter(run.len - 2) as usize } else { first };
        apply_alternating(&mut out, first, second, run.len);
    }
    Ok(out)
}

/// Options for [`reduce_with`].
#[derive(Clone, Debug)]
pub struct ReductionConfig {
    /// Cap on loop iterations. A unipotent jump along an alternating pair of
    /// walls counts as one iteration.
    pub max_steps: u64,
    /// Smallest alternation length handled by a closed-form jump.
    pub jump_threshold: u64,
    /// Float backends: relative clamp tolerance override (default
    /// `2^(−mantissa/2)`).
    pub tolerance: Option<f64>,
}

impl Default for ReductionConfig {
    fn default() -> Self {
        Self { max_steps: DEFAULT_MAX_STEPS, jump_threshold: 4, tolerance: None }
    }
}

impl ReductionConfig {
    pub fn with_max_steps(max_steps: u64) -> Self {
        Self { max_steps, ..Self::default() }
    }
}

/// Outcome of chamber reduction.
#[derive(Clone, Debug, PartialEq)]
pub struct ReductionResult<S> {
    /// Vector in the closed chamber (all coordinates ≥ 0).
    pub reduced: LatticeVector<S>,
    /// `apply_word(word, input) == reduced`.
    pub word: Word,
    /// Loop iterations (jumps count once).
    pub steps: u64,
    /// Coordinates clamped to zero by the float tolerance, in order.
    pub clamps: Vec<usize>,
}

impl<S> ReductionResult<S> {
    /// Number of wall crossings, i.e. the word length.
    pub fn word_length(&self) -> u64 {
        self.word.len()
    }
    pub fn clamped(&self) -> bool {
        !self.clamps.is_empty()
    }
}

/// Greedy reduction: reflect in the most negative coordinate (lowest index on
/// ties) until all coordinates are nonnegative.
pub fn reduce_to_chamber<S: Scalar>(v: &LatticeVector<S>, max_steps: u64) -> Result<ReductionResult<S>> {
    reduce_with(v, &ReductionConfig::with_max_steps(max_steps))
}

/// [`reduce_to_chamber`] with explicit options.
pub fn reduce_with<S: Scalar>(v: &LatticeVector<S>, cfg: &ReductionConfig) -> Result<ReductionResult<S>> {
    let ctx = v.ctx();
    let n = v.n();
    let mut x = v.clone();
    // Letters in application order; reversed at the end.
    let mut applied = Word::new();
    let mut steps = 0u64;
    let mut clamps = Vec::new();
    let mut clamp_count = vec![0u32; n + 1];
    let tol = if S::is_exact() {
        None
    } else {
        match cfg.tolerance {
            Some(t) => Some(S::parse(&ctx, &format!("{t:e}"))?),
            None => S::tolerance(&ctx),
        }
    };

    loop {
        // Pick the most negative coordinate; clamp float noise.
        let threshold = tol.as_ref().map(|e| -(e.clone() * x.max_abs()));
        let mut pick: Option<usize> = None;
        for k in 0..=n {
            let xk = x.coord(k);
            if !xk.is_negative() {
                continue;
            }
            if let Some(th) = &threshold {
                if *xk >= *th {
                    x.coords_mut()[k] = S::zero(&ctx);
                    clamps.push(k);
                    clamp_count[k] += 1;
                    if clamp_count[k] > 3 {
                        return Err(Error::NonConvergent(format!(
                            "coordinate {k} oscillates within tolerance of 0"
                        )));
                    }
                    continue;
                }
            }
            match pick {
                Some(p) if x.coord(p) <= xk => {}
                _ => pick = Some(k),
            }
        }
        let Some(j) = pick else { break };
        if steps >= cfg.max_steps {
            return Err(Error::StepCapExceeded {
                max_steps: cfg.max_steps,
                partial_word: applied.inverse(),
                partial_vector: x.to_strings(),
            });
        }
        steps += 1;

        if let Some(i) = applied.last_letter() {
            if i != j {
                if let Some(len) = jump_length(&x, j, i, cfg.jump_threshold)? {
                    apply_alternating(&mut x, j, i, len);
                    applied.push_alternating(j, i, len);
                    continue;
                }
            }
        }
        reflect_in_place(j, &mut x);
        applied.push(j);
    }

    Ok(ReductionResult { reduced: x, word: applied.inverse(), steps, clamps })
}

/// Length of a safe closed-form alternation starting with `σ_j` against the
/// partner `i`, or `None` when a plain step should be taken.
///
/// The alternation continues while the reflected value `b + mS` is negative.
/// It is only safe while every other coordinate stays nonnegative, because
/// then the pair coordinate is the unique negative one at each step and the
/// greedy rule would make the same choices.
fn jump_length<S: Scalar>(x: &LatticeVector<S>, j: usize, i: usize, threshold: u64) -> Result<Option<u64>> {
    let ctx = x.ctx();
    let a = x.coord(i).clone();
    let b = x.coord(j).clone();
    if a.is_negative() {
        return Ok(None);
    }
    for (l, xl) in x.coords().iter().enumerate() {
        if l != i && l != j && xl.is_negative() {
            return Ok(None);
        }
    }
    let s = a + b.clone();
    if !s.is_positive() {
        // The pair alternates forever: the point is not in the Tits cone.
        return Err(Error::StepCapExceeded {
            max_steps: u64::MAX,
            partial_word: Word::new(),
            partial_vector: x.to_strings(),
        });
    }
    // Smallest m with b + mS >= 0.
    let m_big = (-b.clone() / s.clone()).ceil();
    let m: u64 = match u64::try_from(&m_big) {
        Ok(m) => m,
        Err(_) => u64::MAX / 4,
    };
    if m < threshold {
        return Ok(None);
    }
    // Other coordinates decrease along the alternation; the worst case is at
    // the end.
    let min_other = |n: u64| -> S {
        let nn = S::from_u64(&ctx, n);
        let shift = S::from_i64(&ctx, 2) * nn.clone() * b.clone() + s.clone() * nn.clone() * (nn - S::one(&ctx));
        let mut best: Option<S> = None;
        for (l, xl) in x.coords().iter().enumerate() {
            if l != i && l != j {
                let v = xl.clone() + shift.clone();
                if best.as_ref().map_or(true, |b| v < *b) {
                    best = Some(v);
                }
            }
        }
        best.unwrap_or_else(|| S::one(&ctx))
    };
    if !min_other(m).is_negative() {
        return Ok(Some(m));
    }
    // Largest safe n in [0, m) by bisection.
    let (mut lo, mut hi) = (0u64, m);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if min_other(mid).is_negative() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo >= threshold).then_some(lo))
}

/// Cone membership record.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConeMembership {
    pub ample: bool,
    pub nef: bool,
    pub in_dual_cone_c: bool,
    pub in_fundamental_f: bool,
    pub timelike: bool,
}

/// Classifies `v` against the ample/nef chamber, the cone `C` dual to the
/// nef chamber, and their intersection.
pub fn classify_cone<S: Scalar>(v: &LatticeVector<S>) -> ConeMembership {
    let ample = v.coords().iter().all(|x| x.is_positive());
    let nef = v.coords().iter().all(|x| !x.is_negative());
    let in_dual_cone_c = (0..=v.n()).all(|i| !pair_with_omega(v, i).is_negative());
    ConeMembership {
        ample,
        nef,
        in_dual_cone_c,
        in_fundamental_f: nef && in_dual_cone_c,
        timelike: is_timelike_positive(v),
    }
}
