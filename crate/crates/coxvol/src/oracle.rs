//! Brute-force oracles used to cross-check the fast paths.
//!
//! The symbolic ring is `ℚ[ω_0, …, ω_N]/(ω_i²)`, stored densely over subset
//! masks. The search oracle walks all reduced words breadth first and applies
//! reflections through the bilinear form rather than the coordinate rule.

use dashu::integer::IBig;

use crate::chamber::ReductionResult;
use crate::error::{Error, Result};
use crate::lattice::{pair, LatticeVector};
use crate::scalar::{factorial, Rational};
use crate::word::Word;

/// Largest N accepted by the symbolic ring.
pub const RING_MAX_N: usize = 12;

/// Element of the square-free ring, dense over the `2^{N+1}` monomials.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareFreePoly {
    n: usize,
    coeffs: Vec<Rational>,
}

impl SquareFreePoly {
    pub fn zero(n: usize) -> Result<Self> {
        if n > RING_MAX_N {
            return Err(Error::RingTooLarge { n });
        }
        Ok(Self { n, coeffs: vec![Rational::ZERO; 1 << (n + 1)] })
    }

    pub fn constant(n: usize, c: Rational) -> Result<Self> {
        let mut p = Self::zero(n)?;
        p.coeffs[0] = c;
        Ok(p)
    }

    /// The monomial `ω_S` for the subset encoded by `mask`.
    pub fn monomial(n: usize, mask: usize) -> Result<Self> {
        let mut p = Self::zero(n)?;
        if mask >= p.coeffs.len() {
            return Err(Error::IndexOutOfRange { index: mask, n });
        }
        p.coeffs[mask] = Rational::ONE;
        Ok(p)
    }

    /// `Σ x_i ω_i`.
    pub fn linear(xs: &[Rational]) -> Result<Self> {
        let n = xs.len().checked_sub(1).ok_or(Error::InvalidDimension { n: 0 })?;
        let mut p = Self::zero(n)?;
        for (i, x) in xs.iter().enumerate() {
            p.coeffs[1 << i] = x.clone();
        }
        Ok(p)
    }

    /// `σ_p`: sum of all square-free monomials of degree `p`.
    pub fn sigma(n: usize, p: usize) -> Result<Self> {
        let mut out = Self::zero(n)?;
        for (mask, c) in out.coeffs.iter_mut().enumerate() {
            if mask.count_ones() as usize == p {
                *c = Rational::ONE;
            }
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, mask: usize) -> &Rational {
        &self.coeffs[mask]
    }

    /// Homogeneous component of the given degree.
    pub fn component(&self, degree: usize) -> Self {
        let mut out = self.clone();
        for (mask, c) in out.coeffs.iter_mut().enumerate() {
            if mask.count_ones() as usize != degree {
                *c = Rational::ZERO;
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Rational::ZERO)
    }

    pub fn add(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Self { n: self.n, coeffs }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self { n: self.n, coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }
}

/// Ring product; monomials sharing an index vanish.
pub fn poly_mul(p: &SquareFreePoly, q: &SquareFreePoly) -> Result<SquareFreePoly> {
    if p.n != q.n {
        return Err(Error::DimensionMismatch { left: p.n, right: q.n });
    }
    let mut out = SquareFreePoly::zero(p.n)?;
    let qs: Vec<(usize, &Rational)> =
        q.coeffs.iter().enumerate().filter(|(_, c)| **c != Rational::ZERO).collect();
    for (a, ca) in p.coeffs.iter().enumerate() {
        if *ca == Rational::ZERO {
            continue;
        }
        for &(b, cb) in &qs {
            if a & b == 0 {
                out.coeffs[a | b] += ca * cb;
            }
        }
    }
    Ok(out)
}

/// `exp(p)` truncated to total degree `cap`. The constant term of `p` must
/// vanish.
pub fn poly_exp_truncated(p: &SquareFreePoly, cap: usize) -> Result<SquareFreePoly> {
    if p.coeffs[0] != Rational::ZERO {
        return Err(Error::Domain("exp needs a nilpotent argument".into()));
    }
    let mut out = SquareFreePoly::constant(p.n, Rational::ONE)?;
    let mut term = out.clone();
    for k in 1..=cap.min(p.n + 1) {
        term = poly_mul(&term, p)?.scale(&Rational::from_parts(IBig::ONE, k.into()));
        if term.is_zero() {
            break;
        }
        out = out.add(&term);
    }
    Ok(out)
}

/// `Td(X) = Σ_p σ_1^{2p}/(2p+1)!`.
pub fn todd_class(n: usize) -> Result<SquareFreePoly> {
    let s1 = SquareFreePoly::sigma(n, 1)?;
    let s1_sq = poly_mul(&s1, &s1)?;
    let mut out = SquareFreePoly::constant(n, Rational::ONE)?;
    let mut power = out.clone();
    let mut p = 1;
    while 2 * p <= n + 1 {
        power = poly_mul(&power, &s1_sq)?;
        let c = Rational::ONE / Rational::from(factorial(2 * p + 1));
        out = out.add(&power.scale(&c));
        p += 1;
    }
    Ok(out)
}

/// `2 ×` the sum of the degree-N coefficients.
pub fn integrate(p: &SquareFreePoly) -> Rational {
    let mut sum = Rational::ZERO;
    for (mask, c) in p.coeffs.iter().enumerate() {
        if mask.count_ones() as usize == p.n {
            sum += c;
        }
    }
    sum * Rational::from(2)
}

/// `χ(X, G) = ∫ e^G · Td(X)`. A non-integral result indicates a bug in the
/// ring and is reported as an error.
pub fn chi_oracle(g: &LatticeVector<Rational>) -> Result<IBig> {
    let n = g.n();
    let lin = SquareFreePoly::linear(g.coords())?;
    let e = poly_exp_truncated(&lin, n + 1)?;
    let chi = integrate(&poly_mul(&e, &todd_class(n)?)?);
    if !chi.denominator().is_one() {
        return Err(Error::NonIntegralCharacteristic { value: chi.to_string() });
    }
    Ok(chi.numerator().clone())
}

/// Largest accepted search depth.
pub const BFS_MAX_DEPTH: usize = 10;

/// Breadth-first search for a shortest reduced word moving `v` into the
/// closed chamber.
///
/// Words of equal length are visited in lexicographic order of their
/// application sequence, so the returned word is deterministic. The search
/// runs on an integral rescaling of `v` with overflow-checked 128-bit
/// coordinates and reflects through `v ↦ v + ⟨v,α_i⟩/(N−1)·α_i`.
pub fn brute_force_reduce(v: &LatticeVector<Rational>, depth: usize) -> Result<ReductionResult<Rational>> {
    if depth > BFS_MAX_DEPTH {
        return Err(Error::Domain(format!("search depth {depth} exceeds {BFS_MAX_DEPTH}")));
    }
    let n = v.n();
    let ints = integral_rescale(v)?;
    let alphas: Vec<Vec<i128>> = (0..=n)
        .map(|i| (0..=n).map(|j| if i == j { -1 } else { 1 }).collect())
        .collect();
    let overflow = || Error::Domain("coordinates overflow the search oracle".into());

    let nef = |x: &[i128]| x.iter().all(|c| *c >= 0);
    // (coords, applied letters in order)
    let mut level: Vec<(Vec<i128>, Vec<usize>)> = vec![(ints, Vec::new())];
    for d in 0..=depth {
        if let Some((_, seq)) = level.iter().find(|(x, _)| nef(x)) {
            let word = Word::from_letters(seq.iter().rev().copied());
            let reduced = apply_form_reflections(v, seq)?;
            return Ok(ReductionResult { reduced, word, steps: seq.len() as u64, clamps: Vec::new() });
        }
        if d == depth {
            break;
        }
        let mut next = Vec::with_capacity(level.len() * n);
        for (x, seq) in &level {
            for i in 0..=n {
                if seq.last() == Some(&i) {
                    continue;
                }
                let y = form_reflect_i128(x, &alphas[i]).ok_or_else(overflow)?;
                let mut s = seq.clone();
                s.push(i);
                next.push((y, s));
            }
        }
        level = next;
    }
    Err(Error::NotFound { depth })
}

fn integral_rescale(v: &LatticeVector<Rational>) -> Result<Vec<i128>> {
    let mut lcm = IBig::ONE;
    for x in v.coords() {
        let d = IBig::from(x.denominator().clone());
        let g = gcd(&lcm, &d);
        lcm = &lcm * &d / g;
    }
    v.coords()
        .iter()
        .map(|x| {
            let y = x.clone() * Rational::from(lcm.clone());
            i128::try_from(y.numerator()).map_err(|_| Error::Domain("coordinates too large for the search oracle".into()))
        })
        .collect()
}

fn gcd(a: &IBig, b: &IBig) -> IBig {
    let (mut a, mut b) = (a.clone(), b.clone());
    while b != IBig::ZERO {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

/// Gram-matrix pairing on i128 coordinates.
fn pair_i128(x: &[i128], y: &[i128]) -> Option<i128> {
    let n1 = x.len() as i128 - 2;
    let sx: i128 = x.iter().try_fold(0i128, |a, b| a.checked_add(*b))?;
    let sy: i128 = y.iter().try_fold(0i128, |a, b| a.checked_add(*b))?;
    let mut dot = 0i128;
    for (a, b) in x.iter().zip(y) {
        dot = dot.checked_add(a.checked_mul(*b)?)?;
    }
    sx.checked_mul(sy)?.checked_sub(n1.checked_mul(dot)?)
}

fn form_reflect_i128(x: &[i128], alpha: &[i128]) -> Option<Vec<i128>> {
    let n1 = x.len() as i128 - 2;
    let p = pair_i128(x, alpha)?;
    // ⟨x, α_i⟩ is always divisible by N−1 on the integral lattice.
    debug_assert_eq!(p % n1, 0);
    let c = p / n1;
    x.iter().zip(alpha).map(|(a, b)| a.checked_add(c.checked_mul(*b)?)).collect()
}

fn apply_form_reflections(v: &LatticeVector<Rational>, seq: &[usize]) -> Result<LatticeVector<Rational>> {
    let ctx = v.ctx();
    let n = v.n();
    let n1 = Rational::from((n - 1) as i64);
    let mut x = v.clone();
    for &i in seq {
        let alpha = LatticeVector::<Rational>::alpha(&ctx, n, i)?;
        let c = pair(&x, &alpha)? / n1.clone();
        x = x.add_scaled(&c, &alpha)?;
    }
    Ok(x)
}
