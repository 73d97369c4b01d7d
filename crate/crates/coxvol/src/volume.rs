//! k-volumes, top self-intersection and section counts.

use dashu::integer::IBig;

use crate::chamber::{reduce_with, ReductionConfig};
use crate::error::{Error, Result};
use crate::lattice::{check_n, LatticeVector};
use crate::scalar::{binomial, factorial, Rational, Scalar};

/// Elementary symmetric values `τ_0 = 1, τ_1, …, τ_{N+1}` of a coordinate
/// vector.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricProfile<S> {
    pub taus: Vec<S>,
}

impl<S: Scalar> SymmetricProfile<S> {
    /// Coefficients of `Π(1 + x_i z)`. All partial products have
    /// nonnegative coefficients for nef input, so plain accumulation has no
    /// cancellation.
    pub fn of(v: &LatticeVector<S>) -> Self {
        let ctx = v.ctx();
        let mut taus = vec![S::zero(&ctx); v.n() + 2];
        taus[0] = S::one(&ctx);
        for (m, x) in v.coords().iter().enumerate() {
            for p in (1..=m + 1).rev() {
                taus[p] = taus[p].clone() + taus[p - 1].clone() * x.clone();
            }
        }
        Self { taus }
    }

    pub fn tau(&self, p: usize) -> &S {
        &self.taus[p]
    }
}

/// `vol_k(v)`: `τ_k` of the chamber-reduced coordinates.
pub fn vol_k<S: Scalar>(v: &LatticeVector<S>, k: usize) -> Result<S> {
    vol_k_with(v, k, &ReductionConfig::default())
}

pub fn vol_k_with<S: Scalar>(v: &LatticeVector<S>, k: usize, cfg: &ReductionConfig) -> Result<S> {
    if k > v.n() {
        return Err(Error::Domain(format!("vol_k needs 0 <= k <= N, got k = {k}")));
    }
    if k == 0 {
        return Ok(S::one(&v.ctx()));
    }
    let r = reduce_with(v, cfg)?;
    Ok(SymmetricProfile::of(&r.reduced).taus[k].clone())
}

/// `(G^N) = 2·N!·τ_N(G)` for nef `G`.
pub fn top_intersection<S: Scalar>(g: &LatticeVector<S>) -> Result<S> {
    if g.coords().iter().any(|x| x.is_negative()) {
        return Err(Error::NotNef);
    }
    Ok(top_of_nef(g))
}

pub(crate) fn top_of_nef<S: Scalar>(g: &LatticeVector<S>) -> S {
    let ctx = g.ctx();
    let n = g.n();
    let c = S::from_int(&ctx, factorial(n) * IBig::from(2));
    c * SymmetricProfile::of(g).taus[n].clone()
}

/// Volume of a class in the closed Tits cone: reduce, then take the top
/// self-intersection. Non-big reducible inputs give exactly 0.
pub fn volume<S: Scalar>(v: &LatticeVector<S>) -> Result<S> {
    volume_with(v, &ReductionConfig::default())
}

pub fn volume_with<S: Scalar>(v: &LatticeVector<S>, cfg: &ReductionConfig) -> Result<S> {
    let r = reduce_with(v, cfg)?;
    Ok(top_of_nef(&r.reduced))
}

/// `h⁰(G) = 2·Σ_{j≥0} τ_{N−2j}(G)` for an integral nef and big `G`.
pub fn h0_nef_big(g: &LatticeVector<Rational>) -> Result<IBig> {
    let mut ints = Vec::with_capacity(g.n() + 1);
    for x in g.coords() {
        if !x.denominator().is_one() {
            return Err(Error::NotIntegral);
        }
        ints.push(x.numerator().clone());
    }
    if ints.iter().any(|x| *x < IBig::ZERO) {
        return Err(Error::NotNef);
    }
    let zeros = ints.iter().filter(|x| **x == IBig::ZERO).count();
    if zeros > 1 {
        return Err(Error::NotBig { zeros });
    }
    Ok(h0_formula(&ints))
}

/// The closed form on raw integer coordinates, without the nef/big checks.
pub fn h0_formula(xs: &[IBig]) -> IBig {
    let n = xs.len() - 1;
    let mut taus = vec![IBig::ZERO; n + 2];
    taus[0] = IBig::ONE;
    for (m, x) in xs.iter().enumerate() {
        for p in (1..=m + 1).rev() {
            let add = &taus[p - 1] * x;
            taus[p] += add;
        }
    }
    let mut sum = IBig::ZERO;
    let mut p = n as isize;
    while p >= 0 {
        sum += &taus[p as usize];
        p -= 2;
    }
    sum * IBig::from(2)
}

/// `C_N = 1 + Σ_{j=1}^{⌊N/2⌋} binom(N+1, 2j+1)`.
pub fn sandwich_constant(n: usize) -> Result<IBig> {
    check_n(n)?;
    let mut c = IBig::ONE;
    for j in 1..=n / 2 {
        c += binomial(n + 1, 2 * j + 1);
    }
    Ok(c)
}
