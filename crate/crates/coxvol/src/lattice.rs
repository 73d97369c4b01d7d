//! The rank-(N+1) lattice with the bilinear form of signature (1, N).
//!
//! Coordinates are taken in the ω-basis: `v = Σ x_i ω_i`, with
//! `⟨ω_i, ω_i⟩ = −(N−2)` and `⟨ω_i, ω_j⟩ = 1` for `i ≠ j`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest supported N.
pub const MAX_N: usize = 64;

/// Gram-matrix constants of the form for a given N.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FormConstants {
    pub n: usize,
}

impl FormConstants {
    pub fn new(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self { n })
    }
    /// Diagonal entry `−(N−2)`.
    pub fn diag(&self) -> i64 {
        -(self.n as i64 - 2)
    }
    /// Off-diagonal entry `1`.
    pub fn offdiag(&self) -> i64 {
        1
    }
    pub fn gram(&self, i: usize, j: usize) -> i64 {
        if i == j {
            self.diag()
        } else {
            self.offdiag()
        }
    }
}

pub(crate) fn check_n(n: usize) -> Result<()> {
    if (2..=MAX_N).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidDimension { n })
    }
}

/// A class `Σ x_i ω_i` with `N+1` coordinates in one scalar backend.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeVector<S> {
    coords: Vec<S>,
}

impl<S: Scalar> LatticeVector<S> {
    /// Builds a vector from `N+1` coordinates.
    pub fn new(coords: Vec<S>) -> Result<Self> {
        if coords.len() < 3 {
            return Err(Error::InvalidDimension { n: coords.len().saturating_sub(1) });
        }
        check_n(coords.len() - 1)?;
        Ok(Self { coords })
    }

    pub fn from_ints(ctx: &S::Ctx, xs: &[i64]) -> Result<Self> {
        Self::new(xs.iter().map(|&x| S::from_i64(ctx, x)).collect())
    }

    pub fn zero(ctx: &S::Ctx, n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self { coords: vec![S::zero(ctx); n + 1] })
    }

    /// `ω_i`.
    pub fn omega(ctx: &S::Ctx, n: usize, i: usize) -> Result<Self> {
        let mut v = Self::zero(ctx, n)?;
        v.check_index(i)?;
        v.coords[i] = S::one(ctx);
        Ok(v)
    }

    /// `u = Σ ω_i`.
    pub fn u(ctx: &S::Ctx, n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self { coords: vec![S::one(ctx); n + 1] })
    }

    /// `α_i = u − 2ω_i`.
    pub fn alpha(ctx: &S::Ctx, n: usize, i: usize) -> Result<Self> {
        let mut v = Self::u(ctx, n)?;
        v.check_index(i)?;
        v.coords[i] = S::from_i64(ctx, -1);
        Ok(v)
    }

    /// `ω_{îĵ} = u − ω_i − ω_j`, the isotropic vector fixed by `σ_i`, `σ_j`.
    pub fn omega_hat(ctx: &S::Ctx, n: usize, i: usize, j: usize) -> Result<Self> {
        let mut v = Self::u(ctx, n)?;
        v.check_index(i)?;
        v.check_index(j)?;
        if i == j {
            return Err(Error::InvalidCusp { i, j, n });
        }
        v.coords[i] = S::zero(ctx);
        v.coords[j] = S::zero(ctx);
        Ok(v)
    }

    /// N (the vector has N+1 coordinates).
    pub fn n(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<S> {
        self.coords
    }

    pub fn coord(&self, i: usize) -> &S {
        &self.coords[i]
    }

    pub(crate) fn coords_mut(&mut self) -> &mut [S] {
        &mut self.coords
    }

    pub fn ctx(&self) -> S::Ctx {
        self.coords[0].ctx()
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i <= self.n() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, n: self.n() })
        }
    }

    pub(crate) fn check_same(&self, other: &Self) -> Result<()> {
        if self.n() == other.n() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { left: self.n(), right: other.n() })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.clone() + b.clone()).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.clone() - b.clone()).collect(),
        })
    }

    pub fn scale(&self, c: &S) -> Self {
        Self { coords: self.coords.iter().map(|a| a.clone() * c.clone()).collect() }
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, c: &S, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.clone() + c.clone() * b.clone())
                .collect(),
        })
    }

    pub fn sum_coords(&self) -> S {
        let mut acc = S::zero(&self.ctx());
        for x in &self.coords {
            acc = acc + x.clone();
        }
        acc
    }

    /// Largest absolute coordinate.
    pub fn max_abs(&self) -> S {
        let mut m = S::zero(&self.ctx());
        for x in &self.coords {
            let a = x.abs();
            if a > m {
                m = a;
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|x| x.is_zero())
    }

    /// Coordinate-wise conversion, e.g. into another backend.
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> LatticeVector<T> {
        LatticeVector { coords: self.coords.iter().map(f).collect() }
    }

    /// Exact rational coordinates converted into the backend of `ctx`.
    pub fn from_rationals(ctx: &S::Ctx, v: &LatticeVector<crate::scalar::Rational>) -> Self {
        LatticeVector { coords: v.coords.iter().map(|q| S::from_rational(ctx, q)).collect() }
    }

    /// Decimal renderings of the coordinates.
    pub fn to_strings(&self) -> Vec<String> {
        self.coords.iter().map(|x| x.to_decimal()).collect()
    }
}

/// The bilinear form, `⟨x, y⟩ = (Σx)(Σy) − (N−1) Σ x_i y_i`.
pub fn pair<S: Scalar>(v: &LatticeVector<S>, w: &LatticeVector<S>) -> Result<S> {
    v.check_same(w)?;
    let ctx = v.ctx();
    let mut dot = S::zero(&ctx);
    for (a, b) in v.coords.iter().zip(&w.coords) {
        dot = dot + a.clone() * b.clone();
    }
    let n1 = S::from_i64(&ctx, v.n() as i64 - 1);
    Ok(v.sum_coords() * w.sum_coords() - n1 * dot)
}

pub fn norm_sq<S: Scalar>(v: &LatticeVector<S>) -> S {
    pair(v, v).expect("same vector")
}

/// Isotropy test: exact zero for exact scalars, otherwise
/// `|⟨v,v⟩| ≤ ε·‖v‖²` with the backend's default ε.
pub fn is_isotropic<S: Scalar>(v: &LatticeVector<S>) -> bool {
    is_isotropic_with(v, S::tolerance(&v.ctx()))
}

/// Isotropy test with an explicit tolerance (ignored for exact scalars).
pub fn is_isotropic_with<S: Scalar>(v: &LatticeVector<S>, eps: Option<S>) -> bool {
    let q = norm_sq(v);
    match (S::is_exact(), eps) {
        (true, _) | (false, None) => q.is_zero(),
        (false, Some(eps)) => {
            let m = v.max_abs();
            q.abs() <= eps * m.clone() * m
        }
    }
}

/// `⟨v,v⟩ > 0` and `⟨v,u⟩ > 0`: the component of the hyperboloid containing
/// the ample cone.
pub fn is_timelike_positive<S: Scalar>(v: &LatticeVector<S>) -> bool {
    norm_sq(v).is_positive() && pair_with_u(v).is_positive()
}

/// `⟨v, u⟩ = 2 Σ x_i`.
pub fn pair_with_u<S: Scalar>(v: &LatticeVector<S>) -> S {
    v.sum_coords() * v.coords[0].lift(2)
}

/// `⟨v, ω_i⟩ = Σx − (N−1) x_i`.
pub fn pair_with_omega<S: Scalar>(v: &LatticeVector<S>, i: usize) -> S {
    v.sum_coords() - v.coords[i].lift(v.n() as i64 - 1) * v.coords[i].clone()
}

/// The embedding `φ_{k,N}`: `ω'_i ↦ ω_i + (ω_{k+1} + ⋯ + ω_N)/(k−1)`.
///
/// The image is orthogonal to `ω_{k+1}, …, ω_N` and the map scales the form
/// by `(N−1)/(k−1)`.
pub fn embed<S: Scalar>(k: usize, n: usize, v: &LatticeVector<S>) -> Result<LatticeVector<S>> {
    if !(2 <= k && k < n) {
        return Err(Error::Domain(format!("embedding needs 2 <= k < N, got k = {k}, N = {n}")));
    }
    check_n(n)?;
    if v.n() != k {
        return Err(Error::DimensionMismatch { left: v.n(), right: k });
    }
    let positions: Vec<usize> = (0..=k).collect();
    embed_at(n, &positions, v)
}

/// Generalized embedding: the rank-(k+1) coordinates go to `positions`
/// (increasing) and the remaining indices receive `Σx/(k−1)` each.
pub fn embed_at<S: Scalar>(n: usize, positions: &[usize], v: &LatticeVector<S>) -> Result<LatticeVector<S>> {
    check_n(n)?;
    let k = v.n();
    if positions.len() != k + 1 || positions.windows(2).any(|w| w[0] >= w[1]) || positions.last().map_or(true, |&p| p > n) {
        return Err(Error::Domain("embedding positions must be increasing indices in [N]".into()));
    }
    if k < 2 || k >= n {
        return Err(Error::Domain(format!("embedding needs 2 <= k < N, got k = {k}, N = {n}")));
    }
    let ctx = v.ctx();
    let shift = v.sum_coords() / S::from_i64(&ctx, k as i64 - 1);
    let mut coords = vec![shift; n + 1];
    for (x, &p) in v.coords.iter().zip(positions) {
        coords[p] = x.clone();
    }
    LatticeVector::new(coords)
}
