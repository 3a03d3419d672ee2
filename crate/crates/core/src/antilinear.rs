//! Antilinear maps between finite-dimensional Hilbert spaces.
//!
//! An antilinear map `t : H_x -> H_y` is stored as the matrix `M` for which
//! `t v = M · conj(v)` in the standard bases. With that convention
//!
//! | operation                       | matrix                 |
//! |---------------------------------|------------------------|
//! | adjoint `t*`                    | `Mᵀ` (no conjugation)  |
//! | `t1 ∘ t2` (linear result)       | `M1 · conj(M2)`        |
//! | `L ∘ t` (antilinear result)     | `L · M`                |
//! | `t ∘ L` (antilinear result)     | `M · conj(L)`          |
//!
//! Linear maps are plain [`ComplexMatrix`] values; [`Operator`] tags a map
//! with its parity so that sums and compositions of mixed chains are checked.

use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{self, ComplexMatrix, ComplexVector};

#[derive(Debug, Clone, PartialEq)]
pub struct AntilinearMap {
    mat: ComplexMatrix,
}

impl AntilinearMap {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        matcore::ensure_finite(&mat)?;
        Ok(Self { mat })
    }

    pub(crate) fn from_mat_unchecked(mat: ComplexMatrix) -> Self {
        Self { mat }
    }

    /// Complex conjugation in the standard basis of a `dim`-dimensional space.
    pub fn conjugation(dim: usize) -> Self {
        Self { mat: matcore::identity(dim) }
    }

    pub fn zero(dim_codomain: usize, dim_domain: usize) -> Self {
        Self { mat: ComplexMatrix::zeros(dim_codomain, dim_domain) }
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_mat(self) -> ComplexMatrix {
        self.mat
    }

    pub fn dim_domain(&self) -> usize {
        self.mat.ncols()
    }

    pub fn dim_codomain(&self) -> usize {
        self.mat.nrows()
    }

    pub fn apply(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if v.len() != self.dim_domain() {
            return Err(Error::DimMismatch(format!(
                "antilinear map on a {}-dimensional space applied to a vector of length {}",
                self.dim_domain(),
                v.len()
            )));
        }
        Ok(&self.mat * v.conjugate())
    }

    /// The unique antilinear `t*` with `⟨y, t x⟩ = ⟨x, t* y⟩`.
    pub fn adjoint(&self) -> Self {
        Self { mat: self.mat.transpose() }
    }

    /// `self ∘ other`, a linear map.
    pub fn compose(&self, other: &AntilinearMap) -> Result<ComplexMatrix> {
        compose_aa(self, other)
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self { mat: self.mat.map(|m| m * z) }
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.mat.is_square() && matcore::max_abs_diff(&self.mat, &self.mat.transpose()) <= tol
    }
}

impl Add for &AntilinearMap {
    type Output = AntilinearMap;
    fn add(self, rhs: &AntilinearMap) -> AntilinearMap {
        AntilinearMap { mat: &self.mat + &rhs.mat }
    }
}

impl Sub for &AntilinearMap {
    type Output = AntilinearMap;
    fn sub(self, rhs: &AntilinearMap) -> AntilinearMap {
        AntilinearMap { mat: &self.mat - &rhs.mat }
    }
}

impl Neg for &AntilinearMap {
    type Output = AntilinearMap;
    fn neg(self) -> AntilinearMap {
        AntilinearMap { mat: -&self.mat }
    }
}

fn check_chain(outer_domain: usize, inner_codomain: usize) -> Result<()> {
    if outer_domain != inner_codomain {
        return Err(Error::DimMismatch(format!(
            "cannot compose: outer map expects dimension {outer_domain}, inner map produces {inner_codomain}"
        )));
    }
    Ok(())
}

/// `t1 ∘ t2` for two antilinear maps; the result is linear with matrix `M1 · conj(M2)`.
pub fn compose_aa(t1: &AntilinearMap, t2: &AntilinearMap) -> Result<ComplexMatrix> {
    check_chain(t1.dim_domain(), t2.dim_codomain())?;
    Ok(&t1.mat * t2.mat.conjugate())
}

/// Where the linear factor sits in a mixed composition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearSide {
    /// `L ∘ t`
    After,
    /// `t ∘ L`
    Before,
}

/// Mixed linear/antilinear composition; the result is antilinear.
pub fn compose_mixed(linear: &ComplexMatrix, t: &AntilinearMap, side: LinearSide) -> Result<AntilinearMap> {
    match side {
        LinearSide::After => {
            check_chain(linear.ncols(), t.dim_codomain())?;
            Ok(AntilinearMap { mat: linear * &t.mat })
        }
        LinearSide::Before => {
            check_chain(t.dim_domain(), linear.nrows())?;
            Ok(AntilinearMap { mat: &t.mat * linear.conjugate() })
        }
    }
}

/// `Tr(t1 ∘ t2)`. Satisfies `Tr(t1 t2) = conj(Tr(t2 t1))`.
pub fn trace_product(t1: &AntilinearMap, t2: &AntilinearMap) -> Result<Complex64> {
    check_chain(t1.dim_domain(), t2.dim_codomain())?;
    check_chain(t2.dim_domain(), t1.dim_codomain())?;
    Ok(compose_aa(t1, t2)?.trace())
}

/// Polar decomposition `t = positive_left ∘ phase = phase ∘ positive_right`.
#[derive(Debug, Clone)]
pub struct PolarParts {
    /// `(t t*)^{1/2}`, positive on the codomain.
    pub positive_left: ComplexMatrix,
    /// `(t* t)^{1/2}`, positive on the domain.
    pub positive_right: ComplexMatrix,
    /// Antilinear partial isometry, zero off the support.
    pub phase: AntilinearMap,
    /// `phase* ∘ phase`, the support projection in the domain.
    pub support_dom: ComplexMatrix,
    /// `phase ∘ phase*`, the support projection in the codomain.
    pub support_cod: ComplexMatrix,
    pub rank: usize,
}

/// Polar decomposition from the SVD `M = U Σ V†` of the representing matrix.
///
/// With `r` the numerical rank: `phase = U_r V_r†`, `positive_left = U_r Σ_r U_r†`
/// and `positive_right = conj(V_r) Σ_r conj(V_r)†`. The phase is unique on the
/// support; off the support it is zero.
pub fn polar(t: &AntilinearMap) -> Result<PolarParts> {
    let dec = matcore::svd(&t.mat)?;
    let ur = dec.u_r();
    let vr = dec.v_r();
    let sr = dec.sigma_r();
    let vr_bar = vr.conjugate();
    Ok(PolarParts {
        positive_left: &ur * &sr * ur.adjoint(),
        positive_right: &vr_bar * &sr * vr_bar.adjoint(),
        phase: AntilinearMap { mat: &ur * vr.adjoint() },
        support_dom: &vr_bar * vr_bar.adjoint(),
        support_cod: &ur * ur.adjoint(),
        rank: dec.rank,
    })
}

/// A map tagged with its parity.
#[derive(Debug, Clone, PartialEq)]
pub enum Operator {
    Linear(ComplexMatrix),
    Antilinear(AntilinearMap),
}

impl Operator {
    pub fn is_antilinear(&self) -> bool {
        matches!(self, Operator::Antilinear(_))
    }

    pub fn mat(&self) -> &ComplexMatrix {
        match self {
            Operator::Linear(m) => m,
            Operator::Antilinear(t) => t.mat(),
        }
    }

    pub fn dim_domain(&self) -> usize {
        self.mat().ncols()
    }

    pub fn dim_codomain(&self) -> usize {
        self.mat().nrows()
    }

    pub fn apply(&self, v: &ComplexVector) -> Result<ComplexVector> {
        match self {
            Operator::Linear(m) => {
                if v.len() != m.ncols() {
                    return Err(Error::DimMismatch(format!(
                        "linear map on a {}-dimensional space applied to a vector of length {}",
                        m.ncols(),
                        v.len()
                    )));
                }
                Ok(m * v)
            }
            Operator::Antilinear(t) => t.apply(v),
        }
    }

    /// Hermitian adjoint: conjugate transpose for linear maps, transpose for antilinear ones.
    pub fn adjoint(&self) -> Self {
        match self {
            Operator::Linear(m) => Operator::Linear(m.adjoint()),
            Operator::Antilinear(t) => Operator::Antilinear(t.adjoint()),
        }
    }

    /// `self ∘ other` with the parity of the result tracked.
    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        use Operator::*;
        Ok(match (self, other) {
            (Linear(a), Linear(b)) => {
                check_chain(a.ncols(), b.nrows())?;
                Linear(a * b)
            }
            (Linear(a), Antilinear(t)) => Antilinear(compose_mixed(a, t, LinearSide::After)?),
            (Antilinear(t), Linear(b)) => Antilinear(compose_mixed(b, t, LinearSide::Before)?),
            (Antilinear(s), Antilinear(t)) => Linear(compose_aa(s, t)?),
        })
    }

    /// Sum of two maps of equal parity; mixed parity is rejected.
    pub fn try_add(&self, other: &Operator) -> Result<Operator> {
        use Operator::*;
        let same_shape = |a: &ComplexMatrix, b: &ComplexMatrix| {
            if a.shape() != b.shape() {
                Err(Error::DimMismatch(format!(
                    "cannot add {:?} and {:?} maps",
                    a.shape(),
                    b.shape()
                )))
            } else {
                Ok(())
            }
        };
        match (self, other) {
            (Linear(a), Linear(b)) => {
                same_shape(a, b)?;
                Ok(Linear(a + b))
            }
            (Antilinear(s), Antilinear(t)) => {
                same_shape(s.mat(), t.mat())?;
                Ok(Antilinear(s + t))
            }
            _ => Err(Error::MixedParity),
        }
    }
}

/// Compose a chain `f_1 ∘ f_2 ∘ … ∘ f_n` (the last factor acts first).
pub fn compose_chain(factors: &[Operator]) -> Result<Operator> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::DimMismatch("empty composition chain".into()))?;
    rest.iter().try_fold(first.clone(), |acc, f| acc.compose(f))
}

/// Serialized form: `{"dim_domain", "dim_codomain", "mat", "parity": "antilinear"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AntilinearMapFile {
    pub dim_domain: usize,
    pub dim_codomain: usize,
    pub mat: crate::io::MatrixFile,
    pub parity: String,
}

impl From<&AntilinearMap> for AntilinearMapFile {
    fn from(t: &AntilinearMap) -> Self {
        Self {
            dim_domain: t.dim_domain(),
            dim_codomain: t.dim_codomain(),
            mat: crate::io::MatrixFile::from(t.mat()),
            parity: "antilinear".into(),
        }
    }
}

impl TryFrom<AntilinearMapFile> for AntilinearMap {
    type Error = crate::io::FormatError;

    fn try_from(f: AntilinearMapFile) -> std::result::Result<Self, Self::Error> {
        use crate::io::FormatError;
        if f.parity != "antilinear" {
            return Err(FormatError::Invalid(format!(
                "expected parity \"antilinear\", found {:?}",
                f.parity
            )));
        }
        let mat = ComplexMatrix::try_from(f.mat)?;
        if mat.nrows() != f.dim_codomain || mat.ncols() != f.dim_domain {
            return Err(FormatError::Invalid(format!(
                "declared {}x{} map but matrix is {}x{}",
                f.dim_codomain,
                f.dim_domain,
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(AntilinearMap { mat })
    }
}
