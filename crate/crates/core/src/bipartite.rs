//! Bipartite vectors and their EPR maps.
//!
//! A vector `ψ ∈ H_a ⊗ H_b` is stored as its coefficient matrix `C`
//! (`dim_a x dim_b`), `ψ = Σ C_ij e_i ⊗ e_j`; the flattened vector uses the
//! a-index as the major index. Its EPR maps are the antilinear maps
//!
//! - `s^{ba} : H_a -> H_b`, `s^{ba} φ^a = Σ_k ⟨φ^a, φ^a_k⟩ φ^b_k`, matrix `Cᵀ`;
//! - `s^{ab} : H_b -> H_a`, its adjoint, matrix `C`.
//!
//! Reductions, local transformations and scalar products all become
//! compositions of these two maps.

use num_complex::Complex64;

use crate::antilinear::{self, compose_aa, compose_mixed, AntilinearMap, LinearSide, PolarParts};
use crate::error::{Error, Result};
use crate::matcore::{self, c64, ComplexMatrix, ComplexVector, Subsystem};

/// Accepted deviation of `‖v‖` from one for inputs that must be unit vectors.
pub const UNIT_TOL: f64 = 1e-10;
/// Tolerance for the isometry and Hermiticity checks in this module.
pub const STRUCTURE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteVector {
    coeff: ComplexMatrix,
}

impl BipartiteVector {
    pub fn new(coeff: ComplexMatrix) -> Result<Self> {
        if coeff.nrows() == 0 || coeff.ncols() == 0 {
            return Err(Error::DimMismatch("bipartite dimensions must be positive".into()));
        }
        matcore::ensure_finite(&coeff)?;
        Ok(Self { coeff })
    }

    /// From a flattened vector of length `dim_a * dim_b` (a-index major).
    pub fn from_vector(v: &ComplexVector, dim_a: usize, dim_b: usize) -> Result<Self> {
        if v.len() != dim_a * dim_b {
            return Err(Error::DimMismatch(format!(
                "vector of length {} is not in a {dim_a}x{dim_b} product space",
                v.len()
            )));
        }
        Self::new(ComplexMatrix::from_row_iterator(dim_a, dim_b, v.iter().copied()))
    }

    /// `u ⊗ w`.
    pub fn product(u: &ComplexVector, w: &ComplexVector) -> Result<Self> {
        Self::new(u * w.transpose())
    }

    /// `Σ_i e_i ⊗ e_i / √d`.
    pub fn maximally_entangled(d: usize) -> Self {
        Self { coeff: matcore::identity(d).scale(1.0 / (d as f64).sqrt()) }
    }

    pub fn coeff(&self) -> &ComplexMatrix {
        &self.coeff
    }

    pub fn dim_a(&self) -> usize {
        self.coeff.nrows()
    }

    pub fn dim_b(&self) -> usize {
        self.coeff.ncols()
    }

    pub fn dim(&self, side: Subsystem) -> usize {
        match side {
            Subsystem::A => self.dim_a(),
            Subsystem::B => self.dim_b(),
        }
    }

    pub fn to_vector(&self) -> ComplexVector {
        let (da, db) = (self.dim_a(), self.dim_b());
        ComplexVector::from_fn(da * db, |k, _| self.coeff[(k / db, k % db)])
    }

    pub fn norm(&self) -> f64 {
        self.coeff.norm()
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeff.norm_squared()
    }

    pub fn is_unit(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub fn ensure_unit(&self) -> Result<()> {
        if !self.is_unit(UNIT_TOL) {
            return Err(Error::NotUnit { norm: self.norm() });
        }
        Ok(())
    }

    /// `⟨self, other⟩` computed entrywise.
    pub fn inner(&self, other: &BipartiteVector) -> Complex64 {
        self.coeff.zip_fold(&other.coeff, c64(0.0, 0.0), |acc, x, y| acc + x.conj() * y)
    }
}

/// The two EPR maps of a vector; `s_ab` is the adjoint of `s_ba` by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct EprPair {
    pub s_ba: AntilinearMap,
    pub s_ab: AntilinearMap,
}

pub fn epr_maps(psi: &BipartiteVector) -> EprPair {
    let s_ab = AntilinearMap::from_mat_unchecked(psi.coeff.clone());
    EprPair { s_ba: s_ab.adjoint(), s_ab }
}

fn same_dims(phi: &BipartiteVector, psi: &BipartiteVector) -> Result<()> {
    if phi.coeff.shape() != psi.coeff.shape() {
        return Err(Error::DimMismatch(format!(
            "bipartite vectors of shape {:?} and {:?}",
            phi.coeff.shape(),
            psi.coeff.shape()
        )));
    }
    Ok(())
}

fn ensure_unit_vec(v: &ComplexVector) -> Result<()> {
    let norm = v.norm();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnit { norm });
    }
    Ok(())
}

/// `(|φ^a⟩⟨φ^a| ⊗ 1) ψ` for a unit vector `φ^a`, applied directly to the coefficients.
///
/// Equals `φ^a ⊗ s^{ba} φ^a`.
pub fn project_rank1(psi: &BipartiteVector, phi_a: &ComplexVector) -> Result<BipartiteVector> {
    if phi_a.len() != psi.dim_a() {
        return Err(Error::DimMismatch(format!(
            "projector vector of length {} on a {}-dimensional factor",
            phi_a.len(),
            psi.dim_a()
        )));
    }
    matcore::ensure_finite_vec(phi_a)?;
    ensure_unit_vec(phi_a)?;
    BipartiteVector::new(matcore::outer(phi_a, phi_a) * &psi.coeff)
}

/// `⟨φ, ψ⟩ = Tr_a s_ψ^{ab} s_φ^{ba}`.
pub fn inner_via_trace(phi: &BipartiteVector, psi: &BipartiteVector) -> Result<Complex64> {
    same_dims(phi, psi)?;
    Ok(compose_aa(&epr_maps(psi).s_ab, &epr_maps(phi).s_ba)?.trace())
}

/// `⟨φ, ψ⟩ = Tr_b s_ψ^{ba} s_φ^{ab}`.
pub fn inner_via_trace_b(phi: &BipartiteVector, psi: &BipartiteVector) -> Result<Complex64> {
    same_dims(phi, psi)?;
    Ok(compose_aa(&epr_maps(psi).s_ba, &epr_maps(phi).s_ab)?.trace())
}

/// `(A ⊗ 1) ψ = Σ_k φ_k ⊗ s^{ba} φ_k` for positive `A = Σ_k |φ_k⟩⟨φ_k|`.
///
/// The rank-one decomposition is the spectral one, `φ_k = √λ_k v_k`.
pub fn reconstruct(s_ba: &AntilinearMap, a: &ComplexMatrix) -> Result<BipartiteVector> {
    let da = s_ba.dim_domain();
    let db = s_ba.dim_codomain();
    matcore::ensure_shape(a, da, da, "reconstruction operator")?;
    let eig = matcore::psd_eigen(a)?;
    let mut coeff = ComplexMatrix::zeros(da, db);
    for (k, &lambda) in eig.values.iter().enumerate() {
        if lambda == 0.0 {
            continue;
        }
        let phi_k: ComplexVector = eig.vectors.column(k).scale(lambda.sqrt());
        let image = s_ba.apply(&phi_k)?;
        coeff += &phi_k * image.transpose();
    }
    BipartiteVector::new(coeff)
}

/// Reduced density operator: `ω^a = s^{ab} s^{ba}` or `ω^b = s^{ba} s^{ab}`.
pub fn reduced(psi: &BipartiteVector, side: Subsystem) -> ComplexMatrix {
    let pair = epr_maps(psi);
    let r = match side {
        Subsystem::A => compose_aa(&pair.s_ab, &pair.s_ba),
        Subsystem::B => compose_aa(&pair.s_ba, &pair.s_ab),
    };
    r.expect("EPR maps of one vector always compose")
}

/// `(A ⊗ B) ψ`.
pub fn local_transform(psi: &BipartiteVector, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<BipartiteVector> {
    matcore::ensure_shape(a, psi.dim_a(), psi.dim_a(), "A")?;
    matcore::ensure_shape(b, psi.dim_b(), psi.dim_b(), "B")?;
    BipartiteVector::new(a * &psi.coeff * b.transpose())
}

/// The operator `B = (j^{ba} ∘ A ∘ j^{ab})*` on `H_b`, zero off the support of `ω^b`.
///
/// `polar_of_psi` must be the polar decomposition of `s_ψ^{ba}`. On the support
/// `B* j^{ba} = j^{ba} A`, and `Tr ω^a A = Tr ω^b B`.
pub fn partner_operator(a: &ComplexMatrix, polar_of_psi: &PolarParts) -> Result<ComplexMatrix> {
    let j_ba = &polar_of_psi.phase;
    let da = j_ba.dim_domain();
    matcore::ensure_shape(a, da, da, "A")?;
    let j_a = compose_mixed(a, &j_ba.adjoint(), LinearSide::After)?;
    Ok(compose_aa(j_ba, &j_a)?.adjoint())
}

/// The purification of `ω^a` whose EPR map is `s^{ba} = w ∘ (ω^a)^{1/2}`.
///
/// `w : H_a -> H_b` must be an antilinear isometry on the support of `ω^a`.
pub fn purification_from_isometry(omega_a: &ComplexMatrix, w: &AntilinearMap) -> Result<BipartiteVector> {
    let da = matcore::ensure_square(omega_a, "omega_a")?;
    if w.dim_domain() != da {
        return Err(Error::DimMismatch(format!(
            "isometry acts on dimension {}, state on {da}",
            w.dim_domain()
        )));
    }
    let root = matcore::psd_sqrt(omega_a)?;
    let q = matcore::support_projection(omega_a)?;
    let wq = compose_mixed(&q, w, LinearSide::Before)?;
    let gram = compose_aa(&wq.adjoint(), &wq)?;
    let residual = matcore::max_abs_diff(&gram, &q);
    if residual > STRUCTURE_TOL {
        return Err(Error::NotIsometry { residual });
    }
    let s_ba = compose_mixed(&root, w, LinearSide::Before)?;
    BipartiteVector::new(s_ba.adjoint().into_mat())
}

/// `s_φ^{ba} ∘ s_ψ^{ab}`, a linear map on `H_b`.
pub fn cross_gram(phi: &BipartiteVector, psi: &BipartiteVector) -> Result<ComplexMatrix> {
    same_dims(phi, psi)?;
    compose_aa(&epr_maps(phi).s_ba, &epr_maps(psi).s_ab)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloningReport {
    /// Both `s_φ^{ba} s_ψ^{ab}` and `s_φ^{ab} s_ψ^{ba}` are Hermitian.
    pub hermitian: bool,
    /// `‖ω_ψ^a ω_φ^a − ω_φ^a ω_ψ^a‖_F`.
    pub commutator_norm: f64,
}

/// Hermiticity of the two cross products and the commutator of the a-reductions.
///
/// When both cross products are Hermitian the a-reductions commute.
pub fn cloning_check(phi: &BipartiteVector, psi: &BipartiteVector) -> Result<CloningReport> {
    same_dims(phi, psi)?;
    let ephi = epr_maps(phi);
    let epsi = epr_maps(psi);
    let on_b = compose_aa(&ephi.s_ba, &epsi.s_ab)?;
    let on_a = compose_aa(&ephi.s_ab, &epsi.s_ba)?;
    let hermitian = matcore::hermitian_deviation(&on_b) <= STRUCTURE_TOL
        && matcore::hermitian_deviation(&on_a) <= STRUCTURE_TOL;
    let w_psi = reduced(psi, Subsystem::A);
    let w_phi = reduced(phi, Subsystem::A);
    let commutator_norm = (&w_psi * &w_phi - &w_phi * &w_psi).norm();
    Ok(CloningReport { hermitian, commutator_norm })
}

/// Polar decomposition of `s_ψ^{ba}`: positive parts `√ω^b` (left) and `√ω^a` (right).
pub fn polar_ba(psi: &BipartiteVector) -> PolarParts {
    antilinear::polar(&epr_maps(psi).s_ba).expect("coefficients are finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{identity, max_abs_diff};
    use approx::assert_abs_diff_eq;

    fn r(x: f64) -> Complex64 {
        c64(x, 0.0)
    }

    fn basis(d: usize, i: usize) -> ComplexVector {
        ComplexVector::from_fn(d, |k, _| if k == i { r(1.0) } else { r(0.0) })
    }

    fn bell() -> BipartiteVector {
        BipartiteVector::maximally_entangled(2)
    }

    fn diag(v: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(v.len(), v.iter().map(|&x| r(x))))
    }

    #[test]
    fn epr_map_of_basis_product() {
        let psi = BipartiteVector::product(&basis(2, 0), &basis(2, 1)).unwrap();
        let expected = ComplexMatrix::from_row_slice(2, 2, &[r(0.0), r(0.0), r(1.0), r(0.0)]);
        assert_eq!(epr_maps(&psi).s_ba.mat(), &expected);
    }

    #[test]
    fn epr_map_of_bell() {
        let pair = epr_maps(&bell());
        assert!(max_abs_diff(pair.s_ba.mat(), &identity(2).scale(0.5f64.sqrt())) < 1e-15);
        assert_eq!(pair.s_ab, pair.s_ba.adjoint());
    }

    #[test]
    fn decomposition_independence() {
        // e0⊗e0 + e1⊗e1 written in the computational and in the |±⟩ basis
        let h = 0.5f64.sqrt();
        let plus = ComplexVector::from_vec(vec![r(h), r(h)]);
        let minus = ComplexVector::from_vec(vec![r(h), r(-h)]);
        let c1 = BipartiteVector::product(&basis(2, 0), &basis(2, 0)).unwrap().coeff().clone()
            + BipartiteVector::product(&basis(2, 1), &basis(2, 1)).unwrap().coeff();
        let c2 = BipartiteVector::product(&plus, &plus).unwrap().coeff().clone()
            + BipartiteVector::product(&minus, &minus).unwrap().coeff();
        let m1 = epr_maps(&BipartiteVector::new(c1).unwrap());
        let m2 = epr_maps(&BipartiteVector::new(c2).unwrap());
        assert!(max_abs_diff(m1.s_ba.mat(), m2.s_ba.mat()) < 1e-15);
    }

    #[test]
    fn project_bell_onto_e0() {
        let out = project_rank1(&bell(), &basis(2, 0)).unwrap();
        let expected = BipartiteVector::product(&basis(2, 0), &basis(2, 0)).unwrap();
        assert!(max_abs_diff(out.coeff(), &expected.coeff().scale(0.5f64.sqrt())) < 1e-15);
    }

    #[test]
    fn project_product_vector() {
        let u = ComplexVector::from_vec(vec![c64(0.6, 0.0), c64(0.0, 0.8)]);
        let w = ComplexVector::from_vec(vec![r(1.0), r(2.0), r(3.0)]);
        let psi = BipartiteVector::product(&u, &w).unwrap();
        let phi = ComplexVector::from_vec(vec![c64(0.0, 0.6), r(0.8)]);
        let out = project_rank1(&psi, &phi).unwrap();
        let expected = BipartiteVector::product(&phi.scale(1.0), &w).unwrap().coeff() * matcore::inner(&phi, &u);
        assert!(max_abs_diff(out.coeff(), &expected) < 1e-14);
    }

    #[test]
    fn project_errors() {
        assert!(matches!(project_rank1(&bell(), &basis(3, 0)), Err(Error::DimMismatch(_))));
        assert!(matches!(
            project_rank1(&bell(), &basis(2, 0).scale(2.0)),
            Err(Error::NotUnit { .. })
        ));
    }

    #[test]
    fn inner_examples() {
        let b = bell();
        assert_abs_diff_eq!(inner_via_trace(&b, &b).unwrap().re, 1.0, epsilon = 1e-15);
        let e00 = BipartiteVector::product(&basis(2, 0), &basis(2, 0)).unwrap();
        let v = inner_via_trace(&e00, &b).unwrap();
        assert_abs_diff_eq!(v.re, 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, 0.0);
        let e01 = BipartiteVector::product(&basis(2, 0), &basis(2, 1)).unwrap();
        assert_eq!(inner_via_trace(&e00, &e01).unwrap(), r(0.0));
        assert_eq!(inner_via_trace_b(&e00, &e01).unwrap(), r(0.0));
    }

    #[test]
    fn reconstruct_examples() {
        let b = bell();
        let s = epr_maps(&b).s_ba;
        assert!(max_abs_diff(reconstruct(&s, &identity(2)).unwrap().coeff(), b.coeff()) < 1e-15);
        let p0 = diag(&[1.0, 0.0]);
        let expected = project_rank1(&b, &basis(2, 0)).unwrap();
        assert!(max_abs_diff(reconstruct(&s, &p0).unwrap().coeff(), expected.coeff()) < 1e-15);
        let zero = reconstruct(&s, &ComplexMatrix::zeros(2, 2)).unwrap();
        assert_eq!(zero.norm(), 0.0);
        assert!(matches!(reconstruct(&s, &diag(&[1.0, -1.0])), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn reduced_examples() {
        let b = bell();
        assert!(max_abs_diff(&reduced(&b, Subsystem::A), &identity(2).scale(0.5)) < 1e-15);
        assert!(max_abs_diff(&reduced(&b, Subsystem::B), &identity(2).scale(0.5)) < 1e-15);
        let u = ComplexVector::from_vec(vec![c64(0.6, 0.0), c64(0.0, 0.8)]);
        let w = basis(3, 2);
        let p = BipartiteVector::product(&u, &w).unwrap();
        assert!(max_abs_diff(&reduced(&p, Subsystem::A), &matcore::outer(&u, &u)) < 1e-15);
        assert!(max_abs_diff(&reduced(&p, Subsystem::B), &matcore::outer(&w, &w)) < 1e-15);
    }

    #[test]
    fn local_transform_examples() {
        let b = bell();
        assert_eq!(local_transform(&b, &identity(2), &identity(2)).unwrap(), b);
        let a = ComplexMatrix::from_diagonal(&ComplexVector::from_vec(vec![c64(1.0, 2.0), c64(-0.5, 0.0)]));
        let out = local_transform(&b, &a, &identity(2)).unwrap();
        assert!(max_abs_diff(out.coeff(), &a.scale(0.5f64.sqrt())) < 1e-15);
        assert!(matches!(
            local_transform(&b, &identity(3), &identity(2)),
            Err(Error::DimMismatch(_))
        ));
    }

    #[test]
    fn partner_of_identity_is_support() {
        let b = bell();
        let pol = polar_ba(&b);
        let bop = partner_operator(&identity(2), &pol).unwrap();
        assert!(max_abs_diff(&bop, &pol.support_cod) < 1e-14);
        assert!(max_abs_diff(&bop, &identity(2)) < 1e-14);
    }

    #[test]
    fn partner_bell_diag() {
        let b = bell();
        let a = diag(&[1.0, 2.0]);
        let bop = partner_operator(&a, &polar_ba(&b)).unwrap();
        let lhs = (reduced(&b, Subsystem::A) * &a).trace();
        let rhs = (reduced(&b, Subsystem::B) * &bop).trace();
        assert_abs_diff_eq!(lhs.re, 1.5, epsilon = 1e-14);
        assert_abs_diff_eq!(rhs.re, 1.5, epsilon = 1e-14);
        assert_abs_diff_eq!(rhs.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn purification_of_half_identity_is_bell() {
        let psi = purification_from_isometry(&identity(2).scale(0.5), &AntilinearMap::conjugation(2)).unwrap();
        assert!(max_abs_diff(psi.coeff(), bell().coeff()) < 1e-15);
    }

    #[test]
    fn purification_of_pure_state_is_product() {
        let u = ComplexVector::from_vec(vec![c64(0.6, 0.0), c64(0.0, 0.8)]);
        let omega = matcore::outer(&u, &u);
        let w = AntilinearMap::new(ComplexMatrix::from_row_slice(
            3,
            2,
            &[r(0.0), r(0.0), r(1.0), r(0.0), r(0.0), r(1.0)],
        ))
        .unwrap();
        let psi = purification_from_isometry(&omega, &w).unwrap();
        assert_eq!(matcore::svd(psi.coeff()).unwrap().rank, 1);
        assert!(max_abs_diff(&reduced(&psi, Subsystem::A), &omega) < 1e-14);
    }

    #[test]
    fn purification_rejects_non_isometry() {
        let w = AntilinearMap::conjugation(2).scale(r(2.0));
        assert!(matches!(
            purification_from_isometry(&identity(2).scale(0.5), &w),
            Err(Error::NotIsometry { .. })
        ));
        assert!(matches!(
            purification_from_isometry(&diag(&[1.0, -0.5]), &AntilinearMap::conjugation(2)),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn cross_gram_examples() {
        let b = bell();
        let g = cross_gram(&b, &b).unwrap();
        assert!(max_abs_diff(&g, &identity(2).scale(0.5)) < 1e-15);
        let e00 = BipartiteVector::product(&basis(2, 0), &basis(2, 0)).unwrap();
        let e11 = BipartiteVector::product(&basis(2, 1), &basis(2, 1)).unwrap();
        assert_eq!(cross_gram(&e00, &e11).unwrap(), ComplexMatrix::zeros(2, 2));
    }

    #[test]
    fn cloning_examples() {
        let b = bell();
        let rep = cloning_check(&b, &b).unwrap();
        assert!(rep.hermitian);
        assert_abs_diff_eq!(rep.commutator_norm, 0.0);
        let skew = BipartiteVector::new(diag(&[0.8f64.sqrt(), 0.2f64.sqrt()])).unwrap();
        let rep = cloning_check(&b, &skew).unwrap();
        assert!(rep.hermitian);
        assert!(rep.commutator_norm <= 1e-12);
    }
}
