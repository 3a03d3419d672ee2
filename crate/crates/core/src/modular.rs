//! Twisted direct products and the Tomita–Takesaki operators of a bipartite vector.
//!
//! For `η : H_b -> H_a` and `ξ : H_a -> H_b` of equal parity the twisted
//! product `η ⊗̃ ξ` acts on `H_a ⊗ H_b` by `φ^a ⊗ φ^b ↦ η φ^b ⊗ ξ φ^a`. In the
//! a-major product basis its matrix is `(M_η ⊗ M_ξ) · SWAP`, linear or
//! antilinear with the factors.
//!
//! With `j` the antilinear polar phases of the EPR maps, the lifted operators of
//! an ordered pair `(φ, ψ)` are
//!
//! ```text
//! S̃_{φ,ψ} = j_φ^{ab} ⊗̃ s_ψ^{ba}    F̃_{φ,ψ} = s_φ^{ab} ⊗̃ j_ψ^{ba}
//! Δ̃_{φ,ψ} = s_φ^{ab} ⊗̃ s_ψ^{ba}    J_{φ,ψ} = j_φ^{ab} ⊗̃ j_ψ^{ba}
//! ```
//!
//! and their polar decompositions share the phase `J_{φ,ψ}`:
//!
//! ```text
//! Δ̃_{φ,ψ} = (ω^a_φ ⊗ ω^b_ψ)^{1/2} J_{φ,ψ} = J_{φ,ψ} (ω^a_ψ ⊗ ω^b_φ)^{1/2}
//! S̃_{φ,ψ} = (Q^a_φ ⊗ ω^b_ψ)^{1/2} J_{φ,ψ} = J_{φ,ψ} (ω^a_ψ ⊗ Q^b_φ)^{1/2}
//! F̃_{φ,ψ} = (ω^a_φ ⊗ Q^b_ψ)^{1/2} J_{φ,ψ} = J_{φ,ψ} (Q^a_ψ ⊗ ω^b_φ)^{1/2}
//! ```
//!
//! For a cyclic and separating `ψ`, the Tomita operator defined by
//! `S_{φ,ψ} (A ⊗ 1) ψ = (A* ⊗ 1) φ` has polar decomposition
//! `S_{φ,ψ} = J_{ψ,φ} Δ^{1/2}` with `Δ = ω^a_φ ⊗ (ω^b_ψ)^{-1}`, so its modular
//! conjugation is the twisted product `j_ψ^{ab} ⊗̃ j_φ^{ba}`.

use crate::antilinear::{self, AntilinearMap, LinearSide, Operator};
use crate::bipartite::{epr_maps, polar_ba, reduced, BipartiteVector};
use crate::error::{Error, Result};
use crate::matcore::{self, c64, ComplexMatrix, Subsystem};

/// Residual target for the identities of this module.
pub const MODULAR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct TwistedOperator {
    op: Operator,
    eta: Operator,
    xi: Operator,
}

/// Permutation `H_a ⊗ H_b -> H_b ⊗ H_a`, `e_i ⊗ e_j ↦ e_j ⊗ e_i`.
pub fn swap_matrix(dim_a: usize, dim_b: usize) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(dim_a * dim_b, dim_a * dim_b);
    for i in 0..dim_a {
        for j in 0..dim_b {
            p[(j * dim_a + i, i * dim_b + j)] = c64(1.0, 0.0);
        }
    }
    p
}

/// `η^{ab} ⊗̃ ξ^{ba}`.
pub fn twisted_product(eta_ab: &Operator, xi_ba: &Operator) -> Result<TwistedOperator> {
    if eta_ab.is_antilinear() != xi_ba.is_antilinear() {
        return Err(Error::MixedParity);
    }
    let (da, db) = (eta_ab.dim_codomain(), eta_ab.dim_domain());
    if xi_ba.dim_domain() != da || xi_ba.dim_codomain() != db {
        return Err(Error::DimMismatch(format!(
            "twisted product of a {}x{} and a {}x{} map",
            eta_ab.dim_codomain(),
            eta_ab.dim_domain(),
            xi_ba.dim_codomain(),
            xi_ba.dim_domain()
        )));
    }
    let mat = matcore::kron(eta_ab.mat(), xi_ba.mat()) * swap_matrix(da, db);
    let op = if eta_ab.is_antilinear() {
        Operator::Antilinear(AntilinearMap::new(mat)?)
    } else {
        Operator::Linear(mat)
    };
    Ok(TwistedOperator { op, eta: eta_ab.clone(), xi: xi_ba.clone() })
}

impl TwistedOperator {
    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn mat(&self) -> &ComplexMatrix {
        self.op.mat()
    }

    pub fn is_antilinear(&self) -> bool {
        self.op.is_antilinear()
    }

    /// The `(η, ξ)` factors it was built from.
    pub fn factors(&self) -> (&Operator, &Operator) {
        (&self.eta, &self.xi)
    }

    pub fn dim_a(&self) -> usize {
        self.eta.dim_codomain()
    }

    pub fn dim_b(&self) -> usize {
        self.eta.dim_domain()
    }

    /// Dense Hermitian adjoint of the full operator.
    pub fn adjoint(&self) -> Operator {
        self.op.adjoint()
    }

    /// `(η ⊗̃ ξ)* = ξ* ⊗̃ η*`, built from the factors.
    pub fn adjoint_from_factors(&self) -> TwistedOperator {
        twisted_product(&self.xi.adjoint(), &self.eta.adjoint()).expect("factors of a valid product")
    }

    /// The operator as an antilinear map; `None` for a linear product.
    pub fn as_antilinear(&self) -> Option<&AntilinearMap> {
        match &self.op {
            Operator::Antilinear(t) => Some(t),
            Operator::Linear(_) => None,
        }
    }
}

/// `(η1 ⊗̃ ξ1) ∘ (η2 ⊗̃ ξ2) = (η1 ξ2) ⊗ (ξ1 η2)`, an ordinary Kronecker product.
pub fn twisted_compose(p1: &TwistedOperator, p2: &TwistedOperator) -> Result<ComplexMatrix> {
    if p1.is_antilinear() != p2.is_antilinear() {
        return Err(Error::MixedParity);
    }
    if (p1.dim_a(), p1.dim_b()) != (p2.dim_a(), p2.dim_b()) {
        return Err(Error::DimMismatch("twisted products on different spaces".into()));
    }
    let left = p1.eta.compose(&p2.xi)?;
    let right = p1.xi.compose(&p2.eta)?;
    Ok(matcore::kron(left.mat(), right.mat()))
}

/// The four lifted operators of an ordered pair `(φ, ψ)`.
#[derive(Debug, Clone)]
pub struct Lifted {
    pub s_tilde: TwistedOperator,
    pub f_tilde: TwistedOperator,
    pub delta_tilde: TwistedOperator,
    pub j: TwistedOperator,
}

pub fn lift_operators(phi: &BipartiteVector, psi: &BipartiteVector) -> Result<Lifted> {
    if phi.coeff().shape() != psi.coeff().shape() {
        return Err(Error::DimMismatch(format!(
            "vectors of shape {:?} and {:?}",
            phi.coeff().shape(),
            psi.coeff().shape()
        )));
    }
    let s_phi_ab = Operator::Antilinear(epr_maps(phi).s_ab);
    let s_psi_ba = Operator::Antilinear(epr_maps(psi).s_ba);
    let j_phi_ab = Operator::Antilinear(polar_ba(phi).phase.adjoint());
    let j_psi_ba = Operator::Antilinear(polar_ba(psi).phase);
    Ok(Lifted {
        s_tilde: twisted_product(&j_phi_ab, &s_psi_ba)?,
        f_tilde: twisted_product(&s_phi_ab, &j_psi_ba)?,
        delta_tilde: twisted_product(&s_phi_ab, &s_psi_ba)?,
        j: twisted_product(&j_phi_ab, &j_psi_ba)?,
    })
}

/// Residuals of the identities satisfied by the lifted operators of `(φ, ψ)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LiftResiduals {
    /// `Δ̃_{ψ,φ} Δ̃_{φ,ψ} = ω^a_ψ ⊗ ω^b_φ`.
    pub delta_product: f64,
    /// `J_{ψ,φ} J_{φ,ψ} = Q^a_ψ ⊗ Q^b_φ`.
    pub j_product: f64,
    /// Left and right polar forms of `Δ̃_{φ,ψ}`.
    pub delta_polar: f64,
    /// Left and right polar forms of `S̃_{φ,ψ}`.
    pub s_polar: f64,
    /// Left and right polar forms of `F̃_{φ,ψ}`.
    pub f_polar: f64,
    /// `Δ̃_{φ,ψ}* = Δ̃_{ψ,φ}`, `J_{φ,ψ}* = J_{ψ,φ}` and `S̃_{φ,ψ}* = F̃_{ψ,φ}`.
    pub adjoint_exchange: f64,
}

impl LiftResiduals {
    pub fn max(&self) -> f64 {
        [
            self.delta_product,
            self.j_product,
            self.delta_polar,
            self.s_polar,
            self.f_polar,
            self.adjoint_exchange,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

struct Reductions {
    omega_a: ComplexMatrix,
    omega_b: ComplexMatrix,
    q_a: ComplexMatrix,
    q_b: ComplexMatrix,
}

fn reductions(v: &BipartiteVector) -> Result<Reductions> {
    let omega_a = reduced(v, Subsystem::A);
    let omega_b = reduced(v, Subsystem::B);
    let pol = polar_ba(v);
    Ok(Reductions { q_a: pol.support_dom, q_b: pol.support_cod, omega_a, omega_b })
}

fn polar_forms_residual(
    x: &TwistedOperator,
    phase: &TwistedOperator,
    left_sq: &ComplexMatrix,
    right_sq: &ComplexMatrix,
) -> Result<f64> {
    let j = phase.as_antilinear().expect("lifted operators are antilinear");
    let target = x.mat();
    let left = antilinear::compose_mixed(&matcore::psd_sqrt(left_sq)?, j, LinearSide::After)?;
    let right = antilinear::compose_mixed(&matcore::psd_sqrt(right_sq)?, j, LinearSide::Before)?;
    Ok(matcore::max_abs_diff(left.mat(), target).max(matcore::max_abs_diff(right.mat(), target)))
}

pub fn lift_residuals(phi: &BipartiteVector, psi: &BipartiteVector) -> Result<LiftResiduals> {
    let fwd = lift_operators(phi, psi)?;
    let rev = lift_operators(psi, phi)?;
    let rp = reductions(phi)?;
    let rs = reductions(psi)?;
    let dense = |a: &TwistedOperator, b: &TwistedOperator| a.operator().compose(b.operator());

    let delta_product = matcore::max_abs_diff(
        dense(&rev.delta_tilde, &fwd.delta_tilde)?.mat(),
        &matcore::kron(&rs.omega_a, &rp.omega_b),
    );
    let j_product = matcore::max_abs_diff(dense(&rev.j, &fwd.j)?.mat(), &matcore::kron(&rs.q_a, &rp.q_b));

    let k = matcore::kron;
    let delta_polar = polar_forms_residual(
        &fwd.delta_tilde,
        &fwd.j,
        &k(&rp.omega_a, &rs.omega_b),
        &k(&rs.omega_a, &rp.omega_b),
    )?;
    let s_polar =
        polar_forms_residual(&fwd.s_tilde, &fwd.j, &k(&rp.q_a, &rs.omega_b), &k(&rs.omega_a, &rp.q_b))?;
    let f_polar =
        polar_forms_residual(&fwd.f_tilde, &fwd.j, &k(&rp.omega_a, &rs.q_b), &k(&rs.q_a, &rp.omega_b))?;

    let adjoint_exchange = [
        matcore::max_abs_diff(fwd.delta_tilde.adjoint().mat(), rev.delta_tilde.mat()),
        matcore::max_abs_diff(fwd.j.adjoint().mat(), rev.j.mat()),
        matcore::max_abs_diff(fwd.s_tilde.adjoint().mat(), rev.f_tilde.mat()),
    ]
    .into_iter()
    .fold(0.0, f64::max);

    Ok(LiftResiduals { delta_product, j_product, delta_polar, s_polar, f_polar, adjoint_exchange })
}

/// Both reductions of `ψ` have full rank, i.e. `ψ` is cyclic and separating
/// for `B(H_a) ⊗ 1`.
pub fn gns_check(psi: &BipartiteVector) -> bool {
    gns_ranks(psi).map(|(ra, rb)| ra == psi.dim_a() && rb == psi.dim_b()).unwrap_or(false)
}

fn gns_ranks(psi: &BipartiteVector) -> Result<(usize, usize)> {
    let ra = matcore::svd(&reduced(psi, Subsystem::A))?.rank;
    let rb = matcore::svd(&reduced(psi, Subsystem::B))?.rank;
    Ok((ra, rb))
}

fn matrix_unit(d: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut e = ComplexMatrix::zeros(d, d);
    e[(i, j)] = c64(1.0, 0.0);
    e
}

/// Columns `(E_ij ⊗ 1) v` for all matrix units, in `(i, j)` row-major order.
fn matrix_unit_orbit(v: &BipartiteVector, adjoint: bool) -> ComplexMatrix {
    let d = v.dim_a();
    let n = d * v.dim_b();
    let mut cols = ComplexMatrix::zeros(n, d * d);
    for i in 0..d {
        for j in 0..d {
            let e = if adjoint { matrix_unit(d, j, i) } else { matrix_unit(d, i, j) };
            let img = BipartiteVector::new(e * v.coeff()).expect("finite").to_vector();
            cols.set_column(i * d + j, &img);
        }
    }
    cols
}

/// Dimension of `span {(A ⊗ 1) ψ}`, from the Gram matrix of the matrix-unit orbit.
pub fn cyclic_span_rank(psi: &BipartiteVector) -> usize {
    let orbit = matrix_unit_orbit(psi, false);
    let gram = orbit.adjoint() * &orbit;
    matcore::svd(&gram).map(|s| s.rank).unwrap_or(0)
}

/// `S`, `Δ` and the modular conjugation `J` of the pair `(φ, ψ)`.
#[derive(Debug, Clone)]
pub struct ModularTriple {
    pub s: AntilinearMap,
    pub delta: ComplexMatrix,
    pub j: AntilinearMap,
}

/// Builds `S_{φ,ψ}` from `S (E_ij ⊗ 1) ψ = (E_ji ⊗ 1) φ` on all matrix units,
/// `Δ = ω^a_φ ⊗ (ω^b_ψ)^{-1}`, and `J` as the polar phase of `S`.
#[allow(non_snake_case)]
pub fn tomita_S(phi: &BipartiteVector, psi: &BipartiteVector) -> Result<ModularTriple> {
    if phi.coeff().shape() != psi.coeff().shape() {
        return Err(Error::DimMismatch(format!(
            "vectors of shape {:?} and {:?}",
            phi.coeff().shape(),
            psi.coeff().shape()
        )));
    }
    let (rank_a, rank_b) = gns_ranks(psi)?;
    if rank_a != psi.dim_a() || rank_b != psi.dim_b() {
        return Err(Error::NotSeparating { rank_a, dim_a: psi.dim_a(), rank_b, dim_b: psi.dim_b() });
    }
    // S x = M conj(x): M conj(X) = Y with X, Y the orbits of ψ and φ.
    let x = matrix_unit_orbit(psi, false);
    let y = matrix_unit_orbit(phi, true);
    let m_t = x
        .conjugate()
        .transpose()
        .lu()
        .solve(&y.transpose())
        .ok_or(Error::Singular)?;
    let s = AntilinearMap::new(m_t.transpose())?;
    let omega_b_inv = matcore::pd_inverse(&reduced(psi, Subsystem::B))?;
    let delta = matcore::kron(&reduced(phi, Subsystem::A), &omega_b_inv);
    let j = antilinear::polar(&s)?.phase;
    Ok(ModularTriple { s, delta, j })
}

/// Residuals of the Tomita–Takesaki identities for `(φ, ψ)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TomitaResiduals {
    /// `S (A ⊗ 1) ψ = (A* ⊗ 1) φ` over all matrix units.
    pub defining_relation: f64,
    /// `S = J Δ^{1/2}`.
    pub polar_reconstruction: f64,
    /// Most negative eigenvalue of `Δ`, clipped at zero (zero when positive).
    pub delta_negativity: f64,
    /// Polar phase of `S` against the twisted product `J_{ψ,φ} = j_ψ^{ab} ⊗̃ j_φ^{ba}`.
    pub j_twisted: f64,
    /// `J_{φ,ψ} S_{φ,ψ} (1 ⊗ √ω^b_ψ) = √ω^a_φ ⊗ 1`.
    pub intertwiner: f64,
}

impl TomitaResiduals {
    pub fn max(&self) -> f64 {
        [
            self.defining_relation,
            self.polar_reconstruction,
            self.delta_negativity,
            self.j_twisted,
            self.intertwiner,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn tomita_residuals(phi: &BipartiteVector, psi: &BipartiteVector) -> Result<TomitaResiduals> {
    let triple = tomita_S(phi, psi)?;
    let d = psi.dim_a();
    let id_a = matcore::identity(d);
    let id_b = matcore::identity(psi.dim_b());

    let mut defining_relation: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let e = matrix_unit(d, i, j);
            let lhs = triple.s.apply(&crate::bipartite::local_transform(psi, &e, &id_b)?.to_vector())?;
            let rhs = crate::bipartite::local_transform(phi, &e.adjoint(), &id_b)?.to_vector();
            defining_relation = defining_relation.max(matcore::vec_diff(&lhs, &rhs));
        }
    }

    let root_delta = matcore::psd_sqrt(&triple.delta)?;
    let rebuilt = antilinear::compose_mixed(&root_delta, &triple.j, LinearSide::Before)?;
    let polar_reconstruction = matcore::max_abs_diff(rebuilt.mat(), triple.s.mat());

    let lowest = matcore::hermitian_eigen(&triple.delta)?.values.last().copied().unwrap_or(0.0);
    let delta_negativity = (-lowest).max(0.0);

    let twisted_rev = lift_operators(psi, phi)?.j;
    let j_twisted = matcore::max_abs_diff(triple.j.mat(), twisted_rev.mat());

    let twisted_fwd = lift_operators(phi, psi)?.j;
    let js = antilinear::compose_aa(twisted_fwd.as_antilinear().expect("antilinear"), &triple.s)?;
    let lhs = js * matcore::kron(&id_a, &matcore::psd_sqrt(&reduced(psi, Subsystem::B))?);
    let rhs = matcore::kron(&matcore::psd_sqrt(&reduced(phi, Subsystem::A))?, &id_b);
    let intertwiner = matcore::max_abs_diff(&lhs, &rhs);

    Ok(TomitaResiduals { defining_relation, polar_reconstruction, delta_negativity, j_twisted, intertwiner })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{identity, max_abs_diff, ComplexVector};

    fn e(d: usize, i: usize) -> ComplexVector {
        ComplexVector::from_fn(d, |k, _| c64(if k == i { 1.0 } else { 0.0 }, 0.0))
    }

    fn conj2() -> Operator {
        Operator::Antilinear(AntilinearMap::conjugation(2))
    }

    #[test]
    fn conjugation_twist_swaps() {
        let p = twisted_product(&conj2(), &conj2()).unwrap();
        let v = matcore::kron_vec(&e(2, 0), &e(2, 1));
        let out = p.operator().apply(&v).unwrap();
        assert_eq!(out, matcore::kron_vec(&e(2, 1), &e(2, 0)));
    }

    #[test]
    fn linear_twist_on_basis() {
        let x = ComplexMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)]);
        let p = twisted_product(&Operator::Linear(x.clone()), &Operator::Linear(identity(2))).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let out = p.operator().apply(&matcore::kron_vec(&e(2, i), &e(2, j))).unwrap();
                assert_eq!(out, matcore::kron_vec(&(&x * e(2, j)), &e(2, i)));
            }
        }
    }

    #[test]
    fn mixed_parity_rejected() {
        let lin = Operator::Linear(identity(2));
        assert_eq!(twisted_product(&lin, &conj2()), Err(Error::MixedParity));
    }

    #[test]
    fn twist_dim_mismatch() {
        let eta = Operator::Linear(ComplexMatrix::zeros(2, 3));
        let xi = Operator::Linear(ComplexMatrix::zeros(2, 2));
        assert!(matches!(twisted_product(&eta, &xi), Err(Error::DimMismatch(_))));
    }

    #[test]
    fn conjugation_twist_squares_to_identity() {
        let p = twisted_product(&conj2(), &conj2()).unwrap();
        assert_eq!(twisted_compose(&p, &p).unwrap(), identity(4));
    }

    #[test]
    fn bell_lift() {
        let b = BipartiteVector::maximally_entangled(2);
        let lifted = lift_operators(&b, &b).unwrap();
        let swap_conj = twisted_product(&conj2(), &conj2()).unwrap();
        assert!(max_abs_diff(lifted.j.mat(), swap_conj.mat()) < 1e-14);
        assert!(max_abs_diff(lifted.delta_tilde.mat(), &swap_conj.mat().scale(0.5)) < 1e-14);
    }

    #[test]
    fn gns_examples() {
        assert!(gns_check(&BipartiteVector::maximally_entangled(2)));
        let prod = BipartiteVector::product(&e(2, 0), &e(2, 1)).unwrap();
        assert!(!gns_check(&prod));
        let skew = BipartiteVector::new(ComplexMatrix::from_diagonal(&ComplexVector::from_vec(vec![
            c64(0.999f64.sqrt(), 0.0),
            c64(0.001f64.sqrt(), 0.0),
        ])))
        .unwrap();
        assert!(gns_check(&skew));
        assert_eq!(cyclic_span_rank(&skew), 4);
        assert_eq!(cyclic_span_rank(&prod), 2);
        let mut rect = ComplexMatrix::zeros(2, 3);
        rect[(0, 0)] = c64(0.5f64.sqrt(), 0.0);
        rect[(1, 1)] = c64(0.5f64.sqrt(), 0.0);
        assert!(!gns_check(&BipartiteVector::new(rect).unwrap()));
    }

    #[test]
    fn bell_tomita() {
        let b = BipartiteVector::maximally_entangled(2);
        let t = tomita_S(&b, &b).unwrap();
        assert!(max_abs_diff(&t.delta, &identity(4)) < 1e-14);
        assert!(max_abs_diff(t.j.mat(), t.s.mat()) < 1e-14);
        // S (|0⟩⟨1| ⊗ 1) ψ = (|1⟩⟨0| ⊗ 1) ψ = |10⟩/√2
        let e01 = matrix_unit(2, 0, 1);
        let arg = crate::bipartite::local_transform(&b, &e01, &identity(2)).unwrap().to_vector();
        let out = t.s.apply(&arg).unwrap();
        let expected = matcore::kron_vec(&e(2, 1), &e(2, 0)).scale(0.5f64.sqrt());
        assert!(matcore::vec_diff(&out, &expected) < 1e-14);
    }

    #[test]
    fn tomita_requires_separating() {
        let prod = BipartiteVector::product(&e(2, 0), &e(2, 1)).unwrap();
        assert!(matches!(tomita_S(&prod, &prod), Err(Error::NotSeparating { .. })));
    }
}
