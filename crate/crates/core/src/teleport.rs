//! Imperfect teleportation channels.
//!
//! A rank-one measurement `ψ^{ab}` on the ab-system, applied to `φ^a ⊗ φ^{bc}`,
//! leaves the c-system in `t^{ca} φ^a` with `t^{ca} = s_φ^{cb} ∘ s_ψ^{ba}`.
//! Outputs are never renormalized: `‖t φ^a‖²` is the probability of the event.
//!
//! Every factorized formula here has a dense counterpart that builds the full
//! multipartite vector and projects it explicitly; those serve as oracles.

use crate::antilinear::{compose_aa, compose_chain, Operator};
use crate::bipartite::{epr_maps, reduced, BipartiteVector};
use crate::error::{Error, Result};
use crate::matcore::{self, c64, ComplexMatrix, ComplexVector, Subsystem};

/// Residual above which a dense oracle refuses to factor its result.
pub const FACTORIZATION_TOL: f64 = 1e-8;
/// Largest total dimension the dense chain oracle accepts.
pub const DENSE_LIMIT: usize = 4096;
/// Orthonormality tolerance for Lüders decompositions.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportMap {
    /// `dim_c x dim_a`.
    pub t: ComplexMatrix,
    pub source_psi: BipartiteVector,
    pub ancilla_phi: BipartiteVector,
}

fn check_link(left: &BipartiteVector, right: &BipartiteVector, what: &str) -> Result<()> {
    if left.dim_b() != right.dim_a() {
        return Err(Error::DimMismatch(format!(
            "{what}: shared factor has dimension {} on one side and {} on the other",
            left.dim_b(),
            right.dim_a()
        )));
    }
    Ok(())
}

/// `t^{ca} = s_φ^{cb} ∘ s_ψ^{ba}`.
pub fn teleport_map(psi_ab: &BipartiteVector, phi_bc: &BipartiteVector) -> Result<TeleportMap> {
    check_link(psi_ab, phi_bc, "teleport map")?;
    let t = compose_aa(&epr_maps(phi_bc).s_ba, &epr_maps(psi_ab).s_ba)?;
    Ok(TeleportMap { t, source_psi: psi_ab.clone(), ancilla_phi: phi_bc.clone() })
}

impl TeleportMap {
    pub fn apply(&self, phi_a: &ComplexVector) -> Result<ComplexVector> {
        if phi_a.len() != self.t.ncols() {
            return Err(Error::DimMismatch(format!(
                "input of length {} for a map on dimension {}",
                phi_a.len(),
                self.t.ncols()
            )));
        }
        Ok(&self.t * phi_a)
    }

    fn ensure_unit_inputs(&self) -> Result<()> {
        self.source_psi.ensure_unit()?;
        self.ancilla_phi.ensure_unit()
    }

    /// b-reductions `(ρ, ω)` of the measured vector and of the ancilla.
    pub fn b_reductions(&self) -> (ComplexMatrix, ComplexMatrix) {
        (reduced(&self.source_psi, Subsystem::B), reduced(&self.ancilla_phi, Subsystem::A))
    }
}

/// Apply `op` to the consecutive factors `first..first+count` of a vector on `⊗ dims`.
pub(crate) fn apply_on_factors(
    x: &ComplexVector,
    dims: &[usize],
    first: usize,
    count: usize,
    op: &ComplexMatrix,
) -> ComplexVector {
    let left: usize = dims[..first].iter().product();
    let mid: usize = dims[first..first + count].iter().product();
    let right: usize = dims[first + count..].iter().product();
    assert_eq!(op.shape(), (mid, mid));
    assert_eq!(x.len(), left * mid * right);
    let mut y = ComplexVector::zeros(x.len());
    for l in 0..left {
        for m in 0..mid {
            for mp in 0..mid {
                let p = op[(m, mp)];
                if p == c64(0.0, 0.0) {
                    continue;
                }
                for r in 0..right {
                    y[(l * mid + m) * right + r] += p * x[(l * mid + mp) * right + r];
                }
            }
        }
    }
    y
}

/// Split `z = prefix ⊗ tail` for a known unit `prefix`; returns `tail`.
fn factor_out_prefix(z: &ComplexVector, prefix: &ComplexVector) -> Result<ComplexVector> {
    let d = z.len() / prefix.len();
    let tail = ComplexVector::from_fn(d, |k, _| {
        (0..prefix.len()).map(|m| prefix[m].conj() * z[m * d + k]).sum()
    });
    let residual = (z - matcore::kron_vec(prefix, &tail)).norm();
    if residual > FACTORIZATION_TOL {
        return Err(Error::FactorizationFailure { residual });
    }
    Ok(tail)
}

fn ensure_input(phi_a: &ComplexVector, dim_a: usize) -> Result<()> {
    if phi_a.len() != dim_a {
        return Err(Error::DimMismatch(format!(
            "input of length {} for a {dim_a}-dimensional input system",
            phi_a.len()
        )));
    }
    matcore::ensure_finite_vec(phi_a)
}

/// Teleport `φ^a` by explicit projection of `φ^a ⊗ φ^{bc}` onto `ψ^{ab} ⊗ H_c`.
pub fn teleport_oracle(
    psi_ab: &BipartiteVector,
    phi_bc: &BipartiteVector,
    phi_a: &ComplexVector,
) -> Result<ComplexVector> {
    check_link(psi_ab, phi_bc, "teleport oracle")?;
    psi_ab.ensure_unit()?;
    ensure_input(phi_a, psi_ab.dim_a())?;
    let dims = [psi_ab.dim_a(), psi_ab.dim_b(), phi_bc.dim_b()];
    let full = matcore::kron_vec(phi_a, &phi_bc.to_vector());
    let v = psi_ab.to_vector();
    let projected = apply_on_factors(&full, &dims, 0, 2, &matcore::outer(&v, &v));
    factor_out_prefix(&projected, &v)
}

/// `|√ω ρ √ω|_∞` for the b-reductions; bounds `‖t φ^a‖²` over unit inputs.
pub fn success_bound(tm: &TeleportMap) -> Result<f64> {
    tm.ensure_unit_inputs()?;
    let (rho, omega) = tm.b_reductions();
    let root = matcore::psd_sqrt(&omega)?;
    Ok(matcore::norms(&(&root * rho * &root))?.operator)
}

/// `(|t|_1, F(ρ, ω))`; the two agree.
pub fn trace_norm_fidelity(tm: &TeleportMap) -> Result<(f64, f64)> {
    tm.ensure_unit_inputs()?;
    let (rho, omega) = tm.b_reductions();
    Ok((matcore::trace_norm(&tm.t)?, matcore::fidelity(&rho, &omega)?))
}

/// Teleportation triggered by a projection `P = Σ_k |ψ_k⟩⟨ψ_k|` of any rank.
#[derive(Debug, Clone)]
pub struct LudersChannel {
    /// `t_k^{ca} = s_φ^{cb} ∘ s_k^{ba}`, one per vector of the decomposition.
    pub maps: Vec<ComplexMatrix>,
    pub psis: Vec<BipartiteVector>,
    pub phi_bc: BipartiteVector,
    pub ancilla_norm_sq: f64,
}

impl LudersChannel {
    pub fn rank(&self) -> usize {
        self.maps.len()
    }

    pub fn dim_a(&self) -> usize {
        self.psis[0].dim_a()
    }

    pub fn dim_c(&self) -> usize {
        self.phi_bc.dim_b()
    }

    /// `P` as a matrix on `H_a ⊗ H_b`.
    pub fn projection(&self) -> ComplexMatrix {
        let n = self.psis[0].dim_a() * self.psis[0].dim_b();
        self.psis.iter().fold(ComplexMatrix::zeros(n, n), |acc, p| {
            let v = p.to_vector();
            acc + matcore::outer(&v, &v)
        })
    }
}

pub fn luders_channel(psis: &[BipartiteVector], phi_bc: &BipartiteVector) -> Result<LudersChannel> {
    let first = psis
        .first()
        .ok_or_else(|| Error::DimMismatch("a Lüders channel needs at least one vector".into()))?;
    for p in psis {
        if p.coeff().shape() != first.coeff().shape() {
            return Err(Error::DimMismatch("decomposition vectors differ in shape".into()));
        }
        check_link(p, phi_bc, "Lüders channel")?;
    }
    let mut residual: f64 = 0.0;
    for (i, p) in psis.iter().enumerate() {
        for (j, q) in psis.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            residual = residual.max((p.inner(q) - c64(target, 0.0)).norm());
        }
    }
    if residual > ORTHONORMAL_TOL {
        return Err(Error::NotOrthonormal { residual });
    }
    let s_cb = epr_maps(phi_bc).s_ba;
    let maps = psis
        .iter()
        .map(|p| compose_aa(&s_cb, &epr_maps(p).s_ba))
        .collect::<Result<Vec<_>>>()?;
    Ok(LudersChannel {
        maps,
        psis: psis.to_vec(),
        phi_bc: phi_bc.clone(),
        ancilla_norm_sq: phi_bc.norm_sq(),
    })
}

/// Orthonormal rank-one decomposition of a projection on `H_a ⊗ H_b`,
/// taken from its eigenvalue-one eigenspace (eigenvalues above 1/2).
pub fn decompose_projection(p: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<Vec<BipartiteVector>> {
    matcore::ensure_shape(p, dim_a * dim_b, dim_a * dim_b, "projection")?;
    let eig = matcore::hermitian_eigen(p)?;
    eig.values
        .iter()
        .enumerate()
        .take_while(|(_, &v)| v > 0.5)
        .map(|(k, _)| BipartiteVector::from_vector(&eig.vectors.column(k).into_owned(), dim_a, dim_b))
        .collect()
}

fn ensure_input_operator(ch: &LudersChannel, nu_a: &ComplexMatrix) -> Result<()> {
    matcore::ensure_shape(nu_a, ch.dim_a(), ch.dim_a(), "input operator")?;
    matcore::ensure_finite(nu_a)
}

/// `T(ν) = Σ_k t_k ν t_k†`.
pub fn luders_apply(ch: &LudersChannel, nu_a: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_input_operator(ch, nu_a)?;
    Ok(ch
        .maps
        .iter()
        .fold(ComplexMatrix::zeros(ch.dim_c(), ch.dim_c()), |acc, t| acc + t * nu_a * t.adjoint()))
}

/// `T(ν) = s_φ^{cb} (Σ_k s_k^{ba} ν s_k^{ab}) s_φ^{bc}` evaluated through the EPR maps.
pub fn luders_apply_factored(ch: &LudersChannel, nu_a: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_input_operator(ch, nu_a)?;
    let db = ch.phi_bc.dim_a();
    let mut inner = ComplexMatrix::zeros(db, db);
    for p in &ch.psis {
        let pair = epr_maps(p);
        let s_nu = crate::antilinear::compose_mixed(nu_a, &pair.s_ba, crate::antilinear::LinearSide::Before)?;
        inner += compose_aa(&s_nu, &pair.s_ab)?;
    }
    let phi = epr_maps(&ch.phi_bc);
    let left = crate::antilinear::compose_mixed(&inner, &phi.s_ba, crate::antilinear::LinearSide::Before)?;
    compose_aa(&left, &phi.s_ab)
}

/// `(P ⊗ 1^c)(φ^a ⊗ φ^{bc})` by dense projection, and the residual against
/// `Σ_k ψ_k ⊗ t_k φ^a`.
pub fn luders_projection_residual(ch: &LudersChannel, phi_a: &ComplexVector) -> Result<f64> {
    ensure_input(phi_a, ch.dim_a())?;
    let dims = [ch.dim_a(), ch.phi_bc.dim_a(), ch.dim_c()];
    let full = matcore::kron_vec(phi_a, &ch.phi_bc.to_vector());
    let dense = apply_on_factors(&full, &dims, 0, 2, &ch.projection());
    let factored = ch
        .psis
        .iter()
        .zip(&ch.maps)
        .fold(ComplexVector::zeros(full.len()), |acc, (p, t)| {
            acc + matcore::kron_vec(&p.to_vector(), &(t * phi_a))
        });
    Ok((dense - factored).norm())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LudersBounds {
    /// `|Σ_k t_k† t_k|_∞`.
    pub op_bound: f64,
    /// `sup { Tr T(ν) : ν ≥ 0, Tr ν = 1 }`.
    pub trace_bound: f64,
    /// `‖φ^{bc}‖²`, which bounds both of the above.
    pub ancilla_norm_sq: f64,
    /// `op_bound ≤ ‖φ^{bc}‖` (unsquared form), reported for comparison only.
    pub unsquared_form_holds: bool,
}

pub fn luders_bounds(ch: &LudersChannel) -> Result<LudersBounds> {
    let da = ch.dim_a();
    let effect = ch
        .maps
        .iter()
        .fold(ComplexMatrix::zeros(da, da), |acc, t| acc + t.adjoint() * t);
    let op_bound = matcore::norms(&effect)?.operator;
    // Tr T(ν) = Tr ν T*(1^c) and T*(1^c) = Σ t_k† t_k; the supremum over
    // unit-trace ν ≥ 0 is its top eigenvalue.
    let trace_bound = matcore::hermitian_eigen(&effect)?
        .values
        .first()
        .copied()
        .unwrap_or(0.0)
        .max(0.0);
    Ok(LudersBounds {
        op_bound,
        trace_bound,
        ancilla_norm_sq: ch.ancilla_norm_sq,
        unsquared_form_holds: op_bound <= ch.ancilla_norm_sq.sqrt() + 1e-12,
    })
}

fn chain_shape(stages: &[BipartiteVector]) -> Result<()> {
    if stages.len() % 2 == 1 {
        return Err(Error::OddParity { factors: stages.len() });
    }
    if stages.len() != 4 {
        return Err(Error::DimMismatch(format!(
            "a distributed chain takes exactly four stages (ψ^ab, φ^bc, ψ^cd, φ^de), got {}",
            stages.len()
        )));
    }
    for (k, w) in stages.windows(2).enumerate() {
        check_link(&w[0], &w[1], &format!("chain stage {k}"))?;
    }
    Ok(())
}

/// `t^{ea} = s^{ed} ∘ s^{dc} ∘ s^{cb} ∘ s^{ba}` for stages `[ψ^{ab}, φ^{bc}, ψ^{cd}, φ^{de}]`.
pub fn chain_teleport(stages: &[BipartiteVector]) -> Result<ComplexMatrix> {
    chain_shape(stages)?;
    let factors: Vec<Operator> = stages
        .iter()
        .rev()
        .map(|s| Operator::Antilinear(epr_maps(s).s_ba))
        .collect();
    match compose_chain(&factors)? {
        Operator::Linear(m) => Ok(m),
        Operator::Antilinear(_) => Err(Error::OddParity { factors: factors.len() }),
    }
}

/// Dense five-party computation of the chain output for input `φ^a`.
pub fn chain_oracle(phi_a: &ComplexVector, stages: &[BipartiteVector]) -> Result<ComplexVector> {
    chain_shape(stages)?;
    let (psi_ab, phi_bc, psi_cd, phi_de) = (&stages[0], &stages[1], &stages[2], &stages[3]);
    psi_ab.ensure_unit()?;
    psi_cd.ensure_unit()?;
    let dims = [psi_ab.dim_a(), psi_ab.dim_b(), psi_cd.dim_a(), psi_cd.dim_b(), phi_de.dim_b()];
    let total: usize = dims.iter().product();
    if total > DENSE_LIMIT {
        return Err(Error::DimTooLarge { dim: total, limit: DENSE_LIMIT });
    }
    ensure_input(phi_a, dims[0])?;
    let full = matcore::kron_vec(&matcore::kron_vec(phi_a, &phi_bc.to_vector()), &phi_de.to_vector());
    let v_ab = psi_ab.to_vector();
    let v_cd = psi_cd.to_vector();
    let once = apply_on_factors(&full, &dims, 0, 2, &matcore::outer(&v_ab, &v_ab));
    let twice = apply_on_factors(&once, &dims, 2, 2, &matcore::outer(&v_cd, &v_cd));
    factor_out_prefix(&twice, &matcore::kron_vec(&v_ab, &v_cd))
}
