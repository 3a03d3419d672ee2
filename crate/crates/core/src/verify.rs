//! Seeded property suites over random instances.
//!
//! Every identity is evaluated on `trials` independent instances per suite and
//! reduced to its worst residual. Trial `k` of suite `s` draws from stream
//! `(s << 32) | k` of the run seed, so the report is the same whether trials run
//! sequentially or on a thread pool.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::antilinear::{self, compose_aa, compose_mixed, AntilinearMap, LinearSide, Operator};
use crate::bipartite::{self, epr_maps, reduced, BipartiteVector};
use crate::error::Result;
use crate::matcore::{self, c64, ComplexMatrix, ComplexVector, Subsystem};
use crate::modular;
use crate::random::{self, rng_for, stream_id, TrialRng};
use crate::teleport;

/// Identities that are plain matrix algebra.
pub const TOL_ALGEBRAIC: f64 = 1e-10;
/// Identities that pass through square roots, polar phases or eigen-solves.
pub const TOL_SPECTRAL: f64 = 1e-9;
/// Random inputs per instance for the success-probability bound.
pub const BOUND_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Matcore,
    Antilinear,
    Epr,
    Polar,
    Cloning,
    Teleport,
    Luders,
    Chain,
    Modular,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Matcore,
        Suite::Antilinear,
        Suite::Epr,
        Suite::Polar,
        Suite::Cloning,
        Suite::Teleport,
        Suite::Luders,
        Suite::Chain,
        Suite::Modular,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Matcore => "matcore",
            Suite::Antilinear => "antilinear",
            Suite::Epr => "epr",
            Suite::Polar => "polar",
            Suite::Cloning => "cloning",
            Suite::Teleport => "teleport",
            Suite::Luders => "luders",
            Suite::Chain => "chain",
            Suite::Modular => "modular",
        }
    }

    fn index(self) -> u32 {
        Suite::ALL.iter().position(|&s| s == self).expect("listed") as u32
    }

    fn run_trial(self, rng: &mut TrialRng, dims: &[usize], out: &mut Sink) -> Result<()> {
        match self {
            Suite::Matcore => matcore_trial(rng, dims, out),
            Suite::Antilinear => antilinear_trial(rng, dims, out),
            Suite::Epr => epr_trial(rng, dims, out),
            Suite::Polar => polar_trial(rng, dims, out),
            Suite::Cloning => cloning_trial(rng, dims, out),
            Suite::Teleport => teleport_trial(rng, dims, out),
            Suite::Luders => luders_trial(rng, dims, out),
            Suite::Chain => chain_trial(rng, dims, out),
            Suite::Modular => modular_trial(rng, dims, out),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub trials: usize,
    /// Factor dimensions are drawn from this list.
    pub dims: Vec<usize>,
    /// Overrides every per-identity tolerance when set.
    pub tolerance: Option<f64>,
    pub parallel: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { seed: 42, trials: 100, dims: vec![2, 3, 4], tolerance: None, parallel: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResult {
    pub suite: &'static str,
    pub name: &'static str,
    pub tolerance: f64,
    pub max_residual: f64,
    pub worst_trial: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub trials: usize,
    pub dims: Vec<usize>,
    pub identities: Vec<IdentityResult>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &IdentityResult> {
        self.identities.iter().filter(|r| !r.passed)
    }
}

/// Residuals of one trial, in first-recorded order.
#[derive(Debug, Default)]
struct Sink(Vec<(&'static str, f64, f64)>);

fn worse(a: f64, b: f64) -> bool {
    b.is_nan() || (!a.is_nan() && b > a)
}

impl Sink {
    fn record(&mut self, name: &'static str, tolerance: f64, residual: f64) {
        match self.0.iter_mut().find(|e| e.0 == name) {
            Some(e) if worse(e.2, residual) => e.2 = residual,
            Some(_) => {}
            None => self.0.push((name, tolerance, residual)),
        }
    }
}

pub fn run_suite(suite: Suite, config: &VerifyConfig) -> Result<Vec<IdentityResult>> {
    let trial = |k: usize| -> Result<Sink> {
        let mut rng = rng_for(config.seed, stream_id(suite.index(), k as u32));
        let mut sink = Sink::default();
        suite.run_trial(&mut rng, &config.dims, &mut sink)?;
        Ok(sink)
    };
    let sinks: Vec<Sink> = if config.parallel {
        (0..config.trials).into_par_iter().map(trial).collect::<Result<_>>()?
    } else {
        (0..config.trials).map(trial).collect::<Result<_>>()?
    };
    let mut results: Vec<IdentityResult> = Vec::new();
    for (k, sink) in sinks.into_iter().enumerate() {
        for (name, tol, residual) in sink.0 {
            match results.iter_mut().find(|r| r.name == name) {
                Some(r) => {
                    if worse(r.max_residual, residual) {
                        r.max_residual = residual;
                        r.worst_trial = k;
                    }
                }
                None => results.push(IdentityResult {
                    suite: suite.name(),
                    name,
                    tolerance: config.tolerance.unwrap_or(tol),
                    max_residual: residual,
                    worst_trial: k,
                    passed: false,
                }),
            }
        }
    }
    for r in &mut results {
        r.passed = r.max_residual <= r.tolerance;
    }
    Ok(results)
}

pub fn run(config: &VerifyConfig) -> Result<VerifyReport> {
    let mut identities = Vec::new();
    for suite in Suite::ALL {
        identities.extend(run_suite(suite, config)?);
    }
    let passed = identities.iter().all(|r| r.passed);
    Ok(VerifyReport {
        seed: config.seed,
        trials: config.trials,
        dims: config.dims.clone(),
        identities,
        passed,
    })
}

fn pick(rng: &mut TrialRng, dims: &[usize]) -> usize {
    dims[rng.random_range(0..dims.len())]
}

fn basis(d: usize, i: usize) -> ComplexVector {
    ComplexVector::from_fn(d, |k, _| c64(if k == i { 1.0 } else { 0.0 }, 0.0))
}

fn random_map(rng: &mut TrialRng, rows: usize, cols: usize) -> AntilinearMap {
    AntilinearMap::new(random::ginibre(rng, rows, cols)).expect("finite")
}

/// Positive semidefinite `n x n` matrix of random rank.
fn psd_any_rank(rng: &mut TrialRng, n: usize) -> ComplexMatrix {
    let k = rng.random_range(1..=n);
    random::psd(rng, n, k)
}

fn abs_diff(a: num_complex::Complex64, b: num_complex::Complex64) -> f64 {
    (a - b).norm()
}

/// Both sides of `s = √ω^b j = j √ω^a` and of `j ω^a j* = ω^b`, with the
/// positive parts taken from the reductions rather than from the SVD.
fn polar_identities(psi: &BipartiteVector, out: &mut Sink) -> Result<()> {
    let s = epr_maps(psi).s_ba;
    let j = antilinear::polar(&s)?.phase;
    let omega_a = reduced(psi, Subsystem::A);
    let omega_b = reduced(psi, Subsystem::B);
    let left = compose_mixed(&matcore::psd_sqrt(&omega_b)?, &j, LinearSide::After)?;
    let right = compose_mixed(&matcore::psd_sqrt(&omega_a)?, &j, LinearSide::Before)?;
    out.record(
        "polar.reconstruction",
        TOL_SPECTRAL,
        matcore::max_abs_diff(left.mat(), s.mat()).max(matcore::max_abs_diff(right.mat(), s.mat())),
    );
    let conj_omega = compose_aa(&compose_mixed(&omega_a, &j, LinearSide::Before)?, &j.adjoint())?;
    out.record("polar.reduction_transfer", TOL_SPECTRAL, matcore::max_abs_diff(&conj_omega, &omega_b));
    let q_a = matcore::support_projection(&omega_a)?;
    let q_b = matcore::support_projection(&omega_b)?;
    out.record(
        "polar.support_projections",
        TOL_SPECTRAL,
        matcore::max_abs_diff(&compose_aa(&j.adjoint(), &j)?, &q_a)
            .max(matcore::max_abs_diff(&compose_aa(&j, &j.adjoint())?, &q_b)),
    );
    Ok(())
}

fn matcore_trial(rng: &mut TrialRng, dims: &[usize], out: &mut Sink) -> Result<()> {
    let (m, n) = (pick(rng, dims) * pick(rng, dims), pick(rng, dims) * pick(rng, dims));
    let a = random::ginibre(rng, m, n);
    let svd = matcore::svd(&a)?;
    out.record("matcore.svd_reconstruction", TOL_ALGEBRAIC, matcore::frobenius_diff(&svd.reconstruct(), &a));

    let h = psd_any_rank(rng, m);
    let root = matcore::psd_sqrt(&h)?;
    out.record("matcore.sqrt_square", TOL_SPECTRAL, matcore::frobenius_diff(&(&root * &root), &h));

    let rho = psd_any_rank(rng, m);
    let f1 = matcore::fidelity(&rho, &h)?;
    let f2 = matcore::fidelity(&h, &rho)?;
    out.record("matcore.fidelity_symmetry", TOL_ALGEBRAIC, (f1 - f2).abs());

    let (da, db) = (pick(rng, dims), pick(rng, dims));
    let dens = random::density(rng, da * db);
    let u = matcore::kron(&random::unitary(rng, da), &matcore::identity(db));
    let rotated = &u * &dens * u.adjoint();
    out.record(
        "matcore.partial_trace_invariance",
        TOL_ALGEBRAIC,
        matcore::max_abs_diff(
            &matcore::partial_trace(&rotated, da, db, Subsystem::B)?,
            &matcore::partial_trace(&dens, da, db, Subsystem::B)?,
        ),
    );
    Ok(())
}

fn antilinear_trial(rng: &mut TrialRng, dims: &[usize], out: &mut Sink) -> Result<()> {
    let (d1, d2, d3) = (pick(rng, dims), pick(rng, dims), pick(rng, dims));
    let t = random_map(rng, d2, d1);
    let x = random::unit_vector(rng, d1);
    let y = random::unit_vector(rng, d2);
    let lhs = matcore::inner(&y, &t.apply(&x)?);
    let rhs = matcore::inner(&x, &t.adjoint().apply(&y)?);
    out.record("antilinear.adjoint_pairing", TOL_ALGEBRAIC, abs_diff(lhs, rhs));

    let s = random_map(rng, d3, d2);
    let st = compose_aa(&s, &t)?;
    let pointwise = s.apply(&t.apply(&x)?)?;
    out.record("antilinear.compose_pointwise", TOL_ALGEBRAIC, matcore::vec_diff(&(&st * &x), &pointwise));
    out.record(
        "antilinear.compose_adjoint",
        TOL_ALGEBRAIC,
        matcore::max_abs_diff(&st.adjoint(), &compose_aa(&t.adjoint(), &s.adjoint())?),
    );

    let l = random::ginibre(rng, d2, d2);
    let k = random::ginibre(rng, d1, d1);
    let lt = compose_mixed(&l, &t, LinearSide::After)?;
    let tk = compose_mixed(&k, &t, LinearSide::Before)?;
    out.record(
        "antilinear.mixed_pointwise",
        TOL_ALGEBRAIC,
        matcore::vec_diff(&lt.apply(&x)?, &(&l * t.apply(&x)?))
            .max(matcore::vec_diff(&tk.apply(&x)?, &t.apply(&(&k * &x))?)),
    );

    let back = random_map(rng, d1, d2);
    let forward = matcore::trace(&compose_aa(&t, &back)?);
    let reverse = matcore::trace(&compose_aa(&back, &t)?);
    out.record("antilinear.trace_conjugation", TOL_ALGEBRAIC, abs_diff(forward, reverse.conj()));
    Ok(())
}

fn epr_trial(rng: &mut TrialRng, dims: &[usize], out: &mut Sink) -> Result<()> {
    let (da, db) = (pick(rng, dims), pick(rng, dims));
    let psi = random::state(rng, da, db);
    let pair = epr_maps(&psi);
    let v = psi.to_vector();
    let phi_a = random::unit_vector(rng, da);
    let phi_b = random::unit_vector(rng, db);

    let projected = bipartite::project_rank1(&psi, &phi_a)?.to_vector();
    let factored = matcore::kron_vec(&phi_a, &pair.s_ba.apply(&phi_a)?);
    let dense = matcore::kron(&matcore::outer(&phi_a, &phi_a), &matcore::identity(db)) * &v;
    out.record(
        "epr.rank1_projection",
        TOL_ALGEBRAIC,
        matcore::vec_diff(&projected, &dense).max(matcore::vec_diff(&factored, &dense)),
    );

    let direct = matcore::inner(&matcore::kron_vec(&phi_a, &phi_b), &v);
    let via_ba = matcore::inner(&phi_b, &pair.s_ba.apply(&phi_a)?);
    let via_ab = matcore::inner(&phi_a, &pair.s_ab.apply(&phi_b)?);
    out.record("epr.pairing", TOL_ALGEBRAIC, abs_diff(via_ba, direct).max(abs_diff(via_ab, direct)));

    let phi = random::state(rng, da, db);
    let entrywise = matcore::inner(&phi.to_vector(), &v);
    out.record(
        "epr.trace_inner_product",
        TOL_ALGEBRAIC,
        abs_diff(bipartite::inner_via_trace(&phi, &psi)?, entrywise)
            .max(abs_diff(bipartite::inner_via_trace_b(&phi, &psi)?, entrywise)),
    );

    let rebuilt = bipartite::reconstruct(&pair.s_ba, &matcore::identity(da))?;
    out.record("epr.reconstruct_identity", TOL_ALGEBRAIC, matcore::max_abs_diff(rebuilt.coeff(), psi.coeff()));
    let a = psd_any_rank(rng, da);
    let rebuilt = bipartite::reconstruct(&pair.s_ba, &a)?.to_vector();
    let dense = matcore::kron(&a, &matcore::identity(db)) * &v;
    out.record("epr.reconstruct_positive", TOL_SPECTRAL, matcore::vec_diff(&rebuilt, &dense));

    let projector = matcore::outer(&v, &v);
    out.record(
        "epr.reduced_vs_partial_trace",
        TOL_ALGEBRAIC,
        matcore::max_abs_diff(&reduced(&psi, Subsystem::A), &matcore::partial_trace(&projector, da, db, Subsystem::A)?)
            .max(matcore::max_abs_diff(
                &reduced(&psi, Subsystem::B),
                &matcore::partial_trace(&projector, da, db, Subsystem::B)?,
            )),
    );

    let a = random::ginibre(rng, da, da);
    let b = random::ginibre(rng, db, db);
    let moved = bipartite::local_transform(&psi, &a, &b)?;
    let dense = matcore::kron(&a, &b) * &v;
    let moved_pair = epr_maps(&moved);
    let ba = compose_mixed(&b, &compose_mixed(&a.adjoint(), &pair.s_ba, LinearSide::Before)?, LinearSide::After)?;
    let ab = compose_mixed(&a, &compose_mixed(&b.adjoint(), &pair.s_ab, LinearSide::Before)?, LinearSide::After)?;
    out.record(
        "epr.local_transform",
        TOL_ALGEBRAIC,
        matcore::vec_diff(&moved.to_vector(), &dense)
            .max(matcore::max_abs_diff(moved_pair.s_ba.mat(), ba.mat()))
            .max(matcore::max_abs_diff(moved_pair.s_ab.mat(), ab.mat())),
    );
    Ok(())
}

fn polar_trial(rng: &mut TrialRng, dims: &[usize], out: &mut Sink) -> Result<()> {
    let (da, db) = (pick(rng, dims), pick(rng, dims));
    let mut coeff = random::ginibre(rng, da, db);
    if rng.random_bool(0.5) {
        coeff.row_mut(rng.random_range(0..da)).fill(c64(0.0, 0.0));
    }
    let psi = BipartiteVector::new(coeff.unscale(coeff.norm()))?;
    polar_identities(&psi, out)?;

    // Partner operators on a completely entangled vector.
    let d = pick(rng, dims);
    let full = random::entangled_state(rng, d);
    let pol = bipartite::polar_ba(&full);
    let a = random::ginibre(rng, d, d);
    let b = bipartite::partner_operator(&a, &pol)?;
    let lhs = matcore::trace(&(reduced(&full, Subsystem::A) * &a));
    let rhs = matcore::trace(&(reduced(&full, Subsystem::B) * &b));
    out.record("partner.trace_transfer", TOL_ALGEBRAIC, abs_diff(lhs, rhs));
    let intertwine_l = compose_mixed(&b.adjoint(), &pol.phase, LinearSide::After)?;
    let intertwine_r = compose_mixed(&a, &pol.phase, LinearSide::Before)?;
    out.record(
        "partner.intertwining",
        TOL_SPECTRAL,
        matcore::max_abs_diff(intertwine_l.mat(), intertwine_r.mat()),
    );

    // Cross products of two vectors.
    let phi = random::state(rng, da, db);
    let other = random::state(rng, da, db);
    let cross = bipartite::cross_gram(&phi, &other)?;
    let rho = reduced(&phi, Subsystem::A);
    let omega = reduced(&other, Subsystem::A);
    let root = matcore::psd_sqrt(&rho)?;
    let fid_op = matcore::psd_sqrt(&(&root * &omega * &root))?;
    let mut expected = matcore::hermitian_eigen(&fid_op)?.values;
    let mut actual = matcore::singular_values(&cross)?;
    let n = expected.len().max(actual.len());
    expected.resize(n, 0.0);
    actual.resize(n, 0.0);
    let spectral = expected.iter().zip(&actual).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    out.record("cross.singular_values", TOL_SPECTRAL, spectral);
    let bop = random::ginibre(rng, db, db);
    let lhs = matcore::trace(&(&cross * &bop));
    let rhs = matcore::inner(
        &other.to_vector(),
        &(matcore::kron(&matcore::identity(da), &bop) * phi.to_vector()),
    );
    out.record("cross.trace_formula", TOL_ALGEBRAIC, abs_diff(lhs, rhs));

    // Purification from a random antilinear isometry.
    let (small, large) = (da.min(db), da.max(db));
    let omega_a = random::density(rng, small);
    let omega_a = if rng.random_bool(0.5) && small > 1 {
        let v = random::unitary(rng, small).columns(0, small - 1).into_owned();
        let p = &v * v.adjoint();
        let squeezed = &p * &omega_a * &p;
        let tr = squeezed.trace().re;
        squeezed.unscale(tr)
    } else {
        omega_a
    };
    let w = AntilinearMap::new(random::unitary(rng, large).columns(0, small).into_owned())?;
    let pure = bipartite::purification_from_isometry(&omega_a, &w)?;
    out.record(
        "purification.roundtrip",
        TOL_SPECTRAL,
        matcore::max_abs_diff(&reduced(&pure, Subsystem::A), &omega_a),
    );
    Ok(())
}

/// Two vectors `U D_k V` with diagonal `D_k`: both cross products are Hermitian.
fn cloning_trial(rng: &mut TrialRng, dims: &[usize], out: &mut Sink) -> Result<()> {
    let d = pick(rng, dims);
    let u = random::unitary(rng, d);
    let v = random::unitary(rng, d);
    let diag = |rng: &mut TrialRng| {
        let x: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        let n = x.iter().map(|y| y * y).sum::<f64>().sqrt();
        ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(d, x.iter().map(|y| c64(y / n, 0.0))))
    };
    let phi = BipartiteVector::new(&u * diag(rng) * &v)?;
    let psi = BipartiteVector::new(&u * diag(rng) * &v)?;
    let report = bipartite::cloning_check(&phi, &psi)?;
    let residual = if report.hermitian { report.commutator_norm } else { f64::INFINITY };
    out.record("cloning.commutator", TOL_SPECTRAL, residual);
    Ok(())
}

fn teleport_trial(rng: &mut TrialRng, dims: &[usize], out: &mut Sink) -> Result<()> {
    let (da, db, dc) = (pick(rng, dims), pick(rng, dims), pick(rng, dims));
    let psi = random::state(rng, da, db);
    let phi = random::state(rng, db, dc);
    let tm = teleport::teleport_map(&psi, &phi)?;
    let mut residual: f64 = 0.0;
    for i in 0..da {
        let e = basis(da, i);
        residual = residual.max(matcore::vec_diff(&tm.apply(&e)?, &teleport::teleport_oracle(&psi, &phi, &e)?));
    }
    let x = random::unit_vector(rng, da);
    residual = residual.max(matcore::vec_diff(&tm.apply(&x)?, &teleport::teleport_oracle(&psi, &phi, &x)?));
    out.record("teleport.factorization", TOL_ALGEBRAIC, residual);

    let bound = teleport::success_bound(&tm)?;
    let mut excess: f64 = 0.0;
    for _ in 0..BOUND_SAMPLES {
        let x = random::unit_vector(rng, da);
        excess = excess.max(tm.apply(&x)?.norm_squared() - bound);
    }
    out.record("teleport.bound_holds", 1e-12, excess.max(0.0));
    let svd = matcore::svd(&tm.t)?;
    let top = svd.v.column(0).into_owned();
    out.record("teleport.bound_attained", TOL_SPECTRAL, (tm.apply(&top)?.norm_squared() - bound).abs());

    let (trace_norm, fidelity) = teleport::trace_norm_fidelity(&tm)?;
    out.record("teleport.trace_norm_fidelity", TOL_SPECTRAL, (trace_norm - fidelity).abs());
    Ok(())
}

fn channel_from_columns(
    cols: &ComplexMatrix,
    da: usize,
    db: usize,
    phi: &BipartiteVector,
) -> Result<teleport::LudersChannel> {
    let psis = cols
        .column_iter()
        .map(|c| BipartiteVector::from_vector(&c.into_owned(), da, db))
        .collect::<Result<Vec<_>>>()?;
    teleport::luders_channel(&psis, phi)
}

fn luders_trial(rng: &mut TrialRng, dims: &[usize], out: &mut Sink) -> Result<()> {
    let (da, db, dc) = (pick(rng, dims), pick(rng, dims), pick(rng, dims));
    let n = da * db;
    let rank = rng.random_range(1..=n);
    let phi = random::state(rng, db, dc);
    let frame = random::unitary(rng, n).columns(0, rank).into_owned();
    let rotated = &frame * random::unitary(rng, rank);
    let ch1 = channel_from_columns(&frame, da, db, &phi)?;
    let ch2 = channel_from_columns(&rotated, da, db, &phi)?;
    let ch3 = teleport::luders_channel(&teleport::decompose_projection(&ch1.projection(), da, db)?, &phi)?;
    let nu = psd_any_rank(rng, da);

    out.record(
        "luders.projection",
        TOL_ALGEBRAIC,
        teleport::luders_projection_residual(&ch1, &random::unit_vector(rng, da))?,
    );
    let out1 = teleport::luders_apply(&ch1, &nu)?;
    out.record(
        "luders.factored_form",
        TOL_ALGEBRAIC,
        matcore::max_abs_diff(&out1, &teleport::luders_apply_factored(&ch1, &nu)?),
    );
    out.record(
        "luders.basis_independence",
        TOL_SPECTRAL,
        matcore::max_abs_diff(&out1, &teleport::luders_apply(&ch2, &nu)?)
            .max(matcore::max_abs_diff(&out1, &teleport::luders_apply(&ch3, &nu)?)),
    );

    let norm_sq = phi.norm_sq();
    let tr_nu = nu.trace().re;
    out.record("luders.trace_bound", TOL_SPECTRAL, (out1.trace().re - norm_sq * tr_nu).max(0.0));
    let bounds = teleport::luders_bounds(&ch1)?;
    out.record(
        "luders.operator_bound",
        TOL_SPECTRAL,
        (bounds.op_bound - norm_sq).max(0.0).max((bounds.trace_bound - norm_sq).max(0.0)),
    );
    let complete = channel_from_columns(&matcore::identity(n), da, db, &phi)?;
    out.record(
        "luders.complete_trace",
        TOL_SPECTRAL,
        (teleport::luders_apply(&complete, &nu)?.trace().re - norm_sq * tr_nu).abs(),
    );

    let single = channel_from_columns(&frame.columns(0, 1).into_owned(), da, db, &phi)?;
    let tm = teleport::teleport_map(&single.psis[0], &phi)?;
    out.record("luders.rank_one", TOL_ALGEBRAIC, matcore::max_abs_diff(&single.maps[0], &tm.t));
    Ok(())
}

fn chain_trial(rng: &mut TrialRng, dims: &[usize], out: &mut Sink) -> Result<()> {
    let d: Vec<usize> = (0..5).map(|_| pick(rng, dims)).collect();
    let stages = [
        random::state(rng, d[0], d[1]),
        random::state(rng, d[1], d[2]),
        random::state(rng, d[2], d[3]),
        random::state(rng, d[3], d[4]),
    ];
    let t = teleport::chain_teleport(&stages)?;
    let mut residual: f64 = 0.0;
    for i in 0..d[0] {
        let e = basis(d[0], i);
        residual = residual.max(matcore::vec_diff(&(&t * &e), &teleport::chain_oracle(&e, &stages)?));
    }
    out.record("chain.factorization", TOL_ALGEBRAIC, residual);
    Ok(())
}

fn random_operator(rng: &mut TrialRng, rows: usize, cols: usize, antilinear: bool) -> Operator {
    let m = random::ginibre(rng, rows, cols);
    if antilinear {
        Operator::Antilinear(AntilinearMap::new(m).expect("finite"))
    } else {
        Operator::Linear(m)
    }
}

fn modular_trial(rng: &mut TrialRng, dims: &[usize], out: &mut Sink) -> Result<()> {
    let (da, db) = (pick(rng, dims), pick(rng, dims));
    let parity = rng.random_bool(0.5);
    let eta = random_operator(rng, da, db, parity);
    let xi = random_operator(rng, db, da, parity);
    let p1 = modular::twisted_product(&eta, &xi)?;
    let u = random::unit_vector(rng, da);
    let w = random::unit_vector(rng, db);
    let expected = matcore::kron_vec(&eta.apply(&w)?, &xi.apply(&u)?);
    out.record(
        "twisted.product_action",
        TOL_ALGEBRAIC,
        matcore::vec_diff(&p1.operator().apply(&matcore::kron_vec(&u, &w))?, &expected),
    );
    out.record(
        "twisted.adjoint",
        TOL_ALGEBRAIC,
        matcore::max_abs_diff(p1.adjoint().mat(), p1.adjoint_from_factors().mat()),
    );
    let p2 = modular::twisted_product(
        &random_operator(rng, da, db, parity),
        &random_operator(rng, db, da, parity),
    )?;
    out.record(
        "twisted.composition",
        TOL_ALGEBRAIC,
        matcore::max_abs_diff(
            &modular::twisted_compose(&p1, &p2)?,
            p1.operator().compose(p2.operator())?.mat(),
        ),
    );

    let phi = random::state(rng, da, db);
    let psi = random::state(rng, da, db);
    let lift = modular::lift_residuals(&phi, &psi)?;
    out.record("lift.delta_product", TOL_SPECTRAL, lift.delta_product);
    out.record("lift.j_product", TOL_SPECTRAL, lift.j_product);
    out.record("lift.delta_polar", TOL_SPECTRAL, lift.delta_polar);
    out.record("lift.s_polar", TOL_SPECTRAL, lift.s_polar);
    out.record("lift.f_polar", TOL_SPECTRAL, lift.f_polar);
    out.record("lift.adjoint_exchange", TOL_SPECTRAL, lift.adjoint_exchange);

    let d = pick(rng, dims);
    let psi = random::entangled_state(rng, d);
    let phi = random::state(rng, d, d);
    let tt = modular::tomita_residuals(&phi, &psi)?;
    out.record("tomita.defining_relation", TOL_SPECTRAL, tt.defining_relation);
    out.record("tomita.polar_reconstruction", TOL_SPECTRAL, tt.polar_reconstruction);
    out.record("tomita.delta_positive", TOL_SPECTRAL, tt.delta_negativity);
    out.record("tomita.j_twisted", TOL_SPECTRAL, tt.j_twisted);
    out.record("tomita.intertwiner", TOL_SPECTRAL, tt.intertwiner);

    let own = modular::tomita_S(&psi, &psi)?;
    let v = psi.to_vector();
    out.record(
        "tomita.fixed_vector",
        TOL_ALGEBRAIC,
        matcore::vec_diff(&own.s.apply(&v)?, &v).max(matcore::vec_diff(&own.j.apply(&v)?, &v)),
    );
    Ok(())
}
