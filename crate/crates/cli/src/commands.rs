use std::path::Path;

use eprmap::antilinear::AntilinearMapFile;
use eprmap::io::{self, BipartiteFile, ChainFile, ChannelFile, FormatError, MatrixFile};
use eprmap::matcore::{self, c64, ComplexMatrix, ComplexVector, Subsystem};
use eprmap::random::{self, rng_for};
use eprmap::verify::{self, VerifyConfig, TOL_ALGEBRAIC, TOL_SPECTRAL};
use eprmap::{bipartite, modular, teleport, BipartiteVector};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::args::{Cli, Command};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<eprmap::Error> for CliError {
    fn from(e: eprmap::Error) -> Self {
        match e {
            eprmap::Error::FactorizationFailure { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

/// A residual and the tolerance it is held to.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub command: &'static str,
    pub body: Map<String, Value>,
    pub checks: Vec<Check>,
}

impl Outcome {
    fn new(command: &'static str) -> Self {
        Self { command, body: Map::new(), checks: Vec::new() }
    }

    fn put(&mut self, key: &str, value: Value) {
        self.body.insert(key.to_string(), value);
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed()).collect()
    }

    /// The full JSON report; residuals are listed only when there are any.
    pub fn report(&self) -> Value {
        let mut body = self.body.clone();
        if !self.checks.is_empty() {
            let residuals: Map<String, Value> =
                self.checks.iter().map(|c| (c.name.clone(), json!(c.residual))).collect();
            body.insert("residuals".into(), Value::Object(residuals));
            body.insert("passed".into(), json!(self.failures().is_empty()));
        }
        Value::Object(body)
    }
}

struct Checker {
    override_tol: Option<f64>,
    checks: Vec<Check>,
}

impl Checker {
    fn new(override_tol: Option<f64>) -> Self {
        Self { override_tol, checks: Vec::new() }
    }

    fn add(&mut self, name: &str, default_tol: f64, residual: f64) {
        self.checks.push(Check {
            name: name.to_string(),
            residual,
            tolerance: self.override_tol.unwrap_or(default_tol),
        });
    }
}

pub fn validate(cli: &Cli) -> Result<(), CliError> {
    if let Some(t) = cli.tolerance {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::Input(format!("--tolerance must be positive, got {t}")));
        }
    }
    if cli.trials == 0 {
        return Err(CliError::Input("--trials must be at least 1".into()));
    }
    if let Some(dims) = &cli.dims {
        if dims.is_empty() || dims.contains(&0) {
            return Err(CliError::Input(format!("--dims must be positive, got {dims:?}")));
        }
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    validate(cli)?;
    match &cli.command {
        Command::Epr { state } => cmd_epr(cli, state),
        Command::Teleport { psi, phi, channel } => {
            let (psi, phi) = match (psi, phi, channel) {
                (_, _, Some(c)) => {
                    let f: ChannelFile = io::read_json(c)?;
                    (BipartiteVector::try_from(f.psi_ab)?, BipartiteVector::try_from(f.phi_bc)?)
                }
                (Some(p), Some(q), None) => (io::read_bipartite(p)?, io::read_bipartite(q)?),
                _ => return Err(CliError::Input("teleport needs PSI and PHI files or --channel".into())),
            };
            cmd_teleport(cli, &psi, &phi)
        }
        Command::Luders { phi, psis, projection, nu } => cmd_luders(cli, phi, psis, projection.as_deref(), nu.as_deref()),
        Command::Chain { file } => cmd_chain(cli, file),
        Command::Modular { phi, psi } => cmd_modular(cli, phi, psi),
        Command::Verify { parallel } => cmd_verify(cli, *parallel),
        Command::Random { entangled } => cmd_random(cli, *entangled),
    }
}

fn mat(m: &ComplexMatrix) -> Value {
    serde_json::to_value(MatrixFile::from(m)).expect("matrices serialize")
}

fn anti(t: &eprmap::AntilinearMap) -> Value {
    serde_json::to_value(AntilinearMapFile::from(t)).expect("maps serialize")
}

fn basis(d: usize, i: usize) -> ComplexVector {
    ComplexVector::from_fn(d, |k, _| c64(if k == i { 1.0 } else { 0.0 }, 0.0))
}

fn cmd_epr(cli: &Cli, path: &Path) -> Result<Outcome, CliError> {
    let psi = io::read_bipartite(path)?;
    let (da, db) = (psi.dim_a(), psi.dim_b());
    let pair = bipartite::epr_maps(&psi);
    let omega_a = bipartite::reduced(&psi, Subsystem::A);
    let omega_b = bipartite::reduced(&psi, Subsystem::B);
    let mut rng = rng_for(cli.seed, 0);
    let x = random::unit_vector(&mut rng, da);
    let y = random::unit_vector(&mut rng, db);
    let other = random::state(&mut rng, da, db);
    let v = psi.to_vector();
    let mut ck = Checker::new(cli.tolerance);

    let projected = bipartite::project_rank1(&psi, &x)?.to_vector();
    let factored = matcore::kron_vec(&x, &pair.s_ba.apply(&x)?);
    ck.add("rank1_projection", TOL_ALGEBRAIC, matcore::vec_diff(&projected, &factored));

    let direct = matcore::inner(&matcore::kron_vec(&x, &y), &v);
    let via_ba = matcore::inner(&y, &pair.s_ba.apply(&x)?);
    let via_ab = matcore::inner(&x, &pair.s_ab.apply(&y)?);
    ck.add("pairing", TOL_ALGEBRAIC, (via_ba - direct).norm().max((via_ab - direct).norm()));

    let mut trace_inner: f64 = 0.0;
    for phi in [&psi, &other] {
        let entrywise = matcore::inner(&phi.to_vector(), &v);
        trace_inner = trace_inner
            .max((bipartite::inner_via_trace(phi, &psi)? - entrywise).norm())
            .max((bipartite::inner_via_trace_b(phi, &psi)? - entrywise).norm());
    }
    ck.add("trace_inner_product", TOL_ALGEBRAIC, trace_inner);

    let rebuilt = bipartite::reconstruct(&pair.s_ba, &matcore::identity(da))?;
    ck.add("reconstruct_identity", TOL_ALGEBRAIC, matcore::max_abs_diff(rebuilt.coeff(), psi.coeff()));

    let projector = matcore::outer(&v, &v);
    let pt_a = matcore::partial_trace(&projector, da, db, Subsystem::A)?;
    let pt_b = matcore::partial_trace(&projector, da, db, Subsystem::B)?;
    ck.add(
        "reduced_vs_partial_trace",
        TOL_ALGEBRAIC,
        matcore::max_abs_diff(&omega_a, &pt_a).max(matcore::max_abs_diff(&omega_b, &pt_b)),
    );

    let mut out = Outcome::new("epr");
    out.put("s_ba", anti(&pair.s_ba));
    out.put("s_ab", anti(&pair.s_ab));
    out.put("omega_a", mat(&omega_a));
    out.put("omega_b", mat(&omega_b));
    out.put("norm_sq", json!(psi.norm_sq()));
    out.checks = ck.checks;
    Ok(out)
}

fn cmd_teleport(cli: &Cli, psi: &BipartiteVector, phi: &BipartiteVector) -> Result<Outcome, CliError> {
    let tm = teleport::teleport_map(psi, phi)?;
    let bound = teleport::success_bound(&tm)?;
    let (trace_norm, fidelity) = teleport::trace_norm_fidelity(&tm)?;
    let mut oracle: f64 = 0.0;
    for i in 0..psi.dim_a() {
        let e = basis(psi.dim_a(), i);
        oracle = oracle.max(matcore::vec_diff(&tm.apply(&e)?, &teleport::teleport_oracle(psi, phi, &e)?));
    }
    let top = matcore::svd(&tm.t)?.v.column(0).into_owned();
    let attained = tm.apply(&top)?.norm_squared();

    let mut ck = Checker::new(cli.tolerance);
    ck.add("oracle", TOL_ALGEBRAIC, oracle);
    ck.add("trace_norm_fidelity", TOL_SPECTRAL, (trace_norm - fidelity).abs());
    ck.add("bound_attained", TOL_SPECTRAL, (attained - bound).abs());

    let mut out = Outcome::new("teleport");
    out.put("t", mat(&tm.t));
    out.put("trace_norm", json!(trace_norm));
    out.put("fidelity", json!(fidelity));
    out.put("op_bound", json!(bound));
    out.put("oracle_residual", json!(oracle));
    out.checks = ck.checks;
    Ok(out)
}

fn cmd_luders(
    cli: &Cli,
    phi_path: &Path,
    psi_paths: &[std::path::PathBuf],
    projection: Option<&Path>,
    nu_path: Option<&Path>,
) -> Result<Outcome, CliError> {
    let phi = io::read_bipartite(phi_path)?;
    let psis = match projection {
        Some(p) => {
            let dims = cli.dims.as_deref().unwrap_or_default();
            let [da, db] = dims else {
                return Err(CliError::Input("--projection needs --dims A,B".into()));
            };
            teleport::decompose_projection(&io::read_matrix(p)?, *da, *db)?
        }
        None => psi_paths.iter().map(|p| io::read_bipartite(p)).collect::<Result<Vec<_>, _>>()?,
    };
    if psis.is_empty() {
        return Err(CliError::Input("the projection is zero".into()));
    }
    let ch = teleport::luders_channel(&psis, &phi)?;
    let da = ch.dim_a();
    let nu = match nu_path {
        Some(p) => io::read_matrix(p)?,
        None => matcore::identity(da).unscale(da as f64),
    };
    let output = teleport::luders_apply(&ch, &nu)?;
    let bounds = teleport::luders_bounds(&ch)?;
    let mut rng = rng_for(cli.seed, 0);
    let x = random::unit_vector(&mut rng, da);

    let mut ck = Checker::new(cli.tolerance);
    ck.add("projection", TOL_ALGEBRAIC, teleport::luders_projection_residual(&ch, &x)?);
    ck.add(
        "factored_form",
        TOL_ALGEBRAIC,
        matcore::max_abs_diff(&output, &teleport::luders_apply_factored(&ch, &nu)?),
    );
    ck.add("operator_bound", TOL_SPECTRAL, (bounds.op_bound - ch.ancilla_norm_sq).max(0.0));
    if matcore::psd_eigen(&nu).is_ok() {
        let excess = output.trace().re - ch.ancilla_norm_sq * nu.trace().re;
        ck.add("trace_bound", TOL_SPECTRAL, excess.max(0.0));
    }

    let mut out = Outcome::new("luders");
    out.put("rank", json!(ch.rank()));
    out.put("maps", Value::Array(ch.maps.iter().map(mat).collect()));
    out.put("output", mat(&output));
    out.put("op_bound", json!(bounds.op_bound));
    out.put("trace_bound", json!(bounds.trace_bound));
    out.put("ancilla_norm_sq", json!(bounds.ancilla_norm_sq));
    out.put("unsquared_form_holds", json!(bounds.unsquared_form_holds));
    out.checks = ck.checks;
    Ok(out)
}

fn cmd_chain(cli: &Cli, path: &Path) -> Result<Outcome, CliError> {
    let file: ChainFile = io::read_json(path)?;
    let stages = file
        .stages
        .into_iter()
        .map(BipartiteVector::try_from)
        .collect::<Result<Vec<_>, _>>()?;
    let t = teleport::chain_teleport(&stages)?;
    let mut oracle: f64 = 0.0;
    for i in 0..t.ncols() {
        let e = basis(t.ncols(), i);
        oracle = oracle.max(matcore::vec_diff(&(&t * &e), &teleport::chain_oracle(&e, &stages)?));
    }
    let mut ck = Checker::new(cli.tolerance);
    ck.add("oracle", TOL_ALGEBRAIC, oracle);
    let mut out = Outcome::new("chain");
    out.put("t", mat(&t));
    out.put("oracle_residual", json!(oracle));
    out.checks = ck.checks;
    Ok(out)
}

fn cmd_modular(cli: &Cli, phi_path: &Path, psi_path: &Path) -> Result<Outcome, CliError> {
    let phi = io::read_bipartite(phi_path)?;
    let psi = io::read_bipartite(psi_path)?;
    let triple = modular::tomita_S(&phi, &psi)?;
    let tt = modular::tomita_residuals(&phi, &psi)?;
    let lift = modular::lift_residuals(&phi, &psi)?;
    let mut ck = Checker::new(cli.tolerance);
    ck.add("defining_relation", TOL_SPECTRAL, tt.defining_relation);
    ck.add("polar_reconstruction", TOL_SPECTRAL, tt.polar_reconstruction);
    ck.add("delta_positive", TOL_SPECTRAL, tt.delta_negativity);
    ck.add("j_twisted", TOL_SPECTRAL, tt.j_twisted);
    ck.add("intertwiner", TOL_SPECTRAL, tt.intertwiner);
    ck.add("lift_delta_product", TOL_SPECTRAL, lift.delta_product);
    ck.add("lift_j_product", TOL_SPECTRAL, lift.j_product);
    ck.add("lift_delta_polar", TOL_SPECTRAL, lift.delta_polar);
    ck.add("lift_s_polar", TOL_SPECTRAL, lift.s_polar);
    ck.add("lift_f_polar", TOL_SPECTRAL, lift.f_polar);
    ck.add("lift_adjoint_exchange", TOL_SPECTRAL, lift.adjoint_exchange);
    let mut out = Outcome::new("modular");
    out.put("S", anti(&triple.s));
    out.put("Delta", mat(&triple.delta));
    out.put("J", anti(&triple.j));
    out.checks = ck.checks;
    Ok(out)
}

fn cmd_verify(cli: &Cli, parallel: bool) -> Result<Outcome, CliError> {
    let defaults = VerifyConfig::default();
    let config = VerifyConfig {
        seed: cli.seed,
        trials: cli.trials,
        dims: cli.dims.clone().unwrap_or(defaults.dims),
        tolerance: cli.tolerance,
        parallel,
    };
    let report = verify::run(&config)?;
    let mut out = Outcome::new("verify");
    let Value::Object(body) = serde_json::to_value(&report).expect("report serializes") else {
        unreachable!("a struct serializes to an object")
    };
    out.body = body;
    out.checks = report
        .identities
        .iter()
        .map(|r| Check { name: r.name.to_string(), residual: r.max_residual, tolerance: r.tolerance })
        .collect();
    Ok(out)
}

fn cmd_random(cli: &Cli, entangled: bool) -> Result<Outcome, CliError> {
    let dims = cli.dims.clone().unwrap_or_else(|| vec![2, 2]);
    let [da, db] = dims[..] else {
        return Err(CliError::Input(format!("random needs --dims A,B, got {dims:?}")));
    };
    if entangled && da != db {
        return Err(CliError::Input(format!(
            "a {da}x{db} vector cannot have two full-rank reductions"
        )));
    }
    let psi = random::random_state(da, db, cli.seed, entangled);
    let mut out = Outcome::new("random");
    let Value::Object(body) = serde_json::to_value(BipartiteFile::from(&psi)).expect("state serializes") else {
        unreachable!("a struct serializes to an object")
    };
    out.body = body;
    Ok(out)
}
