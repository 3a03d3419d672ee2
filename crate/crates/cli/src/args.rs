use std::path::PathBuf;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "eprmap", version, about = "EPR maps, teleportation channels and modular operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Residual tolerance; when absent each residual uses its own default
    /// (1e-10 for algebraic identities, 1e-9 for spectral ones).
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,

    /// Random instances per verification suite.
    #[arg(long, global = true, default_value_t = 100)]
    pub trials: usize,

    /// Dimensions, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,

    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// EPR maps, reductions and their identities for one bipartite vector.
    Epr { state: PathBuf },
    /// Teleportation map of a measured vector and an ancilla.
    Teleport {
        /// Measured vector ψ^{ab}.
        psi: Option<PathBuf>,
        /// Ancilla φ^{bc}.
        phi: Option<PathBuf>,
        /// Channel file holding both vectors.
        #[arg(long, conflicts_with_all = ["psi", "phi"])]
        channel: Option<PathBuf>,
    },
    /// Teleportation triggered by a projection of arbitrary rank.
    Luders {
        /// Ancilla φ^{bc}.
        #[arg(long)]
        phi: PathBuf,
        /// Orthonormal vectors spanning the projection.
        #[arg(long = "psi", required_unless_present = "projection")]
        psis: Vec<PathBuf>,
        /// Projection matrix on the ab-system; split by eigendecomposition. Needs --dims A,B.
        #[arg(long, conflicts_with = "psis")]
        projection: Option<PathBuf>,
        /// Input operator ν^a (defaults to the normalized identity).
        #[arg(long)]
        nu: Option<PathBuf>,
    },
    /// Four-stage distributed teleportation.
    Chain { file: PathBuf },
    /// Tomita operators S, Δ, J of a pair (φ, ψ); ψ must be completely entangled.
    Modular { phi: PathBuf, psi: PathBuf },
    /// Run every property suite on seeded random instances.
    Verify {
        /// Spread trials over a thread pool; the report does not change.
        #[arg(long)]
        parallel: bool,
    },
    /// Print a seeded random unit bipartite vector.
    Random {
        /// Reject until both reductions have full rank (needs equal dims).
        #[arg(long)]
        entangled: bool,
    },
}
