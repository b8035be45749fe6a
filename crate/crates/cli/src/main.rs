//! `qhe`: key generation, encryption, evaluation, decryption, audits and
//! bound sweeps from the command line.

mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qhe_core::Backend;

use crate::output::Format;

#[derive(Parser)]
#[command(name = "qhe", version, about = "Permutation-keyed quantum homomorphic encryption")]
struct Cli {
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BackendArg {
    Oracle,
    Pauli,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Oracle => Backend::Oracle,
            BackendArg::Pauli => Backend::Pauli,
        }
    }
}

#[derive(Args, Clone)]
pub struct ParamsArg {
    /// Inline `b,r,t,n,m` or a JSON file with those fields.
    #[arg(long)]
    params: String,
}

#[derive(Args, Clone)]
pub struct CircuitArg {
    /// Circuit file, one gate per line.
    #[arg(long, conflicts_with = "gates")]
    circuit: Option<PathBuf>,
    /// Inline circuit; `;` separates gates.
    #[arg(long)]
    gates: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a column permutation and write the key file.
    Keygen {
        #[command(flatten)]
        params: ParamsArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Encrypt a preset plaintext.
    Encrypt {
        #[command(flatten)]
        params: ParamsArg,
        #[arg(long)]
        key: PathBuf,
        /// zero, one, plus, ghz, magic or random:<seed>
        #[arg(long, default_value = "zero")]
        state: String,
        #[arg(long, value_enum, default_value = "pauli")]
        backend: BackendArg,
        /// Sample this many ancilla assignments instead of enumerating them (oracle only).
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a circuit on a ciphertext without the key.
    Evaluate {
        #[command(flatten)]
        circuit: CircuitArg,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decrypt a ciphertext.
    Decrypt {
        #[arg(long)]
        key: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        /// Sample one measurement record with this seed instead of enumerating.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encrypt, evaluate and decrypt, and compare with the plaintext circuit.
    Roundtrip {
        #[command(flatten)]
        params: ParamsArg,
        #[command(flatten)]
        circuit: CircuitArg,
        #[arg(long, default_value = "zero")]
        state: String,
        #[arg(long, value_enum, default_value = "pauli")]
        backend: BackendArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact permutation-averaged security distance against the bounds.
    AuditSecurity {
        /// Inline `b,r,t,n,m`; the grid uses p = b(r+t).
        #[arg(long, conflicts_with = "shape")]
        params: Option<String>,
        /// Inline `p,n,m` for any n >= 1.
        #[arg(long)]
        shape: Option<String>,
        /// Comma-separated pair of presets, e.g. `zero,one`.
        #[arg(long)]
        inputs: Option<String>,
        /// Random pure pairs added to the default inputs.
        #[arg(long, default_value_t = 2)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Failure probability, tail bounds and copy count for one (b, t).
    AuditReliability {
        #[arg(long)]
        b: usize,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        /// Monte Carlo trials; 0 skips sampling.
        #[arg(long, default_value_t = 0)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sweep the closed-form calculators over a grid.
    Bounds {
        /// Comma-separated t values.
        #[arg(long, default_value = "1,2,3,4")]
        t: String,
        /// Range `lo..hi` (inclusive) or comma-separated b values.
        #[arg(long, default_value = "1..30")]
        b: String,
    },
    /// End-to-end run over a loopback server.
    Demo {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the evaluation server.
    Serve {
        #[arg(long, default_value = "127.0.0.1:7878")]
        listen: String,
        /// Only accept ciphertexts of this backend.
        #[arg(long, value_enum)]
        backend: Option<BackendArg>,
        #[arg(long, default_value_t = qhe_net::DEFAULT_MAX_PAYLOAD)]
        max_payload: usize,
    },
    /// Encrypt locally, evaluate on a server, decrypt locally.
    Delegate {
        #[arg(long)]
        server: String,
        #[command(flatten)]
        params: ParamsArg,
        #[command(flatten)]
        circuit: CircuitArg,
        /// Key file; a fresh key from --seed is used when absent.
        #[arg(long)]
        key: Option<PathBuf>,
        #[arg(long, default_value = "zero")]
        state: String,
        #[arg(long, value_enum, default_value = "pauli")]
        backend: BackendArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    let result = match cli.command {
        Command::Keygen { params, seed, out } => commands::keygen(&params, seed, &out),
        Command::Encrypt {
            params,
            key,
            state,
            backend,
            samples,
            seed,
            out,
        } => commands::encrypt(&params, &key, &state, backend.into(), samples, seed, &out),
        Command::Evaluate { circuit, input, out } => commands::evaluate(&circuit, &input, &out),
        Command::Decrypt { key, input, seed, out } => commands::decrypt(&key, &input, seed, out.as_deref()),
        Command::Roundtrip {
            params,
            circuit,
            state,
            backend,
            seed,
        } => commands::roundtrip(&params, &circuit, &state, backend.into(), seed),
        Command::AuditSecurity {
            params,
            shape,
            inputs,
            pairs,
            seed,
        } => commands::audit_security(params.as_deref(), shape.as_deref(), inputs.as_deref(), pairs, seed),
        Command::AuditReliability {
            b,
            t,
            delta,
            trials,
            seed,
        } => commands::audit_reliability(b, t, delta, trials, seed),
        Command::Bounds { t, b } => commands::bounds(&t, &b, format),
        Command::Demo { seed } => commands::demo(seed),
        Command::Serve {
            listen,
            backend,
            max_payload,
        } => commands::serve(&listen, backend.map(Into::into), max_payload),
        Command::Delegate {
            server,
            params,
            circuit,
            key,
            state,
            backend,
            seed,
        } => commands::delegate(&server, &params, &circuit, key.as_deref(), &state, backend.into(), seed),
    };
    match result {
        Ok(commands::Outcome::Report(v)) => {
            print!("{}", output::render(&v, format));
            ExitCode::SUCCESS
        }
        Ok(commands::Outcome::Text(s)) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Ok(commands::Outcome::Failed(v, msg)) => {
            print!("{}", output::render(&v, format));
            eprintln!("error: {msg}");
            ExitCode::from(4)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
