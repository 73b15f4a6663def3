use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use telesistor::compiler::{
    compile, emit_netlist, load_netlist, parse_circuit_bytes, verify_netlist, CircuitIR, LadderKind, SizePolicy,
    VerifyOptions,
};
use telesistor::network::{run_netlist, CorrectionMode, RunInputs, RunOptions};
use telesistor::phase::{phase_lab, FidelityMode, PerturbationFamily, PhaseModel};
use telesistor::register::Backend;
use telesistor::OutcomePolicy;

const GRAMMAR: &str = "\
circuit grammar:
  circuit := header { line }
  header  := 'qubits' N            (first non-blank line, 1 <= N <= 1024)
  line    := gate q [ q ]          (one gate per line, whitespace separated)
  gate    := H | S | Sdg | T | Tdg | X | Y | Z   (one qubit)
           | CZ | CX                             (two distinct qubits, control first)
  '#' starts a comment; blank lines are ignored; qubits are 0-based";

#[derive(Parser)]
#[command(name = "telesistor", version, about = "Compile and simulate measurement-driven gate-block networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a circuit file into a netlist.
    Compile {
        circuit: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[command(flatten)]
        size: SizeArgs,
    },
    /// Execute a netlist and print outcomes and the logical output state.
    Run {
        netlist: PathBuf,
        /// Input bits for the logical qubits (qubit 0 first) or `plus`.
        #[arg(long)]
        inputs: String,
        /// Sampling seed, ignored when `--outcomes` is given.
        #[arg(long, env = "TELESISTOR_SEED")]
        seed: Option<u64>,
        /// Forced outcome bits, one per random measurement event.
        #[arg(long)]
        outcomes: Option<String>,
        #[arg(long, value_enum, default_value_t = BackendArg::Oracle)]
        backend: BackendArg,
        #[arg(long, value_enum, default_value_t = ModeArg::OnSite)]
        mode: ModeArg,
    },
    /// Compile a circuit, run it on random inputs and compare with direct simulation.
    Verify {
        circuit: PathBuf,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Forced-outcome branches per trial, on top of one sampled run.
        #[arg(long, default_value_t = 16)]
        branches: usize,
        #[arg(long, env = "TELESISTOR_SEED", default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        size: SizeArgs,
    },
    /// Ebit fidelity and string order of a perturbed chain over a coupling grid.
    PhaseLab {
        /// `start:end:points`, evenly spaced and inclusive.
        #[arg(long, value_parser = parse_grid)]
        lambda_grid: Grid,
        #[arg(long, default_value_t = 10)]
        length: usize,
        #[arg(long, default_value_t = 2)]
        junk_dim: usize,
        #[arg(long, env = "TELESISTOR_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = FamilyArg::Generic)]
        family: FamilyArg,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(clap::Args)]
struct SizeArgs {
    #[arg(long, value_enum, default_value_t = LadderArg::Honeycomb)]
    ladder: LadderArg,
    #[arg(long, default_value_t = 2)]
    ladder_width: usize,
    /// Block size multiplier.
    #[arg(long, default_value_t = 1)]
    scale: usize,
}

impl SizeArgs {
    fn policy(&self) -> SizePolicy {
        let ladder = match self.ladder {
            LadderArg::Honeycomb => LadderKind::Honeycomb,
            LadderArg::Square => LadderKind::Square,
        };
        SizePolicy { ladder, ladder_width: self.ladder_width, scale: self.scale }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LadderArg {
    Honeycomb,
    Square,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Tableau,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    OnSite,
    EndPropagated,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Generic,
    GaugeOnly,
    JunkOnly,
}

#[derive(Clone, Debug)]
struct Grid(Vec<f64>);

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err("expected start:end:points".into());
    };
    let a: f64 = a.parse().map_err(|_| format!("bad grid start '{a}'"))?;
    let b: f64 = b.parse().map_err(|_| format!("bad grid end '{b}'"))?;
    let n: usize = n.parse().map_err(|_| format!("bad point count '{n}'"))?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err("grid needs finite bounds and at least one point".into());
    }
    if n == 1 {
        return Ok(Grid(vec![a]));
    }
    Ok(Grid((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()))
}

enum Failure {
    Usage(String),
    Circuit(String),
    Verification(String),
}

impl From<telesistor::Error> for Failure {
    fn from(e: telesistor::Error) -> Self {
        match e {
            telesistor::Error::Parse(p) => Failure::Circuit(p.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_circuit(path: &Path) -> Result<CircuitIR, Failure> {
    parse_circuit_bytes(&read(path)?).map_err(|e| Failure::Circuit(format!("{}: {e}", path.display())))
}

fn parse_inputs(s: &str) -> Result<RunInputs, Failure> {
    if s == "plus" {
        return Ok(RunInputs::Plus);
    }
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Failure::Usage(format!("inputs must be a bitstring or 'plus', got '{s}'"))),
        })
        .collect::<Result<Vec<_>, _>>()
        .map(RunInputs::Bits)
}

fn bits(b: &[bool]) -> String {
    b.iter().map(|&x| if x { '1' } else { '0' }).collect()
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Compile { circuit, out, size } => {
            let ir = load_circuit(&circuit)?;
            let net = compile(&ir, &size.policy())?;
            write(&out, &emit_netlist(&net)?)?;
            println!("{} blocks, {} random events", net.block_count(), net.random_event_count());
        }
        Command::Run { netlist, inputs, seed, outcomes, backend, mode } => {
            let text = String::from_utf8(read(&netlist)?)
                .map_err(|_| Failure::Usage(format!("{}: not UTF-8", netlist.display())))?;
            let net = load_netlist(&text)?;
            let policy = match outcomes {
                Some(o) => OutcomePolicy::forced_from_str(&o)?,
                None => OutcomePolicy::Sample { seed: seed.unwrap_or(0) },
            };
            let backend = match backend {
                BackendArg::Tableau => Backend::Tableau,
                BackendArg::Oracle => Backend::Oracle,
            };
            let mode = match mode {
                ModeArg::OnSite => CorrectionMode::OnSite,
                ModeArg::EndPropagated => CorrectionMode::EndPropagated,
            };
            let options = RunOptions { backend, policy, mode };
            let out = run_netlist(&net, &parse_inputs(&inputs)?, &options)?;
            println!("outcomes {}", bits(&out.outcome_bits()));
            println!("readouts {}", bits(&out.readouts));
            let n = out.state.num_qubits();
            for (i, a) in out.state.amplitudes().iter().enumerate() {
                if a.norm() > 1e-12 {
                    let label: String = (0..n).map(|q| if (i >> q) & 1 == 1 { '1' } else { '0' }).collect();
                    println!("|{label}> {:+.12} {:+.12}i", a.re, a.im);
                }
            }
        }
        Command::Verify { circuit, trials, tol, branches, seed, size } => {
            let ir = load_circuit(&circuit)?;
            let net = compile(&ir, &size.policy())?;
            let opts = VerifyOptions { trials, tol, seed, forced_branches: branches };
            let report = verify_netlist(&ir, &net, &opts)?;
            println!("runs {} max deviation {:.3e}", report.runs, report.max_deviation);
            if let Some(f) = report.failure {
                return Err(Failure::Verification(format!(
                    "trial {} deviates by {:.3e} on outcomes {}",
                    f.trial, f.deviation, f.outcomes
                )));
            }
        }
        Command::PhaseLab { lambda_grid, length, junk_dim, seed, family, out } => {
            let family = match family {
                FamilyArg::Generic => PerturbationFamily::Generic,
                FamilyArg::GaugeOnly => PerturbationFamily::GaugeOnly,
                FamilyArg::JunkOnly => PerturbationFamily::JunkOnly,
            };
            let model = PhaseModel::new(family, 0.0, junk_dim, seed);
            let rows = phase_lab(&model, &lambda_grid.0, length, FidelityMode::Exhaustive)?;
            let mut w = csv::Writer::from_path(&out).map_err(|e| Failure::Usage(format!("{}: {e}", out.display())))?;
            for row in &rows {
                w.serialize(row).map_err(|e| Failure::Usage(e.to_string()))?;
            }
            w.flush().map_err(|e| Failure::Usage(e.to_string()))?;
            println!("{} rows written to {}", rows.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Circuit(msg)) => {
            eprintln!("error: {msg}\n\n{GRAMMAR}");
            ExitCode::from(2)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
