use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stm_core::graph::{build_complete_graph, DistanceProvider, GhostMode};
use stm_core::lattice::{CodeLayout, CodeSpec};
use stm_core::mwpm::DEFAULT_CAP;
use stm_core::pauli::{ErrorType, PauliError};
use stm_core::sim::{
    bench, estimate_beta, estimate_beta_sampled, predict_pl, simulate, write_csv, Decoder,
    DEFAULT_BETA_BUDGET,
};
use stm_core::stm::{make_ghosted_trees, TreeConstruction};
use stm_core::Error;

#[derive(Parser)]
#[command(name = "stm", version, about = "Surface-code decoding experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Target {
    /// Code as `standard:<d>` or `rotated:<d>`.
    #[arg(long)]
    code: CodeSpec,
    #[arg(long, default_value = "stm", value_parser = parse_decoder)]
    decoder: Decoder,
    /// Vertex cap for the exact matcher.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    mwpm_cap: usize,
}

impl Target {
    fn decoder(&self) -> Decoder {
        match self.decoder {
            Decoder::Mwpm { .. } => Decoder::Mwpm { cap: self.mwpm_cap },
            d => d,
        }
    }
}

fn parse_decoder(s: &str) -> Result<Decoder, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo logical error rates, written as CSV.
    Simulate {
        #[command(flatten)]
        target: Target,
        /// Comma-separated physical error rates.
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fraction of all errors of one weight that are corrected.
    Beta {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        weight: usize,
        /// Estimate from this many random patterns instead of enumerating.
        #[arg(long)]
        sample: Option<u64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BETA_BUDGET as u64)]
        budget: u64,
        /// Also print the leading-order logical error rate at this p.
        #[arg(long)]
        predict_at: Option<f64>,
    },
    /// Times the matching step on syndromes with fixed defect counts.
    Bench {
        #[command(flatten)]
        target: Target,
        #[arg(long, value_delimiter = ',', required = true)]
        ndefects: Vec<usize>,
        #[arg(long, default_value_t = 10_000)]
        reps: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Decodes a single error read from a file (`Z4 X7 Y10`).
    Decode {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        error_file: PathBuf,
        /// Print the two ghosted spanning trees of each pass.
        #[arg(long)]
        dump_trees: bool,
        /// Print the defect graph of each pass.
        #[arg(long)]
        dump_graph: bool,
    },
    /// Draws a code layout.
    Render {
        #[arg(long)]
        code: CodeSpec,
        #[arg(long)]
        json: bool,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Capacity { .. } => 3,
        Error::InvalidDistance(_)
        | Error::InvalidProbability(_)
        | Error::Parse(_)
        | Error::BudgetExceeded { .. }
        | Error::LengthMismatch { .. } => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

enum Failure {
    Core(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Simulate {
            target,
            p,
            trials,
            seed,
            out,
        } => {
            let layout = CodeLayout::from_spec(target.code)?;
            let decoder = target.decoder();
            let mut results = Vec::new();
            for p in p {
                let r = simulate(&layout, &decoder, p, trials, seed)?;
                eprintln!(
                    "{} {} p={} p_L={:.4e} X_L={} Z_L={} Y_L={} resampled={} structural={}",
                    r.code,
                    r.decoder,
                    r.p,
                    r.p_l,
                    r.classes.x_l,
                    r.classes.z_l,
                    r.classes.y_l,
                    r.resampled,
                    r.structural
                );
                results.push(r);
            }
            match out {
                Some(path) => write_csv(BufWriter::new(File::create(path)?), &results)?,
                None => write_csv(io::stdout().lock(), &results)?,
            }
        }
        Command::Beta {
            target,
            weight,
            sample,
            seed,
            budget,
            predict_at,
        } => {
            let layout = CodeLayout::from_spec(target.code)?;
            let decoder = target.decoder();
            let r = match sample {
                Some(n) => estimate_beta_sampled(&layout, &decoder, weight, n, seed)?,
                None => estimate_beta(&layout, &decoder, weight, budget as u128)?,
            };
            let mut line = format!(
                "code={} decoder={} weight={} total={} corrected={} beta={:.6}",
                r.code, r.decoder, r.weight, r.total, r.corrected, r.beta
            );
            if let Some((lo, hi)) = r.ci {
                line.push_str(&format!(" ci=[{lo:.6},{hi:.6}]"));
            }
            if let Some(p) = predict_at {
                let pl = predict_pl(layout.n(), layout.t(), r.beta, p);
                line.push_str(&format!(" predicted_p_l({p})={pl:.4e}"));
            }
            println!("{line}");
        }
        Command::Bench {
            target,
            ndefects,
            reps,
            seed,
        } => {
            let layout = CodeLayout::from_spec(target.code)?;
            let decoder = target.decoder();
            println!("code,decoder,n_d,repetitions,mean_us,median_us");
            for n_d in ndefects {
                let r = bench(&layout, &decoder, n_d, reps, seed)?;
                println!(
                    "{},{},{},{},{:.4},{:.4}",
                    r.code, r.decoder, r.n_d, r.repetitions, r.mean_us, r.median_us
                );
            }
        }
        Command::Decode {
            target,
            error_file,
            dump_trees,
            dump_graph,
        } => {
            let layout = CodeLayout::from_spec(target.code)?;
            let decoder = target.decoder();
            let text = std::fs::read_to_string(&error_file)?;
            let error = PauliError::parse(&text, layout.n())?;
            let syndrome = layout.extract_syndrome(&error);
            let mut out = io::stdout().lock();
            writeln!(out, "error: {error}")?;
            writeln!(out, "x_defects: {:?}", syndrome.x_defects)?;
            writeln!(out, "z_defects: {:?}", syndrome.z_defects)?;
            for kind in [ErrorType::Z, ErrorType::X] {
                let defects = syndrome.defects(kind);
                if defects.is_empty() || !(dump_graph || dump_trees) {
                    continue;
                }
                let g = build_complete_graph(&layout, kind, &DistanceProvider::Manhattan, defects);
                if dump_graph {
                    let shown = match decoder {
                        Decoder::Mwpm { .. } => g.add_ghosts(GhostMode::PerDefect),
                        _ => g.clone(),
                    };
                    writeln!(out, "# graph {kind:?} pass")?;
                    write!(out, "{}", shown.dump_edges())?;
                }
                if dump_trees {
                    let construction = match decoder {
                        Decoder::Stm(c) => c.construction,
                        _ => TreeConstruction::default(),
                    };
                    let (t1, t2) = make_ghosted_trees(&g, construction);
                    writeln!(out, "# tree 1 {kind:?} pass")?;
                    write!(out, "{}", t1.dump())?;
                    writeln!(out, "# tree 2 {kind:?} pass")?;
                    write!(out, "{}", t2.dump())?;
                }
            }
            let correction = decoder.decode(&layout, &syndrome)?;
            writeln!(out, "correction: {correction}")?;
            writeln!(
                out,
                "residual: {:?}",
                layout.residual_class(&error, &correction)
            )?;
        }
        Command::Render { code, json } => {
            let layout = CodeLayout::from_spec(code)?;
            if json {
                let text =
                    serde_json::to_string_pretty(&layout.dump()).map_err(io::Error::other)?;
                println!("{text}");
            } else {
                print!("{}", layout.render_ascii());
            }
        }
    }
    Ok(())
}
