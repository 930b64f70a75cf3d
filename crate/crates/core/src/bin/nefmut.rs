use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nefmut::certificate::{self, Certificate};
use nefmut::engine::{self, VerificationReport, DEFAULT_SAMPLE_SEED};
use nefmut::error::Error;
use nefmut::mirror;
use nefmut::modelfile::{generate_builtin, ModelFile};
use nefmut::sequences;
use nefmut::toric::ToricModel;

/// Construct and verify volume-preserving birational maps between toric
/// Landau-Ginzburg models built from different nef partitions, and emit
/// replayable mutation-equivalence certificates for their Laurent mirrors.
#[derive(Parser)]
#[command(name = "nefmut", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a model file.
    Validate { file: PathBuf },
    /// Build the birational map between two named nef partitions, verify
    /// every identity, and write a certificate.
    Equivalence {
        file: PathBuf,
        #[arg(long)]
        first: String,
        #[arg(long)]
        second: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SAMPLE_SEED)]
        seed: u64,
    },
    /// Extract the Laurent mirror of a named partition with named amenable
    /// data.
    Mirror {
        file: PathBuf,
        #[arg(long)]
        partition: String,
        #[arg(long)]
        amenable: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SAMPLE_SEED)]
        seed: u64,
    },
    /// Build a mirror-equivalence certificate between two partitions with
    /// amenable data.
    MirrorEquivalence {
        file: PathBuf,
        #[arg(long)]
        first: String,
        #[arg(long = "first-amenable")]
        first_amenable: String,
        #[arg(long)]
        second: String,
        #[arg(long = "second-amenable")]
        second_amenable: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SAMPLE_SEED)]
        seed: u64,
    },
    /// Independently replay a certificate against a model file.
    Certify { file: PathBuf, cert: PathBuf },
    /// Emit a built-in model (pn N | product pA pB ..).
    Gen {
        name: String,
        params: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in combinatorial cross-checks.
    Selftest,
}

fn read_model(path: &PathBuf) -> Result<ModelFile, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    ModelFile::parse(&text)
}

fn print_report(report: &VerificationReport) {
    for check in &report.checks {
        if check.passed {
            println!("  ok   {}", check.name);
        } else {
            println!("  FAIL {}", check.name);
            println!("       got:      {}", check.lhs);
            println!("       expected: {}", check.rhs);
        }
    }
    if let Some(v) = &report.volume {
        println!(
            "  ok   volume determinant {} (structural {}, {} samples)",
            v.determinant, v.structural, v.samples
        );
    }
    for failure in &report.failures {
        println!("  FAIL {failure}");
    }
}

fn write_out(path: &PathBuf, text: &str) -> Result<(), Error> {
    fs::write(path, text)
        .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Validate { file } => {
            let model_file = read_model(&file)?;
            let issues = model_file.validate();
            if issues.is_empty() {
                println!(
                    "valid: rank {}, {} rays, {} partitions",
                    model_file.dim,
                    model_file.rays.len(),
                    model_file.partitions.len()
                );
                Ok(())
            } else {
                for issue in &issues {
                    eprintln!("invalid: {issue}");
                }
                Err(Error::InvalidInput(format!(
                    "{} validation issue(s)",
                    issues.len()
                )))
            }
        }
        Command::Equivalence {
            file,
            first,
            second,
            out,
            seed,
        } => {
            let model_file = read_model(&file)?;
            let (cert, outcome) =
                certificate::emit_equivalence(&model_file, &first, &second, seed)?;
            println!(
                "map has {} steps over {} non-trivial communicating sets",
                outcome.map.steps().len(),
                outcome.components.len()
            );
            print_report(&outcome.report);
            write_out(&out, &Certificate::Equivalence(cert).to_json_pretty())?;
            println!("certificate written to {}", out.display());
            Ok(())
        }
        Command::Mirror {
            file,
            partition,
            amenable,
            out,
            seed,
        } => {
            let model_file = read_model(&file)?;
            let model = model_file.model()?;
            let p = model_file.partition(&partition)?;
            let a = model_file.amenable_collection(&amenable)?;
            let result = mirror::extract_mirror(&model, &p, &a, seed)?;
            let payload = serde_json::json!({
                "partition": partition,
                "amenable": amenable,
                "mirror": result.mirror.canonical_text(),
                "variables": result.mirror.n_vars(),
                "basis": result.basis.to_rows_i64(),
                "chain": certificate::steps_to_records(&result.chain.map),
            });
            let text = serde_json::to_string_pretty(&payload).expect("mirror json");
            match out {
                Some(path) => {
                    write_out(&path, &text)?;
                    println!("mirror written to {}", path.display());
                }
                None => println!("{text}"),
            }
            Ok(())
        }
        Command::MirrorEquivalence {
            file,
            first,
            first_amenable,
            second,
            second_amenable,
            out,
            seed,
        } => {
            let model_file = read_model(&file)?;
            let (cert, eq) = certificate::emit_mirror(
                &model_file,
                &first,
                &first_amenable,
                &second,
                &second_amenable,
                seed,
            )?;
            println!("mirror of `{first}`:  {}", eq.first.mirror.canonical_text());
            println!("mirror of `{second}`: {}", eq.second.mirror.canonical_text());
            print_report(&eq.report);
            write_out(&out, &Certificate::Mirror(cert).to_json_pretty())?;
            println!("certificate written to {}", out.display());
            Ok(())
        }
        Command::Certify { file, cert } => {
            let model_file = read_model(&file)?;
            let text = fs::read_to_string(&cert)
                .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", cert.display())))?;
            let report = match Certificate::parse(&text)? {
                Certificate::Equivalence(c) => certificate::verify_equivalence(&model_file, &c)?,
                Certificate::Mirror(c) => certificate::verify_mirror(&model_file, &c)?,
            };
            print_report(&report);
            if report.all_passed() {
                println!("certificate verified");
                Ok(())
            } else {
                Err(Error::VerificationFailed(format!(
                    "{} failed item(s)",
                    report.failed_names().len()
                )))
            }
        }
        Command::Gen { name, params, out } => {
            let file = generate_builtin(&name, &params)?;
            let text = file.to_json_pretty();
            match out {
                Some(path) => {
                    write_out(&path, &text)?;
                    println!("model written to {}", path.display());
                }
                None => println!("{text}"),
            }
            Ok(())
        }
        Command::Selftest => selftest(),
    }
}

/// Combinatorial cross-checks on built-in instances: reversal closure of
/// hillyness, agreement of the sequence enumerator with its search and
/// brute-force oracles, and the snapshot identities on a hypersurface pair
/// and the (2,2) pair.
fn selftest() -> Result<(), Error> {
    if !sequences::reversal_closure_holds(8, 4) {
        return Err(Error::Internal("hilly reversal closure failed".into()));
    }
    println!("  ok   reversal closure (words up to length 8, alphabets up to 4)");

    for universe in 2..=5usize {
        for i in 1..=universe {
            for j in 0..i {
                let fast = sequences::enumerate_m(i, j, universe);
                let search = sequences::search_m(i, j, universe);
                if fast != search {
                    return Err(Error::Internal(format!(
                        "enumerator disagrees with search at ({i},{j},{universe})"
                    )));
                }
                if j <= 3 {
                    let brute = sequences::brute_force_m(i, j, universe);
                    if fast != brute {
                        return Err(Error::Internal(format!(
                            "enumerator disagrees with brute force at ({i},{j},{universe})"
                        )));
                    }
                }
            }
        }
    }
    println!("  ok   sequence enumeration against search and brute-force oracles");

    for (gen, params, first, second) in [
        ("pn", vec!["3".to_string()], "a", "b"),
        ("pn", vec!["5".to_string()], "a", "b"),
    ] {
        let file = generate_builtin(gen, &params)?;
        let model: ToricModel = file.model()?;
        let p = file.partition(first)?;
        let q = file.partition(second)?;
        let outcome = engine::assemble_phi(&model, &p, &q, DEFAULT_SAMPLE_SEED)?;
        for comp in &outcome.components {
            let ctx = sequences::SequenceContext::from_component(&model, &p, &q, comp);
            let report = sequences::crosscheck_component(&ctx, comp)?;
            if !report.all_passed() {
                return Err(Error::VerificationFailed(format!(
                    "cross-check failed on {gen} {params:?}: {}",
                    report.failed_names().join(", ")
                )));
            }
        }
        println!(
            "  ok   factor-chain cross-checks on {gen} {} ({} vs {})",
            params.join(" "),
            first,
            second
        );
    }
    println!("selftest passed");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
