//! Command-line front end. [`run`] does all the work and returns the exit
//! code with both output streams, so it can be tested without a process.
//!
//! Exit codes: 0 success or positive verdict, 1 negative verdict, 2 usage,
//! parse or input errors, 3 enumeration cap exceeded, 4 internal error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rifp::semantics::{true_under_with, valid_with};
use rifp::synthesis::synthesize;
use rifp::{
    check_proof, parse, parse_proof, render_proof, Caps, Cirquent, Error, Interpretation,
    SynthesisResult, ValidityVerdict,
};

#[derive(Parser, Debug)]
#[command(
    name = "rifp",
    version,
    about = "Cirquents with clustering and ranking"
)]
struct Cli {
    /// Print bare machine-readable results only.
    #[arg(long, global = true)]
    porcelain: bool,

    /// Largest number of atoms to enumerate.
    #[arg(long, global = true, default_value_t = Caps::default().max_atoms)]
    max_atoms: usize,

    /// Largest number of clusters to enumerate.
    #[arg(long, global = true, default_value_t = Caps::default().max_clusters)]
    max_clusters: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the canonical form of a cirquent.
    Parse(Input),
    /// Evaluate a cirquent under an interpretation.
    Eval {
        #[command(flatten)]
        input: Input,
        /// Interpretation such as `p=1,q=0`.
        #[arg(short = 'm', long = "model")]
        model: String,
    },
    /// Decide validity; prints a counterexample when invalid.
    Valid(Input),
    /// Synthesize a proof or a counterexample.
    Prove {
        #[command(flatten)]
        input: Input,
        /// Write the proof here instead of standard output.
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
        /// Log every rewrite to standard error.
        #[arg(long)]
        trace: bool,
    },
    /// Check a proof file.
    Check {
        /// Proof file.
        proof: PathBuf,
    },
}

#[derive(Args, Debug)]
struct Input {
    /// Cirquent text.
    #[arg(required_unless_present = "file", conflicts_with = "file")]
    cirquent: Option<String>,
    /// Read the cirquent from a file.
    #[arg(short = 'f', long = "file")]
    file: Option<PathBuf>,
}

#[derive(Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn out(code: i32, stdout: String) -> Self {
        Outcome {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn err(code: i32, stderr: String) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr,
        }
    }
}

fn failure(e: Error) -> Outcome {
    let code = match e {
        Error::CapExceeded { .. } => 3,
        Error::Internal(_) => 4,
        _ => 2,
    };
    Outcome::err(code, format!("error: {e}\n"))
}

/// `args` includes the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.exit_code() {
                0 => Outcome::out(0, text),
                _ => Outcome::err(2, text),
            };
        }
    };
    let caps = Caps {
        max_atoms: cli.max_atoms,
        max_clusters: cli.max_clusters,
    };
    match execute(&cli, caps) {
        Ok(outcome) => outcome,
        Err(e) => failure(e),
    }
}

fn read(path: &PathBuf) -> Result<String, Outcome> {
    fs::read_to_string(path)
        .map_err(|e| Outcome::err(2, format!("error: cannot read {}: {e}\n", path.display())))
}

fn load(input: &Input) -> Result<Cirquent, Outcome> {
    let text = match (&input.cirquent, &input.file) {
        (Some(text), _) => text.clone(),
        (None, Some(path)) => read(path)?,
        (None, None) => unreachable!("clap requires one input"),
    };
    let c = parse(text.trim()).map_err(failure)?;
    c.validate().into_result().map_err(failure)?;
    Ok(c)
}

fn execute(cli: &Cli, caps: Caps) -> Result<Outcome, Error> {
    let outcome = match &cli.command {
        Command::Parse(input) => match load(input) {
            Ok(c) => Outcome::out(0, format!("{c}\n")),
            Err(o) => o,
        },
        Command::Eval { input, model } => {
            let c = match load(input) {
                Ok(c) => c,
                Err(o) => return Ok(o),
            };
            let star: Interpretation = model.parse()?;
            Outcome::out(0, format!("{}\n", true_under_with(&c, &star, caps)?))
        }
        Command::Valid(input) => {
            let c = match load(input) {
                Ok(c) => c,
                Err(o) => return Ok(o),
            };
            match valid_with(&c, caps)? {
                ValidityVerdict::Valid => Outcome::out(0, "valid\n".into()),
                ValidityVerdict::Invalid { counterexample } => {
                    Outcome::out(1, verdict_text(cli.porcelain, &counterexample))
                }
            }
        }
        Command::Prove {
            input,
            output,
            trace,
        } => {
            let c = match load(input) {
                Ok(c) => c,
                Err(o) => return Ok(o),
            };
            let run = synthesize(&c, caps)?;
            let mut stderr = String::new();
            if *trace {
                for entry in &run.trace {
                    writeln!(stderr, "{entry}").expect("string write");
                }
            }
            let mut outcome = match run.result {
                SynthesisResult::Proof(pf) => {
                    let text = render_proof(&pf);
                    match output {
                        Some(path) => {
                            if let Err(e) = fs::write(path, &text) {
                                return Ok(Outcome::err(
                                    2,
                                    format!("error: cannot write {}: {e}\n", path.display()),
                                ));
                            }
                            let note = if cli.porcelain {
                                String::new()
                            } else {
                                format!(
                                    "proof with {} steps written to {}\n",
                                    pf.len(),
                                    path.display()
                                )
                            };
                            Outcome::out(0, note)
                        }
                        None => Outcome::out(0, text),
                    }
                }
                SynthesisResult::Counterexample(star) => {
                    Outcome::out(1, verdict_text(cli.porcelain, &star))
                }
            };
            outcome.stderr = stderr + &outcome.stderr;
            outcome
        }
        Command::Check { proof } => {
            let text = match read(proof) {
                Ok(t) => t,
                Err(o) => return Ok(o),
            };
            let pf = parse_proof(&text)?;
            let verdict = check_proof(&pf);
            let code = if verdict.is_accepted() { 0 } else { 1 };
            Outcome::out(code, format!("{verdict}\n"))
        }
    };
    Ok(outcome)
}

fn verdict_text(porcelain: bool, star: &Interpretation) -> String {
    if porcelain {
        format!("{star}\n")
    } else {
        format!("invalid, counterexample:\n{star}\n")
    }
}
