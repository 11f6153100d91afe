use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qopdist::qfidelity::MAX_K_CAP;
use qopdist::quantcore::QuantumChannel;
use qopdist_cli::commands;
use qopdist_cli::format::{to_canonical_json, ChannelFile, ProtocolFile};
use qopdist_cli::{CliError, EXIT_NEGATIVE, EXIT_OK};

/// Perfect discrimination of quantum operations given in Kraus form.
#[derive(Parser)]
#[command(name = "qopdist", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether two operations are perfectly distinguishable.
    /// Exit code 0 when they are, 3 when they are not.
    Check { a: PathBuf, b: PathBuf },
    /// Build the zero-error protocol, write it to a file and simulate it.
    Protocol {
        a: PathBuf,
        b: PathBuf,
        /// Output protocol file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Rerun a protocol file against two operations.
    Simulate { protocol: PathBuf, a: PathBuf, b: PathBuf },
    /// The q-fidelity sequence, q_max and the minimal number of queries.
    Nmin {
        a: PathBuf,
        b: PathBuf,
        /// Number of sequence terms after q_0.
        #[arg(long, default_value_t = MAX_K_CAP)]
        kcap: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Samples of the q-numerical range of a square operator, or of
    /// U0^dag U1 for an isometry pair, as CSV on stdout.
    Qrange {
        #[arg(required = true, num_args = 1..=2)]
        files: Vec<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        /// Approximate number of shell samples.
        #[arg(long, default_value_t = 4096)]
        points: usize,
        /// Also write an SVG picture.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Write the worked instances as channel files.
    Examples {
        #[arg(long, default_value = "examples-out")]
        out: PathBuf,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn channel(path: &Path) -> Result<QuantumChannel, CliError> {
    let text = read(path)?;
    ChannelFile::parse(&text)
        .and_then(|f| f.channel())
        .map_err(|e| match e {
            CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
            other => other,
        })
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Check { a, b } => {
            let report = commands::check(&channel(&a)?, &channel(&b)?)?;
            print!("{}", to_canonical_json(&report));
            Ok(if report.distinguishable { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Protocol { a, b, out } => {
            let (file, report) = commands::protocol(&channel(&a)?, &channel(&b)?)?;
            write(&out, &to_canonical_json(&file))?;
            print!("{}", to_canonical_json(&report));
            Ok(EXIT_OK)
        }
        Command::Simulate { protocol, a, b } => {
            let file: ProtocolFile = serde_json::from_str(&read(&protocol)?)
                .map_err(|e| CliError::Input(format!("malformed protocol file: {e}")))?;
            let report = commands::simulate(&file, &channel(&a)?, &channel(&b)?)?;
            print!("{}", to_canonical_json(&report));
            Ok(EXIT_OK)
        }
        Command::Nmin { a, b, kcap, seed } => {
            let report = commands::nmin(&channel(&a)?, &channel(&b)?, kcap, seed)?;
            print!("{}", to_canonical_json(&report));
            Ok(EXIT_OK)
        }
        Command::Qrange { files, q, points, svg } => {
            let texts = files.iter().map(|p| read(p)).collect::<Result<Vec<_>, _>>()?;
            let a = commands::qrange_operator(&texts)?;
            let out = commands::qrange(&a, q, points, svg.is_some())?;
            if let (Some(path), Some(picture)) = (svg, out.svg) {
                write(&path, &picture)?;
            }
            print!("{}", out.csv);
            Ok(EXIT_OK)
        }
        Command::Examples { out } => {
            fs::create_dir_all(&out).map_err(|e| CliError::Input(format!("{}: {e}", out.display())))?;
            let files = commands::example_files();
            for (name, text) in &files {
                write(&out.join(name), text)?;
            }
            print!("{}", to_canonical_json(&commands::examples_summary(&files)));
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("qopdist: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
