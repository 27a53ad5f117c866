//! `cqlnet`: check, normalize, denote, evaluate and compare proof nets.
//!
//! Exit status: 0 on success (and for `equal`, when the nets are equal),
//! 1 when `equal` finds the nets distinct, 2 on any usage or validation
//! error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use cqlnet_core::atoms::{load_category, Category};
use cqlnet_core::fixtures;
use cqlnet_core::freecat::{complete, denote, parse_free_arrow};
use cqlnet_core::model::load_model;
use cqlnet_core::net::{parse_net, Net};
use cqlnet_core::rewrite::{beta_equal, normalize_with, Strategy};

#[derive(Parser, Debug)]
#[command(
    name = "cqlnet",
    version,
    about = "Proof nets for compact closed categories with biproducts"
)]
struct Cli {
    /// Generating category file.
    #[arg(long, short, global = true)]
    category: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Dot,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a net and print its conclusions.
    Check { net: PathBuf },
    /// Cut-eliminate a net and print its canonical normal form.
    Normalize {
        net: PathBuf,
        /// Log each rewrite step to stderr.
        #[arg(long)]
        trace: bool,
        /// Pick redexes at random with this seed instead of by least cut id.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print the denotation of a net in the free category.
    Denote { net: PathBuf },
    /// Evaluate a net in a matrix model.
    Eval {
        net: PathBuf,
        #[arg(long, short)]
        model: PathBuf,
    },
    /// Decide beta-equality of two nets (exit 0 if equal, 1 if distinct).
    Equal { first: PathBuf, second: PathBuf },
    /// Build a net whose denotation is the name of a free arrow.
    Complete {
        arrow: PathBuf,
        /// Name of the printed net.
        #[arg(long, default_value = "complete")]
        name: String,
    },
    /// Print a net as a Graphviz DOT graph.
    Dot { net: PathBuf },
    /// Write the shipped example files into a directory.
    Examples { dir: PathBuf },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn category(path: &Option<PathBuf>) -> Result<Category> {
    let path = path
        .as_ref()
        .context("--category is required for this command")?;
    load_category(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn net(path: &Path, cat: &Category) -> Result<Net> {
    parse_net(&read(path)?, cat).with_context(|| format!("{}", path.display()))
}

/// Run a command, returning the exit status on success.
fn run(cli: Cli, out: &mut impl Write, err: &mut impl Write) -> Result<u8> {
    match &cli.command {
        Command::Examples { dir } => {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            for (name, text) in fixtures::FILES {
                let path = dir.join(name);
                fs::write(&path, text)
                    .with_context(|| format!("cannot write {}", path.display()))?;
                writeln!(out, "{}", path.display())?;
            }
        }
        Command::Check { net: path } => {
            let cat = category(&cli.category)?;
            let n = net(path, &cat)?;
            let cs: Vec<String> = n
                .conclusions()
                .iter()
                .map(|f| f.display(&cat).to_string())
                .collect();
            writeln!(
                out,
                "net {}: {} slices, {} links",
                n.name(),
                n.slices().len(),
                n.link_count()
            )?;
            writeln!(out, "conclusions {}", cs.join(", "))?;
        }
        Command::Normalize {
            net: path,
            trace,
            seed,
            format,
        } => {
            let cat = category(&cli.category)?;
            let n = net(path, &cat)?;
            let strategy = seed.map_or(Strategy::MinId, Strategy::Random);
            let run = normalize_with(&n, &cat, strategy)
                .with_context(|| format!("{}", path.display()))?;
            if *trace {
                for step in run.trace() {
                    writeln!(err, "{step}")?;
                }
            }
            let nf = run.normal.to_net(n.name());
            match format {
                Format::Text => write!(out, "{}", nf.to_text(&cat))?,
                Format::Dot => write!(out, "{}", nf.to_dot(&cat))?,
            }
        }
        Command::Denote { net: path } => {
            let cat = category(&cli.category)?;
            let n = net(path, &cat)?;
            let d = denote(&n, &cat).with_context(|| format!("{}", path.display()))?;
            write!(out, "{}", d.to_text(&cat))?;
        }
        Command::Eval { net: path, model } => {
            let cat = category(&cli.category)?;
            let n = net(path, &cat)?;
            let m =
                load_model(&read(model)?, &cat).with_context(|| format!("{}", model.display()))?;
            writeln!(out, "{}", m.eval_net_text(&n, &cat))?;
        }
        Command::Equal { first, second } => {
            let cat = category(&cli.category)?;
            let (a, b) = (net(first, &cat)?, net(second, &cat)?);
            let equal = beta_equal(&a, &b, &cat)?;
            writeln!(out, "{}", if equal { "equal" } else { "distinct" })?;
            return Ok(if equal { 0 } else { 1 });
        }
        Command::Complete { arrow, name } => {
            let cat = category(&cli.category)?;
            let f = parse_free_arrow(&read(arrow)?, &cat)
                .with_context(|| format!("{}", arrow.display()))?;
            let n = complete(&f, name, &cat)?;
            write!(out, "{}", n.to_text(&cat))?;
        }
        Command::Dot { net: path } => {
            let cat = category(&cli.category)?;
            write!(out, "{}", net(path, &cat)?.to_dot(&cat))?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let mut stdout = io::stdout().lock();
    let mut stderr = io::stderr().lock();
    match run(cli, &mut stdout, &mut stderr) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            ExitCode::from(2)
        }
    }
}
