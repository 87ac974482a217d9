//! Thin command-line wrapper: argument parsing, file reading, exit codes.
//! All computation lives in the library.

use std::io::Read as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use reesalg::cli::{run_command, Command, Invocation};
use reesalg::Error;

#[derive(Parser)]
#[command(
    name = "reesalg",
    version,
    about = "Filtration subalgebras, kernels, and degree modules of locally nilpotent derivations"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct SpecArgs {
    /// Derivation spec file; `-` reads standard input
    file: PathBuf,
    /// Skip the eager well-definedness and nilpotency checks
    #[arg(long)]
    no_validate: bool,
    /// Override the nilpotency search bound
    #[arg(long)]
    bound: Option<u32>,
    /// Override the iteration cap of the generator search
    #[arg(long)]
    max_iter: Option<u32>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate the derivation and report per-variable nil-degrees
    Check(SpecArgs),
    /// Expand the exponential flow of an element in a formal parameter
    Exp {
        #[command(flatten)]
        spec: SpecArgs,
        /// Element to expand
        #[arg(long)]
        element: String,
    },
    /// Print the nil-degree of an element
    Degree {
        #[command(flatten)]
        spec: SpecArgs,
        /// Element to measure
        #[arg(long)]
        element: String,
    },
    /// Test membership of an element in a filtration level
    Member {
        #[command(flatten)]
        spec: SpecArgs,
        /// Element to test
        #[arg(long)]
        element: String,
        /// Filtration level
        #[arg(long)]
        level: u32,
    },
    /// Present the filtration subalgebra with weighted generators and relations
    Rees {
        #[command(flatten)]
        spec: SpecArgs,
        /// Drop generators expressible in the remaining ones
        #[arg(long)]
        prune: bool,
    },
    /// Present the associated graded algebra
    Gr(SpecArgs),
    /// List generators of the derivation kernel
    Kernel(SpecArgs),
    /// List module generators of one filtration level over the kernel
    #[command(name = "fn")]
    Fn {
        #[command(flatten)]
        spec: SpecArgs,
        /// Filtration level
        #[arg(long)]
        level: u32,
    },
    /// Describe the weighted projective model and its boundary
    Proj(SpecArgs),
    /// Adjoin an invariant ideal divided by an invariant divisor
    Modify {
        #[command(flatten)]
        spec: SpecArgs,
        /// Center generators, separated by `;`
        #[arg(long)]
        ideal: String,
        /// Invariant divisor
        #[arg(long)]
        divisor: String,
        /// Also check that the construction commutes with the presentation
        #[arg(long)]
        verify_lemma: bool,
    },
    /// Run every fixture and compare against its golden output
    #[command(name = "verify-examples")]
    VerifyExamples {
        /// Fixture directory
        #[arg(long, default_value = "fixtures")]
        dir: PathBuf,
    },
}

fn read_spec(path: &PathBuf) -> Result<String, Error> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Error::InvalidInput(format!("cannot read standard input: {e}")))?;
        return Ok(text);
    }
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn build(cmd: Cmd) -> Result<Invocation, Error> {
    let (spec_args, command) = match cmd {
        Cmd::Check(spec) => (spec, Command::Check),
        Cmd::Exp { spec, element } => (spec, Command::Exp { element }),
        Cmd::Degree { spec, element } => (spec, Command::Degree { element }),
        Cmd::Member { spec, element, level } => (spec, Command::Member { element, level }),
        Cmd::Rees { spec, prune } => (spec, Command::Rees { prune }),
        Cmd::Gr(spec) => (spec, Command::Gr),
        Cmd::Kernel(spec) => (spec, Command::Kernel),
        Cmd::Fn { spec, level } => (spec, Command::DegreeModule { level }),
        Cmd::Proj(spec) => (spec, Command::Proj),
        Cmd::Modify { spec, ideal, divisor, verify_lemma } => {
            (spec, Command::Modify { ideal, divisor, verify_lemma })
        }
        Cmd::VerifyExamples { dir } => {
            return Ok(Invocation {
                spec: String::new(),
                command: Command::VerifyExamples { dir },
                validate: true,
                bound: None,
                max_iter: None,
            })
        }
    };
    Ok(Invocation {
        spec: read_spec(&spec_args.file)?,
        command,
        validate: !spec_args.no_validate,
        bound: spec_args.bound,
        max_iter: spec_args.max_iter,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match build(cli.command).and_then(|inv| run_command(&inv)) {
        Ok(output) => {
            print!("{}", output.text);
            ExitCode::from(output.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
