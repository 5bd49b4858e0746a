use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use objcbridge::pipeline::{self, Direction, Invocation, Outcome, ToolError};

#[derive(Parser)]
#[command(name = "objcbridge", version, about = "Generate C++ <-> Objective-C bridge code")]
struct Cli {
    /// Class to generate for; overrides `class` in the config.
    #[arg(long, global = true)]
    class: Option<String>,
    /// Configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory receiving the generated files.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the class description (`.cd`) of a C++ header.
    Describe { input: PathBuf },
    /// Write the Objective-C interface files for a header or `.cd` file.
    Translate { input: PathBuf },
    /// Write a C++ class template and bridges for an Objective-C interface.
    Reverse { input: PathBuf },
    /// Write a Makefile for the configured class.
    EmitBuild {
        #[arg(long, value_enum, default_value = "forward")]
        direction: DirectionArg,
        /// Write the build-environment fragment instead.
        #[arg(long)]
        environment: bool,
    },
    /// Write the ObjCsupport.h header.
    EmitSupport,
    /// Describe, translate and write the Makefile for a header.
    Pipeline { input: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Forward,
    Reverse,
}

fn run(cli: Cli) -> Result<Outcome, ToolError> {
    let inv = Invocation::load(cli.config.as_deref(), cli.class)?;
    let outcome = match &cli.command {
        Command::Describe { input } => pipeline::describe(input, &inv)?,
        Command::Translate { input } => pipeline::translate(input, &inv)?,
        Command::Reverse { input } => pipeline::reverse(input, &inv)?,
        Command::EmitBuild {
            direction,
            environment,
        } => {
            let d = match direction {
                DirectionArg::Forward => Direction::Forward,
                DirectionArg::Reverse => Direction::Reverse,
            };
            pipeline::emit_build(&inv, d, *environment)?
        }
        Command::EmitSupport => pipeline::emit_support(),
        Command::Pipeline { input } => pipeline::run_pipeline(input, &inv)?,
    };
    pipeline::commit(&cli.out_dir, &outcome.files)?;
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("{}", w);
            }
            for line in &outcome.trace {
                println!("{}", line);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
