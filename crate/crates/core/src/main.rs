use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use closedloop::preset::list_presets;
use closedloop::scenario::{
    first_failure, run_file, write_outputs, RunError, RunOptions, Scenario, Task,
};

#[derive(Parser)]
#[command(
    name = "closedloop",
    version,
    about = "Phase-inversion dynamics of closed-loop level schemes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file.
    Run {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Absolute tolerance for all checks.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Number of grid points.
        #[arg(long)]
        points: Option<usize>,
        /// Exit with status 4 when a check fails.
        #[arg(long)]
        assert: bool,
    },
    /// Print the preset catalog.
    ListPresets,
    /// Run one task on a preset with its default settings.
    Check {
        preset: String,
        #[arg(long)]
        task: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        assert: bool,
    },
}

fn run(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::ListPresets => {
            print!("{}", list_presets());
            Ok(())
        }
        Command::Run {
            file,
            out,
            tolerance,
            points,
            assert,
        } => {
            let options = RunOptions {
                out_dir: out,
                tolerance,
                points,
            };
            let (outputs, dir) = run_file(&file, &options)?;
            for o in &outputs {
                println!("{}", o.summary);
            }
            println!("wrote {}", dir.display());
            match first_failure(&outputs) {
                Some(e) if assert => Err(e),
                _ => Ok(()),
            }
        }
        Command::Check {
            preset,
            task,
            out,
            tolerance,
            points,
            assert,
        } => {
            let task = Task::parse(&task).ok_or_else(|| {
                let valid: Vec<_> = Task::ALL.iter().map(|t| t.as_str()).collect();
                RunError::Schema(format!(
                    "--task: unknown task `{task}`; valid tasks: {}",
                    valid.join(", ")
                ))
            })?;
            let mut scenario = Scenario::from_preset(&preset, vec![task])?;
            scenario.apply(&RunOptions {
                out_dir: out,
                tolerance,
                points,
            })?;
            let outputs = scenario.execute()?;
            for o in &outputs {
                println!("{}", o.summary);
            }
            if let Some(dir) = &scenario.output_dir {
                write_outputs(dir, &outputs)?;
                println!("wrote {}", dir.display());
            }
            match first_failure(&outputs) {
                Some(e) if assert => Err(e),
                _ => Ok(()),
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
