use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use fracspec_cli::{cleanup_temp_files, run, Command, Verb, CONFIG_HELP, VERSION};

#[derive(Parser, Debug)]
#[command(
    name = "fracspec",
    version = VERSION,
    about = "Fractional derivatives of the spectral function: estimation, ground truth and Monte Carlo checks",
    after_help = CONFIG_HELP
)]
struct Cli {
    /// simulate | estimate | truth | mc | confidence | fejer
    verb: String,
    /// Experiment configuration file.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory (created if absent).
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Overrides the seed in the config file.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Overwrite existing output files.
    #[arg(long)]
    force: bool,
    /// Worker threads (0 = all cores).
    #[arg(long, value_name = "N", env = "FRACSPEC_THREADS", default_value_t = 0)]
    threads: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let Some(verb) = Verb::parse(&cli.verb) else {
        eprintln!(
            "usage error: unknown verb `{}` (expected one of: {})",
            cli.verb,
            Verb::ALL.map(|v| v.name()).join(", ")
        );
        return ExitCode::from(1);
    };
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("warning: could not size the thread pool: {e}");
        }
    }
    let _ = ctrlc::set_handler(|| {
        cleanup_temp_files();
        std::process::exit(130);
    });
    let command = Command {
        verb,
        config_path: cli.config,
        out_dir: cli.out,
        seed_override: cli.seed,
        force: cli.force,
    };
    match run(&command) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
