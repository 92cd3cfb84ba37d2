use std::process::ExitCode;

use clap::{CommandFactory, Parser};
use movprim::cli::{run, Cli};

fn usage_error(e: clap::Error) -> ! {
    if e.use_stderr() && !e.to_string().contains("Usage:") {
        let _ = e.print();
        let mut cmd = Cli::command().bin_name("movprim");
        cmd.build();
        let sub = std::env::args()
            .skip(1)
            .find_map(|a| cmd.get_subcommands().find(|s| s.get_name() == a).cloned());
        let usage = match sub {
            Some(mut s) => s.render_usage(),
            None => cmd.render_usage(),
        };
        eprintln!("\n{usage}");
        std::process::exit(e.exit_code());
    }
    e.exit()
}

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| usage_error(e));
    if let Err(e) = cli.check() {
        usage_error(e);
    }
    env_logger::Builder::new()
        .filter_level(if cli.verbose {
            log::LevelFilter::Info
        } else {
            log::LevelFilter::Warn
        })
        .parse_default_env()
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
