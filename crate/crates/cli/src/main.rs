use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use tracing_subscriber::EnvFilter;
use trustcbc_cli::{run, Cli, Command, CommandOutcome};

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("warn")),
        )
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();

    let outcome = match &cli.command {
        Command::Serve(args) => serve(args.config()),
        other => run(other),
    };
    let (mut stdout, mut stderr) = (std::io::stdout(), std::io::stderr());
    let stream: &mut dyn Write = if outcome.exit_code == 0 {
        &mut stdout
    } else {
        &mut stderr
    };
    let _ = stream.write_all(outcome.report.as_bytes());
    ExitCode::from(outcome.exit_code as u8)
}

fn serve(config: trustcbc_service::ServiceConfig) -> CommandOutcome {
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(e) => return CommandOutcome::failure(&e.into()),
    };
    let shutdown = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    match runtime.block_on(trustcbc_service::run(config, shutdown)) {
        Ok(()) => CommandOutcome {
            exit_code: 0,
            report: String::new(),
        },
        Err(e) => CommandOutcome::failure(&e.into()),
    }
}
