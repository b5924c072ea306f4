mod args;

use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches};

use args::{build_config, Cli};

fn main() -> ExitCode {
    let version = format!("{} (prng: {})", kdv_core::VERSION, kdv_core::GENERATOR_ID);
    let mut command = Cli::command().version(version);
    let matches = command.clone().get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();

    let kind = cli.command.kind();
    let cfg = match build_config(kind, cli.command.args()) {
        Ok(cfg) => cfg,
        Err(e) => {
            command.build();
            let sub = command
                .find_subcommand_mut(matches.subcommand_name().unwrap_or_default())
                .expect("subcommand was parsed");
            sub.error(clap::error::ErrorKind::MissingRequiredArgument, e.0).exit()
        }
    };
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code() as u8);
    }
    log::info!("running {} (config {})", kind.name(), &cfg.hash()[..12]);
    let result = match kdv_core::harness::run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Err(e) = result.write(&cfg.output_path) {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code() as u8);
    }
    println!("{} -> {}", result.summary(), cfg.output_path.display());
    ExitCode::from(result.exit_code() as u8)
}
