use clap::Parser;

use fovregion::cli::{run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FOVREGION_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(paths) => {
            for p in paths {
                log::info!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("fovregion: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
