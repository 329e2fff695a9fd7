use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use clap::Parser;
use stereodyn::cli::{run, Args};

fn main() -> ExitCode {
    let args = Args::parse();
    let level = match args.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let cancel = Arc::new(AtomicBool::new(false));
    let flag = Arc::clone(&cancel);
    if let Err(e) = ctrlc::set_handler(move || {
        eprintln!("interrupt: finishing rows in flight, then writing what is complete");
        flag.store(true, Ordering::SeqCst);
    }) {
        log::warn!("no Ctrl-C handler: {e}");
    }

    match run(&args, &cancel) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", f.display());
            }
            if outcome.cancelled {
                eprintln!("cancelled; partial output written");
            }
            if outcome.failures > 0 {
                eprintln!("{} item(s) failed", outcome.failures);
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
