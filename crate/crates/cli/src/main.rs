use clap::Parser;

fn main() {
    let cli = abw_cli::Cli::parse();
    let outcome = abw_cli::configure_threads().and_then(|()| abw_cli::run(cli));
    if let Err(e) = outcome {
        eprintln!("error: {e}");
        std::process::exit(e.code);
    }
}
