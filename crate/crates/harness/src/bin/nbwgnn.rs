use clap::Parser;
use nbw_harness::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let progress = |msg: &str| eprintln!("[nbwgnn] {msg}");
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = run(&cli, &mut stdout, &progress) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
