use clap::Parser;

use cyclo_bounds::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("cyclo-bounds: {e}");
        std::process::exit(e.exit_code());
    }
}
