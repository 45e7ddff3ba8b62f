use clap::Parser;
use skrates::{exit, run, Cli};

fn main() {
    // clap exits with status 2 on usage errors by itself.
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => std::process::exit(exit::OK),
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
