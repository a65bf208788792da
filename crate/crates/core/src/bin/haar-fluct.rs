use clap::Parser;
use haar_fluct::cli::{self, Cli};

fn main() {
    let args = Cli::parse();
    let code = cli::run(&args, &mut std::io::stdout().lock());
    std::process::exit(code);
}
