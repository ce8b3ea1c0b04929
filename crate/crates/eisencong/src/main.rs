use clap::Parser;
use eisencong::Cli;

fn main() {
    let cli = Cli::parse();
    std::process::exit(eisencong::run(&cli));
}
