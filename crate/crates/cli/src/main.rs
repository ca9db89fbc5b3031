use clap::Parser;
use dirac_reduce_cli::commands::{main_with, Cli};

fn main() {
    std::process::exit(main_with(Cli::parse()));
}
