use clap::Parser;

fn main() {
    std::process::exit(meanlip::cli::run(meanlip::cli::Cli::parse()));
}
