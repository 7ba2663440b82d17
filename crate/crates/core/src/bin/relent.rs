use clap::Parser;

fn main() {
    std::process::exit(relent::cli::run(relent::cli::Cli::parse()));
}
