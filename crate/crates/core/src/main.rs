use clap::Parser;

fn main() {
    let cli = hamlab::cli::Cli::parse();
    std::process::exit(hamlab::cli::run(cli));
}
