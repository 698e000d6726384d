use clap::Parser;

fn main() {
    let cli = apl::cli::Cli::parse();
    std::process::exit(apl::cli::run(cli));
}
