use clap::Parser;

fn main() {
    let cli = qspeed::cli::Cli::parse();
    std::process::exit(qspeed::cli::run(&cli));
}
