use clap::Parser;

fn main() {
    let cli = cqbound::cli::Cli::parse();
    if let Err(e) = cqbound::cli::execute(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
