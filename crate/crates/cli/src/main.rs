use clap::Parser;

fn main() {
    let cli = swleak_cli::app::Cli::parse();
    std::process::exit(swleak_cli::app::execute(cli));
}
