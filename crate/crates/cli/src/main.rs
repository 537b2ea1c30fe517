use clap::Parser;

fn main() {
    let cli = nls_lab_cli::config::Cli::parse();
    std::process::exit(nls_lab_cli::run(&cli));
}
