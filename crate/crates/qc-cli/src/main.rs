use clap::Parser;

fn main() -> std::process::ExitCode {
    let cli = qc_cli::Cli::parse();
    std::process::ExitCode::from(qc_cli::execute(&cli))
}
