use clap::Parser;

fn main() {
    std::process::exit(gasket_fgf_cli::main_with(gasket_fgf_cli::Cli::parse()));
}
