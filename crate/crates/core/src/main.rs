use clap::Parser;

fn main() {
    let args = collar_index::cli::Args::parse();
    std::process::exit(collar_index::cli::main_with(args));
}
