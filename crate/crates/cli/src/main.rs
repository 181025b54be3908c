fn main() {
    std::process::exit(gasket_cli::run_from(std::env::args_os().collect()));
}
