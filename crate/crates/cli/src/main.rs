fn main() {
    std::process::exit(leleec_cli::run_cli(std::env::args_os()));
}
