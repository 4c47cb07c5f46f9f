fn main() {
    std::process::exit(qinfospec_cli::run_cli(std::env::args()));
}
