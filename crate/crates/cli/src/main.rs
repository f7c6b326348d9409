fn main() {
    std::process::exit(qsr_cli::run(std::env::args_os()));
}
