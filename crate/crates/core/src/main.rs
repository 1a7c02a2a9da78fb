fn main() {
    std::process::exit(eyeclone::cli::run_from_args(std::env::args_os()));
}
