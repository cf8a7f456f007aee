fn main() {
    std::process::exit(cyclosum::cli::run(std::env::args_os()));
}
