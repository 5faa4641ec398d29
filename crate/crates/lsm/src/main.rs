fn main() {
    std::process::exit(lsm::cli::run(std::env::args_os()));
}
