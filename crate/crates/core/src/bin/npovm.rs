fn main() {
    std::process::exit(npovm::cli::run(std::env::args_os()));
}
