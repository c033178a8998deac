fn main() {
    std::process::exit(magnus::cli::run(std::env::args().collect()));
}
