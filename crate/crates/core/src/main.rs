fn main() {
    std::process::exit(covol::cli::run(std::env::args()));
}
