fn main() {
    std::process::exit(fnmetric::cli::run());
}
