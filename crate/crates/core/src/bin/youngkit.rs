fn main() {
    std::process::exit(youngkit::cli::run());
}
