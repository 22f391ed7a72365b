fn main() {
    std::process::exit(toric::cli::run());
}
