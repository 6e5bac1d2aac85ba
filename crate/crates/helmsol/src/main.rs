fn main() {
    std::process::exit(helmsol::cli::run());
}
