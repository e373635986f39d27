fn main() {
    std::process::exit(cvcloner::cli::run());
}
