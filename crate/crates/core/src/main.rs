fn main() {
    std::process::exit(derivation_lab::cli::run(std::env::args_os()));
}
