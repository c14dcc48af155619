fn main() {
    std::process::exit(quasicopy::cli::main());
}
