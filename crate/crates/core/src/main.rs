fn main() {
    std::process::exit(metastates::cli::main());
}
