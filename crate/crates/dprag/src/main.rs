fn main() {
    std::process::exit(dprag::cli::main());
}
