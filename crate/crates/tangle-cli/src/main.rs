fn main() {
    std::process::exit(tangle_cli::main_with(std::env::args().collect()));
}
