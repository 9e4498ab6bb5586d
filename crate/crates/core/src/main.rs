fn main() {
    let code = bloch_atlas::cli::run(std::env::args_os());
    std::process::exit(code);
}
