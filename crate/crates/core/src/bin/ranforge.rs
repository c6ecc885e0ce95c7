fn main() {
    std::process::exit(ranforge::cli::main(std::env::args_os()));
}
