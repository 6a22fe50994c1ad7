fn main() {
    std::process::exit(frackit_cli::run(std::env::args_os()));
}
