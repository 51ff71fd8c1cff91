fn main() {
    std::process::exit(fjerk_cli::run(std::env::args_os()));
}
