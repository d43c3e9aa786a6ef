fn main() {
    std::process::exit(spaser_cli::run(std::env::args_os()));
}
