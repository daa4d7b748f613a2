fn main() {
    std::process::exit(intent_discovery::cli::run(std::env::args_os()));
}
