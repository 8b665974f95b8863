fn main() {
    std::process::exit(mixcs::cli::run(std::env::args_os()));
}
