fn main() {
    std::process::exit(pwleak_cli::run(std::env::args_os()));
}
