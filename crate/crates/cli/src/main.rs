fn main() {
    std::process::exit(decay_cli::run(std::env::args_os().skip(1)));
}
