fn main() {
    std::process::exit(percolab_cli::run(std::env::args_os()));
}
