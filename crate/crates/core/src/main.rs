fn main() {
    std::process::exit(molab::cli::run(std::env::args_os()));
}
