fn main() {
    std::process::exit(gavel::cli::run(std::env::args_os()));
}
