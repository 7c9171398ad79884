fn main() {
    std::process::exit(tongues::cli::run(std::env::args_os()));
}
