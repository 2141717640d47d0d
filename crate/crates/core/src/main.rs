fn main() {
    std::process::exit(sphere_paradox::cli::run(std::env::args_os()));
}
