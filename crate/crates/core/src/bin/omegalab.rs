fn main() {
    std::process::exit(omegalab::cli::run(std::env::args_os()));
}
