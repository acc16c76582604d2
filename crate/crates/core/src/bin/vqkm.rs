fn main() {
    std::process::exit(vqkm::cli::run(std::env::args_os()));
}
