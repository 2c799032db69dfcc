fn main() {
    std::process::exit(rentsim::cli::run(std::env::args_os()));
}
