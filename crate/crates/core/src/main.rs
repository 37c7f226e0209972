fn main() {
    std::process::exit(kirchhoff_core::cli::run(std::env::args_os()));
}
