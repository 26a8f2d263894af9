fn main() {
    std::process::exit(birkhoff_core::cli::main_with_args(std::env::args_os()));
}
