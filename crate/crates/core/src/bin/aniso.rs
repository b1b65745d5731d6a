fn main() {
    std::process::exit(aniso::cli::main_with_args(std::env::args_os()));
}
