fn main() {
    std::process::exit(flagtri::cli::main_with_args(std::env::args_os()));
}
