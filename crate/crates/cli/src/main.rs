fn main() {
    std::process::exit(ccc_cli::main_with_args(std::env::args_os()));
}
