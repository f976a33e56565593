fn main() {
    std::process::exit(rotspec_cli::main_with_args(std::env::args_os()));
}
