fn main() {
    std::process::exit(kls_cli::main_with_args(std::env::args_os()));
}
