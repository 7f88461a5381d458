fn main() {
    std::process::exit(pellip_cli::main_with_args(std::env::args_os()));
}
