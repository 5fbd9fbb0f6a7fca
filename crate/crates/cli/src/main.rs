fn main() {
    std::process::exit(floquet_tls_cli::main_with_args(std::env::args_os()));
}
