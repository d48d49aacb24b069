fn main() {
    std::process::exit(dqls::cli::main_with_args(std::env::args_os()));
}
