fn main() {
    std::process::exit(d4qms::cli::main_with_args(std::env::args_os()));
}
