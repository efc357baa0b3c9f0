fn main() {
    std::process::exit(bshadow::cli::main_with_args(std::env::args_os()));
}
