fn main() {
    std::process::exit(qcfa::cli::main_with_args(std::env::args_os()));
}
