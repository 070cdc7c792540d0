fn main() {
    std::process::exit(picscore::cli::main_with_args(std::env::args_os()));
}
