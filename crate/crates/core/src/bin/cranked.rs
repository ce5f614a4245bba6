fn main() {
    std::process::exit(cranked::cli::app::main_with_args(std::env::args_os()));
}
