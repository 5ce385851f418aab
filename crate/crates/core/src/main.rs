fn main() {
    std::process::exit(regacts::cli::main_with(std::env::args_os()));
}
