fn main() {
    std::process::exit(vpmax::cli::main_with(std::env::args_os()));
}
