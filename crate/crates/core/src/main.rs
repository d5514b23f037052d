fn main() {
    std::process::exit(fracwave::cli::main_with(std::env::args_os()));
}
