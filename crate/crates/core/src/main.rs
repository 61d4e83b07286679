fn main() {
    std::process::exit(green_radio::cli::main_with_env());
}
