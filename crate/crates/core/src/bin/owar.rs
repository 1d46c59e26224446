fn main() {
    std::process::exit(owar::cli::run(std::env::args_os()));
}
