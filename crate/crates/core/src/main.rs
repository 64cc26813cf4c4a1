fn main() {
    std::process::exit(irrarray::cli::run(std::env::args_os()));
}
