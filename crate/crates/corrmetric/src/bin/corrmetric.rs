fn main() {
    std::process::exit(corrmetric::cli::run(std::env::args_os()));
}
