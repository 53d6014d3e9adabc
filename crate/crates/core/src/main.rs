fn main() {
    std::process::exit(aitax::cli::run(std::env::args_os()));
}
