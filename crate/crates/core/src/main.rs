fn main() {
    std::process::exit(baseparam::cli::run(std::env::args_os()));
}
