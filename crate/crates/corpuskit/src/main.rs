fn main() {
    std::process::exit(corpuskit::cli::main_with_args(std::env::args_os()));
}
