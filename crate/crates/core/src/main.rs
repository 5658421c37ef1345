fn main() {
    std::process::exit(mqsobolev::cli::run(std::env::args_os()));
}
