fn main() {
    std::process::exit(liouvillian::cli::run(std::env::args_os()));
}
