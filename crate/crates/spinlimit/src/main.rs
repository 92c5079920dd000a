fn main() {
    std::process::exit(spinlimit::cli::run(std::env::args_os()));
}
