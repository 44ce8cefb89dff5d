fn main() {
    std::process::exit(revigis::cli::run(std::env::args_os()));
}
