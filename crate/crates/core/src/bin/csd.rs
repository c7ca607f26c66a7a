fn main() {
    std::process::exit(swiss_csd::cli::run(std::env::args_os()));
}
