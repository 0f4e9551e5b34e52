fn main() {
    std::process::exit(ricci_af::cli::run(std::env::args_os()));
}
