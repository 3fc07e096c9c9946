fn main() {
    std::process::exit(gxwt_cli::run(std::env::args_os()));
}
