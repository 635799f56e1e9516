fn main() {
    std::process::exit(cylklrw_cli::run(std::env::args_os()));
}
