fn main() {
    std::process::exit(dirnet_cli::run(std::env::args_os()));
}
