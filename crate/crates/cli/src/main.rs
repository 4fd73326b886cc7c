fn main() {
    std::process::exit(diskeig_cli::run(std::env::args_os()));
}
