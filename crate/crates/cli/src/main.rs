fn main() {
    std::process::exit(powerfpp_cli::run_command(std::env::args_os()));
}
