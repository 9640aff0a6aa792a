fn main() {
    std::process::exit(cutproject_cli::run_command(std::env::args_os()));
}
