fn main() {
    std::process::exit(roughwall_cli::run(std::env::args_os(), &mut std::io::stdout()));
}
