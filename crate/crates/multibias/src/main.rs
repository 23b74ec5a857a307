fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(multibias::cli::run_command(&args[1..]));
}
