fn main() {
    let code = starspec_cli::dispatch(std::env::args().collect());
    std::process::exit(code);
}
