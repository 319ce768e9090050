fn main() {
    std::process::exit(batman::cli::dispatch(std::env::args_os()));
}
