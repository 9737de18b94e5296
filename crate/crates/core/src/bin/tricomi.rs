fn main() {
    std::process::exit(tricomi::cli::parse_and_dispatch(std::env::args_os()));
}
