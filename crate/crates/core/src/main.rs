fn main() {
    std::process::exit(bazverify::cli::parse_and_dispatch(std::env::args()));
}
