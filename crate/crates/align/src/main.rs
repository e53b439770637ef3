fn main() {
    std::process::exit(comptex_align::cli::run(std::env::args_os()));
}
