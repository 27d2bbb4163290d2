fn main() {
    std::process::exit(thue_mahler::cli::run(std::env::args_os()));
}
