fn main() {
    std::process::exit(approxlat::cli::main_with_args(std::env::args_os()));
}
