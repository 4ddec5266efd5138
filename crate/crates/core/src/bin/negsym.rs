fn main() {
    std::process::exit(negsym::cli::run_from(std::env::args_os()));
}
