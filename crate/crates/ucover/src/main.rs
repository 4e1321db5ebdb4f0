fn main() {
    std::process::exit(ucover::cli::run(std::env::args_os()));
}
