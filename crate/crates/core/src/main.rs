fn main() {
    std::process::exit(endscope::cli::run(std::env::args_os()));
}
