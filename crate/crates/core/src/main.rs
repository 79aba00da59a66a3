fn main() {
    std::process::exit(telesigma::cli::run(std::env::args_os()));
}
