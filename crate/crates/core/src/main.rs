fn main() {
    std::process::exit(marginal_udp::cli::run(std::env::args_os()));
}
