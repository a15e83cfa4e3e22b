fn main() {
    std::process::exit(clusterbell::cli::run(std::env::args_os()));
}
