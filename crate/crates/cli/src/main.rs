fn main() {
    std::process::exit(cftray::run(std::env::args_os()));
}
