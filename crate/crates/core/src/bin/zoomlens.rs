fn main() {
    std::process::exit(zoomlens::cli::main_with_args(std::env::args_os()));
}
