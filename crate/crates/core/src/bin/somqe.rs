fn main() {
    std::process::exit(somqe::cli::main(std::env::args_os()));
}
