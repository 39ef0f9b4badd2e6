fn main() {
    std::process::exit(transitmesh::cli::run(std::env::args_os()));
}
