fn main() {
    std::process::exit(melcert::cli::run());
}
