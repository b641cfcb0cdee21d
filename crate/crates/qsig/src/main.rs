fn main() {
    std::process::exit(qsig::cli::main());
}
