fn main() {
    std::process::exit(pauli_volume::cli::run(std::env::args_os()));
}
