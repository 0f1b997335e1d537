fn main() {
    std::process::exit(fock_lattice::cli::main());
}
