fn main() {
    std::process::exit(qpsi_harness::cli::main_from_env());
}
