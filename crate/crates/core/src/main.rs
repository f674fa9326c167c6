fn main() -> std::process::ExitCode {
    qpol::cli::main()
}
