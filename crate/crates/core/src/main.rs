fn main() -> std::process::ExitCode {
    siegel_hecke::cli::main()
}
