fn main() -> std::process::ExitCode {
    azqsl::cli::main()
}
