fn main() -> std::process::ExitCode {
    blackstock::cli::main()
}
