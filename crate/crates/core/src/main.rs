fn main() -> std::process::ExitCode {
    abcd::cli::main()
}
