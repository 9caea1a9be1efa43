fn main() -> std::process::ExitCode {
    wkmodes::cli::main()
}
