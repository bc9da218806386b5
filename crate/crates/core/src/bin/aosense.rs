fn main() -> std::process::ExitCode {
    aosense::cli::main()
}
