fn main() -> std::process::ExitCode {
    lnq::cli::main()
}
