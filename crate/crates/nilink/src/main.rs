fn main() -> std::process::ExitCode {
    nilink::cli::main()
}
