fn main() -> std::process::ExitCode {
    rne_rescue::cli::main()
}
