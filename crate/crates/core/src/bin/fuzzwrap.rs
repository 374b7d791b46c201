fn main() -> std::process::ExitCode {
    fuzzwrap::cli::run()
}
