fn main() -> std::process::ExitCode {
    cauchy_constellations::cli::main_entry()
}
