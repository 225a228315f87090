fn main() {
    std::process::exit(tfe10::cli::run(std::env::args_os()));
}
