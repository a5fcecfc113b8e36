fn main() {
    std::process::exit(criteria_service::cli::main(std::env::args_os()));
}
