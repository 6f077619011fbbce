fn main() {
    std::process::exit(ppkit::cli::run(std::env::args_os()));
}
