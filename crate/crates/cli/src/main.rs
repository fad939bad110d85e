fn main() {
    std::process::exit(grushin_cli::run(std::env::args_os().skip(1)));
}
