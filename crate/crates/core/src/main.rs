fn main() {
    std::process::exit(matgroup::app::cli_main(std::env::args_os()));
}
