fn main() {
    std::process::exit(hprop::cli::run(std::env::args_os()));
}
