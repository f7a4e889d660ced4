fn main() {
    std::process::exit(fresnel_tomo::cli::run(std::env::args_os()));
}
