fn main() {
    std::process::exit(vortex_mf::cli::main_with_args(std::env::args_os()));
}
