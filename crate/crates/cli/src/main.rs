fn main() {
    std::process::exit(dunkl_fpe_cli::run_from_args(std::env::args_os()));
}
