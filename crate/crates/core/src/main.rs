fn main() {
    std::process::exit(fiducial_survival::cli::dispatch(std::env::args_os()));
}
