fn main() {
    std::process::exit(parm::cli::run());
}
