fn main() {
    std::process::exit(mbti_core::cli::run(std::env::args_os()));
}
