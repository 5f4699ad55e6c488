fn main() {
    std::process::exit(maxcut_select::pipeline::cli::run(std::env::args_os()));
}
