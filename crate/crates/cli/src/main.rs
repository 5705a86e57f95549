fn main() {
    let threads = std::env::var(zenoberry_cli::THREADS_ENV).ok();
    std::process::exit(zenoberry_cli::main_with(std::env::args_os(), threads.as_deref()));
}
