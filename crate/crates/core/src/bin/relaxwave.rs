fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter("RELAXWAVE_LOG")).init();
    std::process::exit(relaxwave::cli::main_with_args(std::env::args_os()));
}
