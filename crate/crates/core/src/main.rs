use tracing_subscriber::EnvFilter;

fn main() {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("warn")))
        .with_writer(std::io::stderr)
        .init();
    let stdout = std::io::stdout();
    let code = rovclass::cli::run(std::env::args_os(), &mut stdout.lock());
    std::process::exit(code);
}
