use std::path::PathBuf;

use clap::Parser;

use qkz_cli::{run, Options, Suite};

/// Exact verification of R-matrix identities and quantum KZ connections.
#[derive(Parser, Debug)]
#[command(name = "qkz", version)]
struct Args {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Suite to run instead of the configured one.
    #[arg(long, value_enum)]
    suite: Option<Suite>,
    /// Report path; the text summary goes next to it with a `.txt` extension.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    /// Truncation order replacing the configured `D`.
    #[arg(long = "d-override")]
    d_override: Option<usize>,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let a = Args::parse();
    let opts = Options {
        config: a.config,
        suite: a.suite,
        out: a.out,
        jobs: a.jobs,
        d_override: a.d_override,
        cache_dir: std::env::var_os("QKZ_CACHE_DIR").map(PathBuf::from),
    };
    std::process::exit(run(&opts));
}
