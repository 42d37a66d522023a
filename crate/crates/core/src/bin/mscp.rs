// SPDX-License-Identifier: MIT OR Apache-2.0

use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    if let Err(e) = mscp::cli::run(mscp::cli::Cli::parse()) {
        eprintln!("mscp: {e}");
        std::process::exit(e.exit_code());
    }
}
