use clap::Parser;

fn main() -> anyhow::Result<()> {
    motive::cli::run(motive::cli::Cli::parse())
}
