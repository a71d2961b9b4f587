// Driving the command-line front end from code.

use hprop::cli::{execute, Cli, Config};
use clap::Parser;

pub fn run_example() -> hprop::Result<()> {
    let cli = Cli::try_parse_from(["hprop", "rederr", "--dims", "2,3", "--kmax", "10,20"])
        .map_err(|e| hprop::Error::Parse(e.to_string()))?;
    let config = Config::resolve(cli.command, cli.flags)?;
    print!("{}", execute(&config)?.table.render());
    Ok(())
}

#[allow(dead_code)]
fn main() -> hprop::Result<()> {
    run_example()
}
