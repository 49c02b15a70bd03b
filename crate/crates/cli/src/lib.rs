//! The `tracegrow` command-line tool.

pub mod args;
pub mod commands;
pub mod error;
pub mod io;

pub use args::{Cli, Command};
pub use error::CliError;

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Refine(a) => commands::refine_cmd(a),
        Command::Rasterize(a) => commands::rasterize_cmd(a),
        Command::Eval(a) => commands::eval_cmd(a),
        Command::Score(a) => commands::score_cmd(a),
        Command::Consensus(a) => commands::consensus_cmd(a),
        Command::Serve(a) => commands::serve_cmd(a),
    }
}
