use clap::Parser;
use evfront_cli::{cmd_estimate, cmd_gen, cmd_pickands_plot, cmd_select_k, cmd_simulate, Command};

/// Monotone production frontier estimation from input/output data:
/// FDH and order-statistic frontiers, conditional tail-index estimates,
/// normal confidence intervals, threshold diagnostics and Monte Carlo
/// experiments.
#[derive(Parser)]
#[command(name = "evfront", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Estimate(args) => cmd_estimate(args),
        Command::SelectK(args) => cmd_select_k(args),
        Command::PickandsPlot(args) => cmd_pickands_plot(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Gen(args) => cmd_gen(args),
    };
    if let Err(e) = result {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
