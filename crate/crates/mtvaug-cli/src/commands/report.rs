//! `mtvaug report`: regenerate aggregates from a stored runs.csv.

use mtvaug::experiment::regenerate_report;

use crate::{CliResult, ReportArgs};

pub fn run(args: ReportArgs) -> CliResult<()> {
    regenerate_report(&args.runs, &args.out)?;
    println!("report written to {}", args.out.display());
    Ok(())
}
