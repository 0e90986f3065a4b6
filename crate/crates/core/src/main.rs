use std::process::ExitCode;

use basins::basin_engine::Outcome;
use basins::cli_io::{parse_config, run};
use basins::Error;

fn main() -> ExitCode {
    let config = match parse_config(std::env::args_os()) {
        Ok(c) => c,
        Err(Error::Usage(e)) => e.exit(),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let summary = match run(&config) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let img = &summary.image;
    let frac = |p: fn(Outcome) -> bool| img.outcome_fraction(p);
    println!(
        "engine {} on {}x{} pixels",
        config.engine.name(),
        img.width,
        img.height
    );
    println!("converged {:.4}", frac(|o| matches!(o, Outcome::Root(_))));
    println!("critical {:.4}", frac(|o| o == Outcome::NonRootCritical));
    println!("diverged {:.4}", frac(|o| o == Outcome::Diverged));
    println!("exhausted {:.4}", frac(|o| o == Outcome::Exhausted));
    println!("failed {:.4}", frac(|o| o == Outcome::Failed));
    println!("black {:.4}", img.black_fraction());
    if let Some((all, non_black)) = summary.mismatch {
        println!("mismatch {all:.6}");
        println!("mismatch_non_black {non_black:.6}");
    }
    ExitCode::SUCCESS
}
