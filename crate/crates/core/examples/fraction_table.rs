//! Monte Carlo verdict fractions for random states.
//!
//! cargo run --release --example fraction_table -- [bures|hs] [d] [n] [seed]

use faithful::harness::{run_table, FaithfulnessVerdict, TableConfig};
use faithful::states::Measure;

fn main() -> faithful::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let measure: Measure = args.first().map_or(Ok(Measure::Bures), |s| s.parse())?;
    let d = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let n = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(500);
    let seed = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(1);

    let mut cfg = TableConfig::new(measure, d, n, seed);
    cfg.workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let row = run_table(&cfg)?;

    for v in FaithfulnessVerdict::ALL {
        println!("{:>10}  {:6.2}% +- {:.2}", v.column(), 100.0 * row.fraction(v), 100.0 * row.stderr_of(v));
    }
    println!("unfaithful {:.2}%  faithful {:.2}%", 100.0 * row.unfaithful_fraction(), 100.0 * row.faithful_fraction());
    print!("{}", row.to_csv());
    Ok(())
}
