
use faithful::criteria::{obs2_qubit_faithful, ppt_check};
use faithful::harness::{run_table, FaithfulnessVerdict as V, TableConfig};
use faithful::states::{Measure, SamplerConfig};

#[test]
fn rows_are_byte_identical_across_runs_and_workers() {
    let mut cfg = TableConfig::new(Measure::HilbertSchmidt, 3, 60, 21);
    cfg.audit_every = 7;
    let one = run_table(&cfg).unwrap();
    cfg.workers = 3;
    let three = run_table(&cfg).unwrap();
    let again = run_table(&cfg).unwrap();
    let bytes = |r| serde_json::to_vec(r).unwrap();
    assert_eq!(bytes(&one), bytes(&three));
    assert_eq!(bytes(&three), bytes(&again));
    assert_eq!(one.to_csv(), three.to_csv());
}

#[test]
fn qubit_table_matches_direct_counts() {
    let n = 2000;
    let row = run_table(&TableConfig::new(Measure::Bures, 2, n, 5)).unwrap();
    let sampler = SamplerConfig::new(Measure::Bures, 2, 5).unwrap();
    let (mut ppt, mut faithful) = (0, 0);
    for i in 0..n as u64 {
        let st = sampler.sample(i).unwrap();
        if ppt_check(&st).unwrap().is_satisfied() {
            ppt += 1;
        } else if obs2_qubit_faithful(&st).unwrap().is_violated() {
            faithful += 1;
        }
    }
    assert_eq!(row.count(V::PptUnfaithful), ppt);
    assert_eq!(row.count(V::Faithful3c), faithful);
    assert_eq!(row.count(V::Unfaithful3a), n - ppt - faithful);
}

#[test]
fn fractions_sum_to_one_with_binomial_errors() {
    let row = run_table(&TableConfig::new(Measure::Bures, 3, 120, 8)).unwrap();
    assert!((row.fractions.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    for (f, e) in row.fractions.iter().zip(&row.stderr) {
        assert!((e - (f * (1.0 - f) / 120.0).sqrt()).abs() <= 1e-15);
    }
    assert_eq!(row.diagnostics.consistency_exceptions, 0);
    assert_eq!(row.diagnostics.bound_chain_violations, 0);
}
