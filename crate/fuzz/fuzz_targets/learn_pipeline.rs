#![no_main]

use deptree::{learn_with_weights, load_dataset, LearnOptions, Measure, TieBreak};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&selector, csv)) = data.split_first() else {
        return;
    };
    let Ok(ds) = load_dataset(csv) else {
        return;
    };
    if ds.n_samples() > 2000 || ds.n_columns() > 24 {
        return;
    }
    let measure = [Measure::RhoAbs, Measure::MiCell, Measure::MiKde][usize::from(selector % 3)];
    let opts = LearnOptions {
        measure,
        lattice_order: None,
        ties: TieBreak::Shuffled { seed: u64::from(selector) },
    };
    if let Ok((tree, w)) = learn_with_weights(&ds, &opts) {
        assert_eq!(tree.edges.len() + 1, ds.n_columns());
        tree.validate(&w).unwrap();
        assert!(tree.coverage_ratio > 0.0 && tree.coverage_ratio <= 1.0 + 1e-12);
    }
});
