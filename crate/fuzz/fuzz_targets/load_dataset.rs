#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(ds) = deptree::load_dataset(data) {
        assert!(ds.n_samples() >= 2 && ds.n_columns() >= 2);
        assert!(ds.columns().iter().flatten().all(|v| v.is_finite()));
        let mut out = Vec::new();
        ds.write_csv(&mut out).unwrap();
        assert_eq!(deptree::load_dataset(out.as_slice()).unwrap(), ds);
    }
});
