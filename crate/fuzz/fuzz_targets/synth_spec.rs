#![no_main]

use libfuzzer_sys::fuzz_target;

// Parsing and validation only; generation is bounded by `samples`, which a
// fuzzer would happily set to billions.
fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(spec) = deptree::SynthSpec::from_json(text) {
            assert_eq!(spec.correlation_matrix().len(), spec.dim());
        }
    }
});
