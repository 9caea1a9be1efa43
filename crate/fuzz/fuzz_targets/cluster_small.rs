#![no_main]

use libfuzzer_sys::fuzz_target;
use wkmodes::{run, EncodedDataset, RunConfig, WeightingSchema};

// Bytes become a tiny code matrix; every schema must either reject it or
// return a full partition with no empty cluster.
fuzz_target!(|data: &[u8]| {
    if data.len() < 3 {
        return;
    }
    let m = (data[0] % 4) as usize + 1;
    let k = (data[1] % 4) as usize + 1;
    let seed = data[2] as u64;
    let rows: Vec<Vec<u32>> = data[3..]
        .chunks_exact(m)
        .take(40)
        .map(|c| c.iter().map(|&b| (b % 5) as u32).collect())
        .collect();
    let Ok(ds) = EncodedDataset::from_codes(&rows) else {
        return;
    };
    for schema in WeightingSchema::ALL {
        if let Ok(result) = run(&ds, &RunConfig::new(k, schema).with_seed(seed).with_max_iterations(20)) {
            assert_eq!(result.membership.len(), ds.n());
            assert!(result.membership.cluster_sizes(k).iter().all(|&s| s > 0));
            assert!(result.objective_trace.iter().all(|p| p.is_finite()));
        }
    }
});
