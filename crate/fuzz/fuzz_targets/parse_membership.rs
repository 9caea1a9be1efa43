#![no_main]

use libfuzzer_sys::fuzz_target;
use wkmodes::cli::files::parse_membership;
use wkmodes::clustering_accuracy;

fuzz_target!(|data: &[u8]| {
    if let Ok(membership) = parse_membership(data) {
        let k = membership.iter().max().map_or(0, |&l| l as usize + 1);
        if k <= 1 << 16 {
            let labels = vec![0; membership.len()];
            let report = clustering_accuracy(&membership, &labels, k, 1).unwrap();
            assert_eq!(report.accuracy, 1.0);
        }
    }
});
