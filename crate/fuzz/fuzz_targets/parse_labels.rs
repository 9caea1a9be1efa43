#![no_main]

use libfuzzer_sys::fuzz_target;
use wkmodes::cli::files::parse_labels;

fuzz_target!(|data: &[u8]| {
    if let Ok(labels) = parse_labels(data) {
        assert!(labels.ids().iter().all(|&c| (c as usize) < labels.class_count()));
        assert_eq!(labels.class_sizes().iter().sum::<usize>(), labels.len());
    }
});
