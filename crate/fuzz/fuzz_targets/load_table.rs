#![no_main]

use libfuzzer_sys::fuzz_target;
use wkmodes::{load_table, ColumnRef, MissingValues, TableFormat};

// First byte picks the layout, the rest is the file.
fuzz_target!(|data: &[u8]| {
    let Some((&mode, body)) = data.split_first() else {
        return;
    };
    let mut format = TableFormat {
        delimiter: [',', '\t', ';', ' '][(mode & 3) as usize],
        ..TableFormat::default()
    };
    format.class_column = match (mode >> 2) & 3 {
        0 => None,
        1 => Some(ColumnRef::Index(0)),
        2 => Some(ColumnRef::Last),
        _ => Some(ColumnRef::Index(((mode >> 4) & 7) as usize)),
    };
    if mode & 0x40 != 0 {
        format.skip_columns.push(ColumnRef::Index(1));
    }
    if mode & 0x80 != 0 {
        format.missing = MissingValues::DropRows;
    }
    if let Ok(ds) = load_table(body, &format) {
        let data = &ds.data;
        assert!(data.n() > 0);
        for i in 0..data.n() {
            for (j, &v) in data.row(i).iter().enumerate() {
                assert!((v as usize) < data.schema().cardinality(j));
            }
        }
        if let Some(labels) = &ds.labels {
            assert_eq!(labels.len(), data.n());
        }
        let _ = data.prefix(data.n() / 2 + 1);
    }
});
