#![no_main]

use libfuzzer_sys::fuzz_target;
use wkmodes::cli::files;
use wkmodes::{ColumnRef, MissingValues, TableFormat, WeightingSchema};

// Every small text grammar of the command line.
fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    let _ = files::parse_data_spec(s, &TableFormat::default());
    let _ = files::parse_schema_list(s);
    let _ = files::parse_count_list(s);
    let _ = files::parse_class_column(s);
    let _ = files::parse_delimiter(s);
    let _ = s.parse::<ColumnRef>();
    let _ = s.parse::<MissingValues>();
    if let Ok(schema) = s.parse::<WeightingSchema>() {
        assert_eq!(schema.name().parse::<WeightingSchema>().unwrap(), schema);
    }
});
