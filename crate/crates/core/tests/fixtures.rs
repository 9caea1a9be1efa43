mod common;

use common::data_path;
use wkmodes::*;

fn voting_format() -> TableFormat {
    TableFormat::default().with_class_column(ColumnRef::Index(0))
}

fn breast_format() -> TableFormat {
    TableFormat::default()
        .with_class_column(ColumnRef::Last)
        .with_skip_columns([ColumnRef::Index(0)])
}

#[test]
fn voting_shape() {
    let ds = load_path(data_path("house-votes-84.data"), &voting_format()).unwrap();
    assert_eq!((ds.data.n(), ds.data.m()), (435, 16));
    let labels = ds.labels.unwrap();
    assert_eq!(labels.class_count(), 2);
    let mut sizes = labels.class_sizes();
    sizes.sort_unstable();
    assert_eq!(sizes, vec![168, 267]);
    // y, n and the missing marker.
    assert!(ds.data.schema().cardinalities().iter().all(|&p| (2..=3).contains(&p)));
}

#[test]
fn breast_cancer_shape() {
    let ds = load_path(data_path("breast-cancer-wisconsin.data"), &breast_format()).unwrap();
    assert_eq!((ds.data.n(), ds.data.m()), (699, 9));
    let labels = ds.labels.unwrap();
    let mut sizes = labels.class_sizes();
    sizes.sort_unstable();
    assert_eq!(sizes, vec![241, 458]);
    let bare = ds.data.schema().dictionary(5);
    assert!(bare.encode("?").is_some());
}

#[test]
fn dropping_missing_rows() {
    let format = breast_format().with_missing("?", MissingValues::DropRows);
    let ds = load_path(data_path("breast-cancer-wisconsin.data"), &format).unwrap();
    assert_eq!(ds.data.n(), 683);
    let voting = load_path(
        data_path("house-votes-84.data"),
        &voting_format().with_missing("?", MissingValues::DropRows),
    )
    .unwrap();
    assert_eq!(voting.data.n(), 232);
}

#[test]
fn single_cluster_scores_the_majority_share() {
    let ds = load_path(data_path("house-votes-84.data"), &voting_format()).unwrap();
    let result = run(&ds.data, &RunConfig::new(1, WeightingSchema::Unit)).unwrap();
    let labels = ds.labels.unwrap();
    let report = clustering_accuracy(result.membership.as_slice(), labels.ids(), 1, 2).unwrap();
    assert_eq!(report.accuracy, 267.0 / 435.0);
}

#[test]
fn every_schema_clusters_the_fixtures() {
    for (file, format) in [
        ("house-votes-84.data", voting_format()),
        ("breast-cancer-wisconsin.data", breast_format()),
    ] {
        let ds = load_path(data_path(file), &format).unwrap();
        for schema in WeightingSchema::ALL {
            for seed in 0..3 {
                let result = run(&ds.data, &RunConfig::new(2, schema).with_seed(seed)).unwrap();
                assert_eq!(result.membership.len(), ds.data.n());
                assert!(result.membership.cluster_sizes(2).iter().all(|&s| s > 0));
                assert!(result.objective_trace.iter().all(|p| p.is_finite() && *p >= 0.0));
            }
        }
    }
}
