use std::path::PathBuf;

use heffter::construct::{construct, Class};
use heffter::grid::Axis;
use heffter::io;
use heffter::verify::{
    check_sums, diagonal_bands, is_globally_simple, is_heffter, shifted_sum_table, Detail, SumMode,
};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

fn sum_table(name: &str) -> Vec<(String, Vec<i64>)> {
    read_fixture(name)
        .lines()
        .map(|line| {
            let mut fields = line.split(',');
            let label = fields.next().unwrap().to_string();
            (label, fields.map(|f| f.parse().unwrap()).collect())
        })
        .collect()
}

fn assert_table(n: usize, axis: Axis, class: Class, name: &str) {
    let array = construct(n, 17).unwrap();
    let traces = shifted_sum_table(&array, axis, class).unwrap();
    let expected = sum_table(name);
    assert_eq!(traces.len(), expected.len());
    for (trace, (label, sums)) in traces.iter().zip(&expected) {
        assert_eq!(&trace.label(), label);
        assert_eq!(&trace.sums, sums, "{label}");
    }
}

#[test]
fn h19_17_matches_table() {
    let built = construct(19, 17).unwrap();
    let text = read_fixture("h19_17.csv");
    assert_eq!(io::from_csv(&text).unwrap(), built);
    assert_eq!(io::to_csv(&built), text);
    assert_eq!(built.len(), 323);
    assert!(io::to_csv(&built).starts_with("18,93,,311,"));
}

#[test]
fn h20_17_matches_table() {
    let built = construct(20, 17).unwrap();
    let text = read_fixture("h20_17.csv");
    assert_eq!(io::from_csv(&text).unwrap(), built);
    assert_eq!(io::to_csv(&built), text);
    assert_eq!(built.len(), 340);
    assert_eq!(built.get(19, 1), Some(-40));
    assert_eq!(built.get(19, 9), Some(35));
    assert_eq!(built.get(19, 10), Some(100));
}

#[test]
fn h19_17_column_sums() {
    assert_table(19, Axis::Column, Class::N3, "h19_17_col_sums.csv");
}

#[test]
fn h19_17_row_sums() {
    assert_table(19, Axis::Row, Class::N3, "h19_17_row_sums.csv");
}

#[test]
fn h20_17_column_sums() {
    assert_table(20, Axis::Column, Class::N0, "h20_17_col_sums.csv");
}

#[test]
fn h20_17_row_sums() {
    assert_table(20, Axis::Row, Class::N0, "h20_17_row_sums.csv");
}

#[test]
fn spot_values_from_tables() {
    let cols = sum_table("h19_17_col_sums.csv");
    assert_eq!(cols[18].1[14..], [2, 608, 0]);
    let rows = sum_table("h20_17_row_sums.csv");
    assert_eq!(rows[19].1[..3], [166, 2, 240]);
    assert_eq!(rows[19].1[15..], [99, 0]);
}

#[test]
fn wrong_class_convention_is_rejected() {
    let array = construct(19, 17).unwrap();
    assert!(shifted_sum_table(&array, Axis::Row, Class::N0).is_err());
    assert!(shifted_sum_table(&array, Axis::Column, Class::N0).is_err());
}

#[test]
fn example_h8_6_is_heffter_but_not_globally_simple() {
    let array = io::from_csv(&read_fixture("h8_6.csv")).unwrap();
    assert!(is_heffter(&array, SumMode::Modular));
    assert!(check_sums(&array, SumMode::Integer).ok);
    let report = is_globally_simple(&array);
    assert!(report.is_heffter());
    assert!(!report.globally_simple);
    let first = report
        .witnesses_where(|d| matches!(d, Detail::RepeatedPartialSum { .. }))
        .next()
        .unwrap();
    assert_eq!(first.axis, Some(Axis::Row));
    assert_eq!(first.index, 1);
    assert_eq!(first.detail, Detail::RepeatedPartialSum { position: 3, residue: -1 });
    assert_eq!(first.to_string(), "row 1: repeated partial sum -1 (at position 4)");
}

#[test]
fn json_fixture_agrees_with_csv_fixture() {
    let json = io::read_array(&fixture("h8x6.json")).unwrap();
    let csv = io::read_array(&fixture("h8_6.csv")).unwrap();
    assert_eq!(json, csv);
}

#[test]
fn worked_examples_have_two_bands() {
    let b = diagonal_bands(&construct(19, 17).unwrap());
    assert_eq!(b.occupied(), 17);
    assert!(b.full_diagonals());
    assert_eq!(b.occupied_runs.len(), 2);
    assert_eq!(b.empty_runs, vec![1, 1]);

    let b = diagonal_bands(&construct(20, 17).unwrap());
    assert_eq!(b.occupied(), 17);
    let mut gaps = b.empty_runs.clone();
    gaps.sort();
    assert_eq!(gaps, vec![1, 2]);
}
