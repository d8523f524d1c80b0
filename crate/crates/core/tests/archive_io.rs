use std::io::Write;

use splitswarm::archive::{
    extend_archive, load_archive, read_csv, read_json, select_group, write_csv, write_json, ArchiveError, InputFormat,
    RecordProblem, PREDICTION_NAME,
};
use splitswarm::model::SplitVector;
use splitswarm::stats::archive_correlation;

const PRO_TOP5: &str = include_str!("../fixtures/pro_top5.csv");

#[test]
fn csv_file_to_json_file_and_back() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("t.csv");
    std::fs::write(&csv_path, PRO_TOP5).unwrap();
    let from_csv = load_archive(&csv_path, InputFormat::from_path(&csv_path)).unwrap();

    let json_path = dir.path().join("t.json");
    write_json(&from_csv.records, std::fs::File::create(&json_path).unwrap()).unwrap();
    assert_eq!(InputFormat::from_path(&json_path), InputFormat::Json);
    let from_json = load_archive(&json_path, InputFormat::Json).unwrap();
    assert_eq!(from_json.records, from_csv.records);
}

#[test]
fn invalid_rows_are_skipped_and_counted() {
    let text = "\
name,nation,category,place,swim,t1,bike,t2,run,overall
A,AUS,M25-29,1,30:00,2:00,2:30:00,2:00,1:30:00,4:34:00
B,AUS,M25-29,2,30:xx,2:00,2:30:00,2:00,1:30:00,4:34:00
C,AUS,M25-29,3,30:00,2:00,2:30:00,2:00,1:30:00,4:44:00
D,AUS,M25-29,4,31:00,2:00,2:31:00,2:00,1:31:00,4:37:00
";
    let loaded = read_csv(text.as_bytes()).unwrap();
    assert_eq!(loaded.records.len(), 2);
    assert_eq!(loaded.skip_count(), 2);
    assert_eq!(loaded.skipped[0].row, 2);
    assert!(matches!(
        loaded.skipped[0].problem,
        RecordProblem::Time { column: "swim", .. }
    ));
    assert!(matches!(
        loaded.skipped[1].problem,
        RecordProblem::OverallMismatch { .. }
    ));
}

#[test]
fn missing_file_is_an_io_error() {
    let err = load_archive(std::path::Path::new("/nonexistent/x.csv"), InputFormat::Csv).unwrap_err();
    assert!(matches!(err, ArchiveError::Io { .. }));
}

#[test]
fn json_places_are_integers() {
    let loaded = read_csv(PRO_TOP5.as_bytes()).unwrap();
    let mut out = Vec::new();
    write_json(&loaded.records, &mut out).unwrap();
    let value: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert!(value[0]["place"].is_u64());
    assert_eq!(read_json(out.as_slice()).unwrap().records, loaded.records);
}

#[test]
fn group_selection_then_extension() {
    let loaded = read_csv(PRO_TOP5.as_bytes()).unwrap();
    let top3 = select_group(&loaded.records, " pro-m ", 3).unwrap();
    assert_eq!(top3.len(), 3);
    assert_eq!(top3.records()[2].athlete_name, "Fredrik Croneborg");

    let x = SplitVector::from_minutes([25.0, 1.0, 108.0, 1.0, 84.0]).unwrap();
    let ext = extend_archive(&top3, &x);
    let last = ext.records().last().unwrap();
    assert_eq!(last.athlete_name, PREDICTION_NAME);
    assert_eq!(last.finish_place, 4);
    assert!(archive_correlation(&ext).is_ok());
    assert_eq!(top3.len(), 3);

    let err = select_group(&loaded.records, "F30-34", 3).unwrap_err();
    assert!(matches!(err, ArchiveError::GroupTooSmall { found: 0, .. }));
}

#[test]
fn written_csv_reloads_from_disk() {
    let loaded = read_csv(PRO_TOP5.as_bytes()).unwrap();
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write_csv(&loaded.records, &mut file).unwrap();
    file.flush().unwrap();
    let again = load_archive(file.path(), InputFormat::Csv).unwrap();
    assert_eq!(again.records.len(), 5);
    assert!(again.skipped.is_empty());
}
