use std::fs;
use std::path::PathBuf;

use bsfill_core::io::{ingest_samples, write_samples, SampleFormat};
use bsfill_core::math::haar_random_unitary;
use bsfill_core::samplers::{InputState, Sampler};
use bsfill_core::Error;

fn file(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn occupation_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = file(&dir, "occ.txt", "# lab dump\n0 1 0 1\n");
    let (set, report) = ingest_samples(&path, SampleFormat::Occupation, 4, 2).unwrap();
    assert_eq!(set.samples()[0].counts(), &[0, 1, 0, 1]);
    assert_eq!(report.duplicates, 0);
}

#[test]
fn mode_list_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = file(&dir, "ml.txt", "#format=mode-list m=4 n=2\n2 4\n4 1\n");
    let (set, _) = ingest_samples(&path, SampleFormat::ModeList, 4, 2).unwrap();
    assert_eq!(set.samples()[0].counts(), &[0, 1, 0, 1]);
    assert_eq!(set.samples()[1].counts(), &[1, 0, 0, 1]);
    assert!(set.meta().collision_free);
}

#[test]
fn repeated_lines_are_counted() {
    let dir = tempfile::tempdir().unwrap();
    let path = file(&dir, "dup.txt", "1 2\n3 4\n2 1\n1 2\n");
    let (set, report) = ingest_samples(&path, SampleFormat::ModeList, 4, 2).unwrap();
    assert_eq!(set.len(), 2);
    assert_eq!(report.duplicates, 2);
    assert_eq!(report.lines, 4);
}

#[test]
fn errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("short.txt", "0 1 0 1\n0 1 1\n", SampleFormat::Occupation, 2),
        ("total.txt", "# h\n0 1 0 1\n\n1 1 1 0\n", SampleFormat::Occupation, 4),
        ("range.txt", "1 5\n", SampleFormat::ModeList, 1),
        ("word.txt", "1 2\n1 two\n", SampleFormat::ModeList, 2),
    ];
    for (name, text, format, line) in cases {
        match ingest_samples(&file(&dir, name, text), format, 4, 2) {
            Err(Error::Parse { line: got, .. }) => assert_eq!(got, line, "{name}"),
            other => panic!("{name}: {other:?}"),
        }
    }
    assert!(matches!(
        ingest_samples(&file(&dir, "empty.txt", "# nothing\n\n"), SampleFormat::Occupation, 4, 2),
        Err(Error::Parse { .. })
    ));
    assert!(matches!(
        ingest_samples(&dir.path().join("missing.txt"), SampleFormat::Occupation, 4, 2),
        Err(Error::Io { .. })
    ));
}

#[test]
fn written_sets_are_read_back_identically() {
    let dir = tempfile::tempdir().unwrap();
    let u = haar_random_unitary(10, 3).unwrap();
    let set = Sampler::boson(&u, &InputState::new(10, 3).unwrap()).unwrap().collect(200, 5, false).unwrap();
    for format in [SampleFormat::Occupation, SampleFormat::ModeList] {
        let path = dir.path().join("set.txt");
        write_samples(&path, &set, format, &[("config_hash".into(), "0123".into())]).unwrap();
        let (back, report) = ingest_samples(&path, format, 10, 3).unwrap();
        assert_eq!(back, set);
        assert_eq!(report.duplicates, 0);
    }
}
