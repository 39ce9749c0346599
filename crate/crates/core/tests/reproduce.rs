use std::fs;

use ensemble_verify::reproduce::{read_csv, reproduce, Figure, DEFAULT_DELTA, HEADER};

#[test]
fn every_dataset_has_the_fixed_header() {
    let dir = tempfile::tempdir().unwrap();
    let grid = [0.7, 0.9];
    let mut paths = Vec::new();
    for figure in Figure::ALL {
        paths.extend(reproduce(figure, dir.path(), &grid, DEFAULT_DELTA).unwrap());
    }
    assert_eq!(paths.len(), 6);
    for path in paths {
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().next().unwrap(), HEADER.join(","), "{}", path.display());
        let rows = read_csv(text.as_bytes()).unwrap();
        assert!(!rows.is_empty());
        assert!(rows.iter().all(|r| grid.contains(&r.fidelity) || path.ends_with("appc_d.csv")));
    }
}

#[test]
fn noiseless_limit_accepts_everything() {
    let dir = tempfile::tempdir().unwrap();
    let path = &reproduce(Figure::Fig2b, dir.path(), &[1.0], DEFAULT_DELTA).unwrap()[0];
    for row in read_csv(fs::File::open(path).unwrap()).unwrap() {
        assert_eq!(row.delta, Some(1.0), "{}", row.strategy);
    }
}

#[test]
fn collective_copies_grow_slower_than_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let grid = [0.6, 0.8, 0.95];
    let path = &reproduce(Figure::Fig2a, dir.path(), &grid, DEFAULT_DELTA).unwrap()[0];
    let rows = read_csv(fs::File::open(path).unwrap()).unwrap();
    for f in grid {
        let at = |s: &str| rows.iter().find(|r| r.strategy == s && r.fidelity == f).unwrap().copies_consumed.unwrap();
        assert!(at("rank2-full") < at("single-copy"), "F={f}");
        assert_eq!(at("rank2-subspace"), 4);
    }
}
