mod common;

use common::*;

#[test]
fn every_mutation_is_rejected_with_its_class() {
    let dir = tempfile::tempdir().unwrap();
    let muts = mutations();
    assert!(muts.len() >= 10);
    for (i, m) in muts.iter().enumerate() {
        assert_eq!(classify(&m.src), Some(m.expect), "{}", m.name);
        let path = dir.path().join(format!("m{:02}.hol", i));
        std::fs::write(&path, &m.src).unwrap();
        let (code, _, err) = cli(&[std::ffi::OsStr::new("check"), path.as_os_str()]);
        assert_eq!(code, m.expect.exit_code(), "{}: {}", m.name, err);
        assert!(err.contains(path.to_str().unwrap()), "diagnostic names the file: {}", err);
    }
}

#[test]
fn the_unmutated_originals_check() {
    assert_eq!(classify(&read_corpus("theorems_1_5.hol")), None);
}
