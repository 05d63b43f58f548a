use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qshape(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qshape"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const RING: &str = "P1\n5 5\n0 0 0 0 0\n0 1 1 1 0\n0 1 1 1 0\n0 1 1 1 0\n0 0 0 0 0\n";

#[test]
fn single_shape_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("block.pbm"), RING).unwrap();
    let out = qshape(&["extract", s(&d.join("block.pbm")), s(&d.join("block.poly"))]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        fs::read_to_string(d.join("block.poly")).unwrap(),
        "4\n1.5 3.5\n1.5 1.5\n3.5 1.5\n3.5 3.5\n"
    );

    let out = qshape(&[
        "simplify",
        "--k",
        "3",
        s(&d.join("block.poly")),
        s(&d.join("tri.poly")),
    ]);
    assert!(out.status.success());
    assert!(fs::read_to_string(d.join("tri.poly"))
        .unwrap()
        .starts_with("3\n"));

    let out = qshape(&[
        "describe",
        "--m",
        "4",
        s(&d.join("block.poly")),
        s(&d.join("block.json")),
    ]);
    assert!(out.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("block.json")).unwrap()).unwrap();
    assert_eq!((json["m"].as_u64(), json["n"].as_u64()), (Some(4), Some(4)));
    assert_eq!(json["dir"][0], serde_json::json!([-1, 0, 2, 4]));

    let out = qshape(&[
        "reconstruct",
        s(&d.join("block.json")),
        s(&d.join("proto.poly")),
        "--budget",
        "500",
        "--svg",
        s(&d.join("proto.svg")),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("exact"));
    assert!(fs::read_to_string(d.join("proto.svg"))
        .unwrap()
        .contains("viewBox=\"0 0 512 512\""));

    let out = qshape(&[
        "render",
        s(&d.join("row.svg")),
        s(&d.join("block.poly")),
        s(&d.join("proto.poly")),
    ]);
    assert!(out.status.success());
    assert!(fs::read_to_string(d.join("row.svg"))
        .unwrap()
        .contains("viewBox=\"0 0 512 256\""));
}

#[test]
fn corpus_run_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let syn = d.join("syn");
    assert!(qshape(&["synth", s(&syn), "--originals", "4"])
        .status
        .success());

    let out = qshape(&[
        "corpus",
        s(&syn),
        "--out",
        s(&d.join("a")),
        "--jobs",
        "1",
        "--top",
        "3",
        "--svg",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = qshape(&[
        "corpus",
        s(&syn),
        "--out",
        s(&d.join("b")),
        "--jobs",
        "8",
        "--top",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    for f in ["pairs.csv", "report.json"] {
        assert_eq!(
            fs::read(d.join("a").join(f)).unwrap(),
            fs::read(d.join("b").join(f)).unwrap()
        );
    }
    assert_eq!(fs::read_dir(d.join("a/matches")).unwrap().count(), 8);
    let csv = fs::read_to_string(d.join("a/pairs.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 28);

    // two identical shapes: completes with fallback weights
    let twin = d.join("twin");
    fs::create_dir(&twin).unwrap();
    fs::copy(syn.join("shape_00.poly"), twin.join("a.poly")).unwrap();
    fs::copy(syn.join("shape_00.poly"), twin.join("b.poly")).unwrap();
    let out = qshape(&["corpus", s(&twin), "--out", s(&d.join("c"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(d.join("c/report.json").exists());

    // missing input directory
    let out = qshape(&["corpus", s(&d.join("nope")), "--out", s(&d.join("e"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn compare_descriptors() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let syn = d.join("syn");
    assert!(qshape(&["synth", s(&syn), "--originals", "2"])
        .status
        .success());
    let mut jsons = Vec::new();
    for name in ["shape_00", "shape_00_dup", "shape_01"] {
        let simple = d.join(format!("{name}.12.poly"));
        let json = d.join(format!("{name}.json"));
        assert!(
            qshape(&["simplify", s(&syn.join(format!("{name}.poly"))), s(&simple)])
                .status
                .success()
        );
        assert!(qshape(&["describe", s(&simple), s(&json)]).status.success());
        jsons.push(json);
    }
    let out = qshape(&["compare", s(&jsons[0]), s(&jsons[1]), s(&jsons[2])]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "a,b,shift,dir_err,dist_err,combined");
    assert_eq!(rows.len(), 4);
    assert!(rows[1].starts_with("0,1,"));

    let out = qshape(&["compare", s(&jsons[0])]);
    assert!(!out.status.success());
}

#[test]
fn bad_inputs_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("bow.poly"), "4\n0 0\n1 1\n1 0\n0 1\n").unwrap();
    let out = qshape(&["simplify", s(&d.join("bow.poly")), s(&d.join("o.poly"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("intersect"));
    fs::write(d.join("bad.pgm"), "P2\n2 2\n65535\n0 0 0 0\n").unwrap();
    let out = qshape(&["extract", s(&d.join("bad.pgm")), s(&d.join("o.poly"))]);
    assert_eq!(out.status.code(), Some(1));
    let out = qshape(&["render", s(&d.join("x.svg")), s(&d.join("missing.poly"))]);
    assert_eq!(out.status.code(), Some(1));
}
