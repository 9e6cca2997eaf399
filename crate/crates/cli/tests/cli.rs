use std::fs;
use std::process::{Command, Output};

fn glab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glab"))
        .args(args)
        .env_remove("GLAB_BIT_CAP")
        .output()
        .expect("spawn glab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn empty_schedules_mark_the_zeros_path() {
    let o = glab(&["marker-run", "--stages", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["header"]["command"], "marker-run");
    let markers = v["body"]["markers"].as_array().unwrap();
    assert_eq!(markers.len(), 10);
    for m in markers {
        let node = m["node"].as_str().unwrap();
        assert!(!node.is_empty() && node.bytes().all(|b| b == b'0'), "{node}");
    }
}

#[test]
fn constant_operator_tower_agrees_on_zero() {
    let o = glab(&["tower", "--catalog", "constant:0", "--floors", "3", "--format", "csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(
        lines.next().unwrap(),
        "schema_version,floor,k_i,k_next,mu_halt,mu_out0,mu_out1,mu_multi,classification"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    for r in rows {
        assert!(
            r.starts_with("1,") && r.ends_with(",1/1,1/1,0/1,0/1,agreement(0)"),
            "{r}"
        );
    }
}

#[test]
fn cap_overrun_writes_a_truncated_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    let o = glab(&[
        "measure",
        "--catalog",
        "every-bit:0..30",
        "--bit-cap",
        "16",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("relevant bits"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["truncated"]["cap"], "relevant bits");
    assert!(v["body"].is_null());
}

#[test]
fn bit_cap_is_read_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_glab"))
        .args(["measure", "--catalog", "every-bit:0..10"])
        .env("GLAB_BIT_CAP", "4")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn malformed_hex_reports_the_offset() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("p.hex");
    fs::write(&f, "ff0g").unwrap();
    let o = glab(&["density", f.to_str().unwrap(), "--hex-len", "16"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("at byte 3"), "{}", stderr(&o));
}

#[test]
fn bad_thresholds_are_preconditions() {
    let o = glab(&["vote", "--catalog", "constant:1", "--threshold-agree", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let o = glab(&[
            "tower",
            "--kind",
            "60",
            "--catalog",
            "parity:0..32",
            "--k",
            "1",
            "--cap",
            "32",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn density_sweep_on_a_full_prefix() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("p.txt");
    fs::write(&f, "1".repeat(64)).unwrap();
    let o = glab(&["density", f.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["body"]["density"], "1/1");
    for row in v["body"]["exponents"].as_array().unwrap() {
        assert_eq!(row["holds"], true);
        assert!(row["census"].as_array().unwrap().is_empty());
    }
}

#[test]
fn forcing_check_and_psi() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.json");
    let q = dir.path().join("q.json");
    fs::write(
        &p,
        r#"{"sigma":{"length":2,"entries":[[0,1,0],[1,1,0]]},"epsilon":"1/2"}"#,
    )
    .unwrap();
    fs::write(
        &q,
        r#"{"sigma":{"length":4,"entries":[[0,1,0],[1,1,0],[2,0,0]]},"epsilon":"1/2"}"#,
    )
    .unwrap();
    let o = glab(&[
        "forcing",
        "check",
        "--p",
        p.to_str().unwrap(),
        "--q",
        q.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(
        stdout(&o),
        "schema_version,p_is_condition,q_is_condition,q_extends_p\n1,true,true,true\n"
    );

    let o = glab(&[
        "forcing",
        "psi",
        "--catalog",
        "bit-copy:3",
        "--condition",
        p.to_str().unwrap(),
        "--f",
        "1101",
        "--values",
        "0000",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["body"]["found"]["value"], 1);
    assert_eq!(v["body"]["padded"]["sigma"]["length"], 4);
}

#[test]
fn encode_then_decode_rtilde() {
    let o = glab(&["encode", "--map", "rtilde", "1011", "--out-len", "16"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let image = v["body"]["image"].as_str().unwrap().to_string();
    let o = glab(&["decode", "--map", "rtilde", &image, "--bits", "4", "--format", "csv"]);
    assert_eq!(stdout(&o), "schema_version,bit,decoded\n1,0,1\n1,1,0\n1,2,1\n1,3,1\n");
}

#[test]
fn unknown_catalog_entry_is_a_parse_error() {
    let o = glab(&["measure", "--catalog", "nonsense:3"]);
    assert_eq!(o.status.code(), Some(2));
}
