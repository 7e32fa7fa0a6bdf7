use std::path::PathBuf;
use std::process::{Command, Output};

fn netcode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netcode"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("netcode-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn enumerate_prints_records_and_summary() {
    let o = netcode(&["enumerate", "--k", "1", "--l", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with('{')).count(), 4);
    assert!(
        text.ends_with("(1,2) General: 4 networks, orbit sum 7\n"),
        "{text}"
    );
}

#[test]
fn exit_codes() {
    assert_eq!(
        netcode(&["enumerate", "--k", "2", "--l", "3"])
            .status
            .code(),
        Some(2)
    );
    let one_one = r#"{"k":1,"l":1,"q":[[2,[1]]],"w":[[1,[2]]]}"#;
    assert_eq!(
        netcode(&["region", one_one, "--bounds", "bogus"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(netcode(&["query"]).status.code(), Some(1));
    assert_eq!(
        netcode(&["region", one_one, "--bounds", "outer,scalar-2"])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn sweep_then_query() {
    let dir = scratch("sweep");
    let db = dir.join("db.jsonl");
    let db = db.to_str().unwrap();
    assert!(netcode(&["--db", db, "enumerate", "--k", "3", "--l", "1"])
        .status
        .success());
    let o = netcode(&[
        "--db", db, "sweep", "--k", "3", "--l", "1", "--bounds", "scalar-2",
    ]);
    assert!(o.status.success());
    assert!(
        stdout(&o).contains("(3,1)            9         4"),
        "{}",
        stdout(&o)
    );
    let count = |extra: &[&str]| {
        let mut args = vec!["--db", db, "query", "--count"];
        args.extend_from_slice(extra);
        stdout(&netcode(&args)).trim().to_string()
    };
    assert_eq!(count(&["--k", "3", "--l", "1"]), "9");
    assert_eq!(count(&["--flag", "scalar-2=true"]), "4");
    assert_eq!(count(&["--flag", "scalar-2=false"]), "5");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn operate_deletes_an_edge() {
    let one_one = r#"{"k":1,"l":1,"q":[[2,[1]]],"w":[[1,[2]]]}"#;
    let o = netcode(&["operate", "edge-delete", one_one, "--target", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "empty network\n");
}
