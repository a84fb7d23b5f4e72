use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_freeway-dqn"))
}

#[test]
fn train_then_eval() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let status = bin()
        .args(["train", "--episodes", "2", "--seed", "3", "--variant", "dueling", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let config = std::fs::read_to_string(out.join("config.toml")).unwrap();
    assert!(config.contains("variant = \"dueling\""));
    assert!(config.contains("seed = 3"));

    let eval = bin()
        .args(["eval", "--variant", "dueling", "--config"])
        .arg(out.join("config.toml"))
        .arg("--params")
        .arg(out.join("params.txt"))
        .arg("--out")
        .arg(dir.path().join("eval"))
        .output()
        .unwrap();
    assert!(eval.status.success(), "{}", String::from_utf8_lossy(&eval.stderr));
    assert!(dir.path().join("eval/actions.csv").exists());
}

#[test]
fn errors_are_one_machine_readable_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[agent]\nlr = \"fast\"\n").unwrap();
    let out = bin().arg("train").arg("--config").arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.lines().count(), 1, "{stderr}");
    assert!(stderr.starts_with("error kind=config message="), "{stderr}");

    let out = bin().args(["eval", "--params", "/nonexistent/params.txt"]).output().unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.starts_with("error kind=params "), "{stderr}");
}

#[test]
fn unknown_variant_is_rejected() {
    let out = bin().args(["train", "--variant", "rainbow"]).output().unwrap();
    assert!(!out.status.success());
}
