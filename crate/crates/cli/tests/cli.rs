use std::fs;
use std::path::Path;
use std::process::Command;

fn qigmn() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qigmn"))
}

fn write_config(dir: &Path, out: &Path) -> std::path::PathBuf {
    let path = dir.join("run.toml");
    let body = format!(
        "env = \"mountain_car_v0\"\nseeds = [0, 1]\nmax_episodes = 3\nout_dir = \"{}\"\n",
        out.display()
    );
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn train_twice_gives_identical_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let cfg = write_config(dir.path(), &a);
    let first = qigmn().args(["train", "--config"]).arg(&cfg).output().unwrap();
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let second = qigmn()
        .args(["train", "--parallel", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&b)
        .output()
        .unwrap();
    assert!(second.status.success());
    for name in ["seed_0.csv", "seed_1.csv", "summary.toml"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let stdout = String::from_utf8_lossy(&first.stdout);
    assert!(stdout.contains("seed    0"));
}

#[test]
fn evaluate_saved_model() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let cfg = write_config(dir.path(), &out);
    assert!(qigmn().args(["train", "--config"]).arg(&cfg).status().unwrap().success());
    let eval = qigmn()
        .args(["evaluate", "--env", "mountain_car_v0", "--episodes", "2", "--model"])
        .arg(out.join("model_seed_0.txt"))
        .output()
        .unwrap();
    assert!(eval.status.success(), "{}", String::from_utf8_lossy(&eval.stderr));
    assert!(String::from_utf8_lossy(&eval.stdout).contains("mean return -200"));
}

#[test]
fn bad_input_fails_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "env = \"pong\"\n").unwrap();
    let out = qigmn().args(["train", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pong"));

    let out = qigmn().args(["evaluate", "--env", "cartpole_v0", "--model", "/nonexistent"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn list_envs_names_every_task() {
    let out = qigmn().arg("list-envs").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for name in ["mountain_car_v0", "cartpole_v0", "cartpole_v1", "acrobot_v0", "acrobot_v1"] {
        assert!(text.contains(name));
    }
}
