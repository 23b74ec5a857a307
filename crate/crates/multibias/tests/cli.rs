//! End-to-end tests of the command-line interface: exit codes, output
//! formats, and determinism, exercised through the real binary.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_multibias"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

const M2: &str = "mlmap 1\nk 2\ngroup 1 2\ngroup 2 2\ncodomain T\nentry 1 1 1/2\n";
const HALF: &str = "mlmap 1\nk 2\ngroup 1 4\ngroup 2 4\ncodomain T\nentry 1 1 2/4\n";

#[test]
fn bias_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let m2 = dir.path().join("m2.mlmap");
    write(&m2, M2);
    let out = run(&["bias", m2.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_of(&out), "1/2\n");

    let out = run(&["bias", m2.to_str().unwrap(), "--method", "oracle"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_of(&out), "1/2\n");

    // a complex bias prints the exact form plus a certified decimal
    let gauss = dir.path().join("gauss.mlmap");
    write(
        &gauss,
        "mlmap 1\nk 3\ngroup 1 3\ngroup 2 3\ngroup 3 3\ncodomain T\n\
         term 1,2\nentry 1 1 1/3\nterm 1,3\nentry 1 1 1/3\nterm 2,3\nentry 1 1 1/3\n",
    );
    let out = run(&["bias", gauss.to_str().unwrap(), "--method", "oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("cyclo level=3"), "got: {text}");
    assert!(text.contains("~="), "got: {text}");

    // kernel method rejects multiaffine input
    let out = run(&["bias", gauss.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mlmap");
    write(&bad, "mlmap 1\nk 2\ngroup 1 2\ngroup 2 2\ncodomain T\nentry 1 1 1/3\n");
    let out = run(&["bias", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["bias", dir.path().join("missing.mlmap").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_exhaustion_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let m16 = dir.path().join("m16.mlmap");
    write(&m16, "mlmap 1\nk 2\ngroup 1 16\ngroup 2 16\ncodomain T\nentry 1 1 1/16\n");
    let out = run(&["bias", m16.to_str().unwrap(), "--method", "oracle", "--budget", "10"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn decompose_verify_flow() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("half.mlmap");
    write(&map, HALF);
    let cert = dir.path().join("half.mlcert");
    let out = run(&[
        "decompose",
        map.to_str().unwrap(),
        "--max-q",
        "2",
        "--max-rank",
        "2",
        "--emit",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("rank 1"));
    assert!(stdout_of(&out).contains("bound 1/2"));

    let out = run(&["verify", map.to_str().unwrap(), cert.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).starts_with("verified"));

    // a corrupted certificate fails with a witness point on stdout
    let text = std::fs::read_to_string(&cert).unwrap();
    let zeroed = text.replace("entry 1 1", "entry 1 0");
    let bad = dir.path().join("bad.mlcert");
    write(&bad, &zeroed);
    let out = run(&["verify", map.to_str().unwrap(), bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout_of(&out).contains("witness point"), "got: {}", stdout_of(&out));

    // search exhaustion is a verification failure, not an input error
    let m3 = dir.path().join("m3.mlmap");
    write(&m3, "mlmap 1\nk 2\ngroup 1 3\ngroup 2 3\ncodomain T\nentry 1 1 1/3\n");
    let out = run(&["decompose", m3.to_str().unwrap(), "--max-q", "2", "--max-rank", "1"]);
    assert_eq!(out.status.code(), Some(1));

    // the induction strategy also produces verifying certificates
    let m4 = dir.path().join("m4.mlmap");
    write(&m4, "mlmap 1\nk 2\ngroup 1 4\ngroup 2 4\ncodomain T\nentry 1 1 1/4\n");
    let cert2 = dir.path().join("m4.mlcert");
    let out = run(&[
        "decompose",
        m4.to_str().unwrap(),
        "--max-q",
        "4",
        "--max-rank",
        "3",
        "--strategy",
        "induction",
        "--emit",
        cert2.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["verify", m4.to_str().unwrap(), cert2.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn extend_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    // range mode: xy mod 2 on (Z/4)² lifts to xy mod 4
    let f = dir.path().join("f.mlmap");
    write(&f, "mlmap 1\nk 2\ngroup 1 4\ngroup 2 4\ncodomain group 2\nentry 1 1 1\n");
    let out = run(&["extend", f.to_str().unwrap(), "--mode", "range", "--p", "2", "--q", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("codomain group 4"));

    // domain mode: the first group is read as pA_1
    let sub = dir.path().join("sub.mlmap");
    write(&sub, "mlmap 1\nk 2\ngroup 1 2\ngroup 2 4\ncodomain group 2\nentry 1 1 1\n");
    let out = run(&["extend", sub.to_str().unwrap(), "--mode", "domain", "--p", "2", "--q", "2"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout_of(&out);
    assert!(text.contains("group 1 4"), "first domain enlarged: {text}");
    assert!(text.contains("codomain group 4"));

    // violated hypothesis is an input error
    let bad = dir.path().join("badext.mlmap");
    write(&bad, "mlmap 1\nk 2\ngroup 1 2\ngroup 2 2\ncodomain group 2\nentry 1 1 1\n");
    let out = run(&["extend", bad.to_str().unwrap(), "--mode", "domain", "--p", "2", "--q", "2"]);
    assert_eq!(out.status.code(), Some(2));

    // rank1 mode needs a witness certificate
    let phi = dir.path().join("phi.mlmap");
    write(&phi, "mlmap 1\nk 2\ngroup 1 2\ngroup 2 4\ncodomain T\nentry 1 1 1/2\n");
    let out = run(&["extend", phi.to_str().unwrap(), "--mode", "rank1", "--p", "2", "--q", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let wit = dir.path().join("wit.mlcert");
    write(
        &wit,
        "mlcert 1\nterm q=2 I=1\nleft\nmlmap 1\nk 1\ngroup 1 2\ncodomain group 2\nentry 1 1\n\
         right\nmlmap 1\nk 1\ngroup 1 4\ncodomain group 2\nentry 1 1\n",
    );
    let out = run(&[
        "extend",
        phi.to_str().unwrap(),
        "--mode",
        "rank1",
        "--p",
        "2",
        "--q",
        "2",
        "--cert",
        wit.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout_of(&out).contains("extends through m_4"));
}

#[test]
fn crush_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("F.mlmap");
    write(&f, "mlmap 1\nk 2\ngroup 1 4\ngroup 2 4\ncodomain group 4\nentry 1 1 2\n");
    let cert = dir.path().join("F.mlcert");
    write(
        &cert,
        "mlcert 1\nterm q=2 I=1\nleft\nmlmap 1\nk 1\ngroup 1 4\ncodomain group 2\nentry 1 1\n\
         right\nmlmap 1\nk 2\ngroup 1 4\ngroup 2 4\ncodomain group 2\nentry 1 1 1\n",
    );
    let out = run(&["crush", f.to_str().unwrap(), cert.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout_of(&out);
    assert!(text.contains("crush I=1 cod(g)=2"));
    assert!(text.contains("verified"));
}

#[test]
fn spectrum_subcommand_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("a.txt");
    let out2 = dir.path().join("b.txt");
    let st = run(&["spectrum", "--k", "2", "--max-order", "6", "--out", out1.to_str().unwrap()]);
    assert_eq!(st.status.code(), Some(0));
    let st = run(&[
        "spectrum", "--k", "2", "--max-order", "6",
        "--out", out2.to_str().unwrap(), "--jobs", "4",
    ]);
    assert_eq!(st.status.code(), Some(0));
    let a = std::fs::read(&out1).unwrap();
    let b = std::fs::read(&out2).unwrap();
    assert_eq!(a, b, "reports must be byte-identical across --jobs");

    // CSV with witness files
    let csv = dir.path().join("vals.csv");
    let wdir = dir.path().join("witnesses");
    let st = run(&[
        "spectrum", "--k", "1", "--max-order", "4",
        "--out", out1.to_str().unwrap(),
        "--csv", csv.to_str().unwrap(),
        "--witness-dir", wdir.to_str().unwrap(),
    ]);
    assert_eq!(st.status.code(), Some(0));
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert!(rows.starts_with("value,witness\n"));
    assert!(wdir.join("witness_0000.mlmap").exists());
}

#[test]
fn lemmas_subcommand_reproducible() {
    let args = ["lemmas", "--trials", "25", "--seed", "11", "--max-order", "8", "--max-k", "3"];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0));
    let b = run(&args);
    assert_eq!(stdout_of(&a), stdout_of(&b), "fixed seed must reproduce the log");
    assert!(stdout_of(&a).contains("total violations 0"));
}

#[test]
fn gauss_subcommand() {
    let out = run(&["gauss", "--p", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("square 5"), "got: {text}");
    let out = run(&["gauss", "--p", "4"]);
    assert_eq!(out.status.code(), Some(2));
}
