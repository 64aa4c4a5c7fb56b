use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ehrelay"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ehrelay-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &std::path::Path, body: &str) -> PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, body).unwrap();
    p
}

const SWEEP: &str = r#"
version = 1
[relay]
mode = "DA"
n_eh = 1
n_ip = 3
[sweep]
axis = "ps_db"
grid = "10:10:30"
evaluators = ["analytic_L", "mc_L"]
"#;

#[test]
fn sweep_writes_csv_and_svg() {
    let dir = scratch("sweep");
    let cfg = write_config(&dir, SWEEP);
    let out = dir.join("o.csv");
    let st = bin().arg("sweep").arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("axis,evaluator,ber,flag,half_width"));
    assert_eq!(lines.count(), 6);
    assert!(out.with_extension("svg").exists());

    let again = dir.join("p.csv");
    bin().arg("sweep").arg(&cfg).arg("--out").arg(&again).status().unwrap();
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn overrides_replace_the_file_sweep() {
    let dir = scratch("override");
    let cfg = write_config(&dir, SWEEP);
    let o = bin().arg("sweep").arg(&cfg).args(["--axis", "n_ip", "--grid", "1,2", "--evaluators", "analytic_NL"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("\n1,analytic_NL,") && text.contains("\n2,analytic_NL,"), "{text}");
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn config_errors_exit_with_one() {
    let dir = scratch("bad");
    let cfg = write_config(&dir, "version = 7\n");
    assert_eq!(bin().arg("sweep").arg(&cfg).status().unwrap().code(), Some(1));
    let cfg = write_config(&dir, "version = 1\n[sweep]\naxis = \"ps_db\"\ngrid = [1.0]\nevaluators = []\n");
    assert_eq!(bin().arg("sweep").arg(&cfg).status().unwrap().code(), Some(1));
    assert_eq!(bin().args(["sweep", "/nonexistent/file.toml"]).status().unwrap().code(), Some(1));
    assert_eq!(bin().arg("no-such-command").status().unwrap().code(), Some(1));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn failed_rows_exit_with_two() {
    let dir = scratch("fail");
    // n_r = 3 leaves no harvesting antenna when n_ip = 3
    let cfg = write_config(&dir, SWEEP);
    let o = bin().arg("sweep").arg(&cfg).args(["--axis", "n_r", "--grid", "3,4", "--evaluators", "analytic_L"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("3,analytic_L,NaN,failed,"), "{text}");
    assert!(text.contains("4,analytic_L,") && text.contains(",ok,"));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn analysis_subcommands() {
    let o = bin().args(["optimize-rho", "--ps-db", "60", "--grid", "0.8,0.85,0.9,0.95"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("rho_star,ber\n0.95,"), "{text}");

    let o = bin().args(["diff-lambda", "--model", "NL", "--grid", "1.5,2.5"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let vals: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(vals[0] > 0.0 && vals[1] < 0.0, "{text}");

    let o = bin().args(["diff-lambda", "--model", "XL"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));

    let o = bin().args(["verify", "--ps-grid", "20"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(String::from_utf8(o.stdout).unwrap().matches(",pass").count(), 6);
}

#[test]
fn approx_error_reports_lambda() {
    let dir = scratch("approx");
    let cfg = write_config(&dir, "version = 1\n[relay]\nmode = \"DA\"\nmodel = \"NL\"\nn_eh = 1\nn_ip = 3\n");
    let o = bin().args(["approx-error", "--config"]).arg(&cfg).args(["--chi-grid", "20", "--min-errors", "20000"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let lambda: f64 = text.lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!(lambda < 0.05, "{text}");
    std::fs::remove_dir_all(dir).ok();
}
