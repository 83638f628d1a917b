use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use samplebench::eventlog::{parse_xes, XesOptions};
use samplebench::harness::{read_log, read_records, ExperimentConfig, RECORD_COLUMNS, SEED_ENV};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_samplebench"));
    cmd.env_remove(SEED_ENV);
    cmd
}

fn run(cmd: &mut Command) -> Output {
    let out = cmd.output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn standin() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/standin.xes.gz")
}

#[test]
fn bundled_standin_parses() {
    let log = read_log(&standin()).unwrap();
    assert_eq!(log.total_traces(), 1049);
    assert_eq!(log.alphabet().len(), 16);
    // The decompressed document parses to the same log.
    let raw = flate2::read::GzDecoder::new(fs::File::open(standin()).unwrap());
    assert_eq!(parse_xes(raw, XesOptions { complete_only: true }).unwrap(), log);
}

#[test]
fn single_log_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("log.xes");
    let sample = dir.path().join("sample.csv");
    let tree = dir.path().join("tree.txt");
    fs::write(&tree, "seq(a,xor(b,c),loop(d,e))\n").unwrap();

    run(bin().args(["simulate", "--traces", "400", "--seed", "3", "--tree"]).arg(&tree).arg("-o").arg(&log));
    assert_eq!(read_log(&log).unwrap().total_traces(), 400);

    run(bin().arg("sample").arg(&log).args(["--ratio", "0.25", "--seed", "1", "--technique", "stratified_squared", "-o"]).arg(&sample));
    let s = read_log(&sample).unwrap();
    assert_eq!(s.total_traces(), 100);

    let quality = stdout(&run(bin().arg("quality").arg(&log).arg(&sample)));
    let keys: Vec<&str> = quality.lines().map(|l| l.split(" = ").next().unwrap()).collect();
    assert_eq!(keys, ["ratio", "pairs", "coverage", "nmae", "nrmse", "smape", "srmspe"]);
    assert!(quality.contains("ratio = 0.25\n"));

    let discovered = stdout(&run(bin().arg("discover").arg(&log)));
    let discovered_path = dir.path().join("found.txt");
    fs::write(&discovered_path, &discovered).unwrap();
    assert_eq!(discovered.trim(), "seq(a,xor(b,c),loop(d,e))");

    let conf = stdout(&run(bin().arg("conformance").arg(&log).arg(&discovered_path)));
    let mut lines = conf.lines();
    assert_eq!(lines.next(), Some("precision,recall,ent_log,ent_model,ent_intersection"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row[1], 1.0);
    assert!(row[0] > 0.0 && row[0] < 1.0);
}

#[test]
fn experiments_and_correlation() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.cfg");
    fs::write(&config, "models = 2\ntraces_per_log = 200\nratios = 0.1, 0.5, 0.9\nsamples_per_ratio = 3\n").unwrap();
    let records = dir.path().join("records.csv");
    let report = dir.path().join("report.txt");
    let plot = dir.path().join("plot.csv");

    run(bin().arg("invitro").arg("-c").arg(&config).arg("-o").arg(&records).arg("--report").arg(&report).arg("--plot").arg(&plot));
    let text = fs::read_to_string(&records).unwrap();
    assert_eq!(text.lines().next().unwrap(), RECORD_COLUMNS.join(","));
    let parsed = read_records(text.as_bytes()).unwrap();
    assert_eq!(parsed.len(), 2 * 3 * 3);
    assert!(parsed.iter().all(|r| r.precision_true.is_some() && r.seed != 0));
    assert!(fs::read_to_string(&report).unwrap().contains("model 1"));
    assert!(fs::read_to_string(&plot).unwrap().starts_with("group,x_measure,y_measure,ratio,repetition,x,y\n"));

    let table = stdout(&run(bin().arg("correlate").arg(&records)));
    assert_eq!(table, fs::read_to_string(&report).unwrap());

    // The environment variable overrides the configured master seed.
    let reseeded = dir.path().join("reseeded.csv");
    run(bin().env(SEED_ENV, "12345").arg("invitro").arg("-c").arg(&config).arg("-o").arg(&reseeded));
    assert_ne!(fs::read_to_string(&reseeded).unwrap(), text);
    fs::write(&config, format!("{}master_seed = 12345\n", fs::read_to_string(&config).unwrap())).unwrap();
    let configured = dir.path().join("configured.csv");
    run(bin().arg("invitro").arg("-c").arg(&config).arg("-o").arg(&configured).arg("--serial"));
    assert_eq!(fs::read_to_string(&configured).unwrap(), fs::read_to_string(&reseeded).unwrap());

    let invivo = dir.path().join("invivo.csv");
    let cfg = dir.path().join("invivo.cfg");
    fs::write(&cfg, ExperimentConfig { samples_per_ratio: 2, ..ExperimentConfig::default() }.to_text()).unwrap();
    let out = run(bin().arg("invivo").arg("-c").arg(&cfg).arg("-o").arg(&invivo).arg(standin()));
    assert!(stdout(&out).contains("model 0 log 0"));
    let parsed = read_records(fs::File::open(&invivo).unwrap()).unwrap();
    assert_eq!(parsed.len(), 24);
    assert!(parsed.iter().all(|r| r.precision_true.is_none() && r.recall_true.is_none()));
}

#[test]
fn bad_input_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "case,activity\n").unwrap();
    let out = bin().arg("discover").arg(&empty).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty log"));

    let out = bin().args(["invivo", "-o"]).arg(dir.path().join("x.csv")).output().unwrap();
    assert!(!out.status.success());

    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "ratios = 0, 0.5\n").unwrap();
    let out = bin().arg("invitro").arg("-c").arg(&cfg).arg("-o").arg(dir.path().join("r.csv")).output().unwrap();
    assert!(!out.status.success());
}
