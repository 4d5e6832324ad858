use std::path::PathBuf;

use serde_json::Value;

fn demo_file() -> String {
    concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/demo5.json").to_string()
}

struct Run {
    code: i32,
    out: String,
    err: String,
}

impl Run {
    fn report(&self) -> Value {
        serde_json::from_str(&self.out).expect("report json on stdout")
    }

    fn error_code(&self) -> String {
        let v: Value = serde_json::from_str(self.err.trim()).expect("error json on stderr");
        v["code"].as_str().unwrap().to_string()
    }
}

fn cli(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("metrohaul").chain(args.iter().copied());
    let code = metrohaul_cli::run(argv, &mut out, &mut err);
    Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn state_in(dir: &tempfile::TempDir) -> String {
    dir.path().join("state.json").to_string_lossy().into_owned()
}

#[test]
fn validate_demo() {
    let r = cli(&["validate", "--topology", &demo_file()]);
    assert_eq!(r.code, 0, "{}", r.err);
    let rep = r.report();
    assert_eq!(rep["exit_code"], 0);
    assert_eq!(rep["result"]["nodes"].as_array().unwrap().len(), 5);
    assert_eq!(rep["result"]["sips"].as_array().unwrap().len(), 13);
    assert!(rep.get("error").is_none());
}

#[test]
fn validate_rejects_bad_documents() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"nodes\": 3}").unwrap();
    let r = cli(&["validate", "--topology", bad.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert_eq!(r.error_code(), "PARSE_ERROR");
    let r = cli(&["validate", "--topology", "/nonexistent/file.json"]);
    assert_eq!(r.error_code(), "IO_ERROR");
}

#[test]
fn same_endpoint_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let st = state_in(&dir);
    let r = cli(&["provision", "--state", &st, "--layer", "optical", "--a", "AMEN1-TRX1", "--z", "AMEN1-TRX1"]);
    assert_eq!(r.code, 1);
    assert_eq!(r.error_code(), "SAME_ENDPOINT");
    assert_eq!(r.report()["exit_code"], 1);
    assert!(!PathBuf::from(&st).exists(), "failed commands do not write state");
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["experiment", "--unknown-flag"],
        vec!["experiment"],
        vec!["scenario", "--cameras-per-amen", "10"],
        vec!["frobnicate"],
        vec![],
    ] {
        let r = cli(&args);
        assert_eq!(r.code, 2, "{args:?}");
        assert!(r.err.contains("Usage"), "{}", r.err);
        assert!(r.out.is_empty());
    }
    assert_eq!(cli(&["--help"]).code, 0);
}

#[test]
fn provision_and_delete_through_state_file() {
    let dir = tempfile::tempdir().unwrap();
    let st = state_in(&dir);
    let r =
        cli(&["provision", "--state", &st, "--layer", "l2", "--a", "AMEN1-DC", "--z", "AMEN2-DC", "--bandwidth", "10"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let svc = r.report()["result"]["service"].clone();
    assert_eq!(svc["vlan_id"], 2);
    assert!(!r.report()["result"]["device_configs"].as_array().unwrap().is_empty());

    let r = cli(&["provision", "--state", &st, "--layer", "l2", "--a", "AMEN1-DC", "--z", "AMEN2-DC"]);
    assert_eq!(r.report()["result"]["service"]["vlan_id"], 3);

    let id = svc["id"].as_str().unwrap();
    let r = cli(&["delete", "--state", &st, "--service", id]);
    assert_eq!(r.code, 0);
    assert_eq!(r.report()["result"]["service"]["state"], "DELETED");
    let r = cli(&["delete", "--state", &st, "--service", id]);
    assert_eq!(r.error_code(), "INVALID_STATE");
    let r = cli(&["delete", "--state", &st, "--service", "svc-999"]);
    assert_eq!(r.error_code(), "UNKNOWN_SERVICE");
}

#[test]
fn format_hint_and_unsupported_format() {
    let dir = tempfile::tempdir().unwrap();
    let st = state_in(&dir);
    let r = cli(&[
        "provision",
        "--state",
        &st,
        "--layer",
        "optical",
        "--a",
        "AMEN1-TRX1",
        "--z",
        "MCEN2-TRX1",
        "--format",
        "DP-64QAM",
    ]);
    assert_eq!(r.error_code(), "UNSUPPORTED_FORMAT");
    let r = cli(&[
        "provision",
        "--state",
        &st,
        "--layer",
        "optical",
        "--a",
        "AMEN1-TRX1",
        "--z",
        "MCEN2-TRX1",
        "--format",
        "bogus",
    ]);
    assert_eq!(r.error_code(), "INVALID_REQUEST");
}

#[test]
fn slice_lifecycle() {
    let dir = tempfile::tempdir().unwrap();
    let st = state_in(&dir);
    let r = cli(&["slice", "create", "--state", &st, "--id", "cctv"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let slice = &r.report()["result"]["slice"];
    assert_eq!(slice["state"], "ACTIVE");
    assert_eq!(slice["plan"]["assignment"]["ANALYTICS"], "AMEN2");

    let r = cli(&["slice", "create", "--state", &st, "--id", "cctv"]);
    assert_eq!(r.error_code(), "DUPLICATE_SLICE");

    // a slice service cannot be deleted on its own
    let svc =
        cli(&["slice", "show", "--state", &st, "--id", "cctv"]).report()["result"]["slice"]["services"][0].clone();
    let r = cli(&["delete", "--state", &st, "--service", svc.as_str().unwrap()]);
    assert_eq!(r.error_code(), "INVALID_REQUEST");

    let all = cli(&["slice", "show", "--state", &st]).report();
    assert_eq!(all["result"]["vims"].as_array().unwrap().len(), 5);
    let r = cli(&["slice", "delete", "--state", &st, "--id", "cctv"]);
    assert_eq!(r.report()["result"]["slice"]["state"], "TORN_DOWN");
    assert_eq!(cli(&["slice", "delete", "--state", &st, "--id", "cctv"]).error_code(), "INVALID_STATE");
    assert_eq!(cli(&["slice", "show", "--state", &st, "--id", "x"]).error_code(), "UNKNOWN_SLICE");
}

#[test]
fn infeasible_slice_descriptor() {
    let dir = tempfile::tempdir().unwrap();
    let st = state_in(&dir);
    let nsd = dir.path().join("nsd.json");
    std::fs::write(
        &nsd,
        r#"{"vnfs":[{"name":"BIG","kind":"ANALYTICS","cpu_cores":4096,"ram_gb":1,"storage_tb":0,"allowed_tiers":["EDC"]}],"links":[]}"#,
    )
    .unwrap();
    let r = cli(&["slice", "create", "--state", &st, "--id", "s", "--nsd", nsd.to_str().unwrap()]);
    assert_eq!(r.error_code(), "PLACEMENT_INFEASIBLE");
    std::fs::write(&nsd, r#"{"vnfs":[{"name":"X"}]}"#).unwrap();
    let r = cli(&["slice", "create", "--state", &st, "--id", "s", "--nsd", nsd.to_str().unwrap()]);
    assert_eq!(r.error_code(), "INVALID_NSD");
}

#[test]
fn scenario_is_reproducible() {
    let a = cli(&["scenario", "--seed", "9"]).report();
    let b = cli(&["scenario", "--seed", "9"]).report();
    assert_eq!(a["result"], b["result"]);
    assert_eq!(a["seed"], 9);
    assert_eq!(a["result"]["cameras"].as_array().unwrap().len(), 450);
    let r = cli(&["scenario", "--seed", "9", "--cameras-per-amen", "50"]);
    assert_eq!(r.report()["warnings"].as_array().unwrap().len(), 1);
    let r = cli(&["scenario", "--seed", "9", "--ptz-fraction", "2"]);
    assert_eq!(r.error_code(), "INVALID_PARAMS");
}

#[test]
fn experiment_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("h.csv");
    let out = dir.path().join("m.json");
    let r = cli(&[
        "experiment",
        "--seed",
        "4",
        "--arrival-rate",
        "20",
        "--mean-hold",
        "1",
        "--requests",
        "3000",
        "--csv-out",
        csv.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}", r.err);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("bucket_ms_low,bucket_ms_high,count\n"));
    let total: u64 = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap()).sum();
    let m: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(total, m["accepted"].as_u64().unwrap());
    assert_eq!(m["offered_load_erlang"], 20.0);
    let r = cli(&["experiment", "--seed", "4", "--arrival-rate", "-1"]);
    assert_eq!(r.error_code(), "INVALID_PARAMS");
    let r = cli(&["experiment", "--seed", "4", "--demand", "abc"]);
    assert_eq!(r.error_code(), "INVALID_PARAMS");
}
