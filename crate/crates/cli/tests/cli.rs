use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use windflow::acopf::FarmLimits;
use windflow::grid::load_case_file;
use windflow::wind::ScenarioSet;

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(rel)
}

fn case(name: &str) -> PathBuf {
    data(&format!("cases/{name}.json"))
}

fn windflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_windflow"))
        .args(args)
        .env_remove("WINDFLOW_SOLVER")
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gaps(dir: &Path) -> Vec<(String, f64)> {
    let mut r = csv::Reader::from_path(dir.join("gaps.csv")).unwrap();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            (rec[2].to_string(), rec[3].parse().unwrap())
        })
        .collect()
}

fn gen(case_name: &str, per_farm: &str, seed: &str, out: &Path) -> Output {
    windflow(&[
        "gen-scenarios",
        "--case",
        s(&case(case_name)),
        "--synthetic",
        "2.0",
        "7.5",
        "400",
        "--curves",
        s(&data("curves")),
        "--per-farm",
        per_farm,
        "--seed",
        seed,
        "--out",
        s(out),
    ])
}

fn trace_rows(dir: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(dir.join("trace.csv")).unwrap();
    // Drop the wall-clock column.
    r.records()
        .map(|rec| rec.unwrap().iter().take(4).map(String::from).collect())
        .collect()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn manifests(dir: &Path) -> usize {
    fs::read_dir(dir)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().file_name() == "manifest.json")
        .count()
}

#[test]
fn run_opf_reports_six_gap_families() {
    let tmp = tempfile::tempdir().unwrap();
    let soc = tmp.path().join("soc");
    let dc = tmp.path().join("dc");
    let out = windflow(&["run-opf", s(&case("ieee14")), "--model", "soc", "--out", s(&soc)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = windflow(&["run-opf", s(&case("ieee14")), "--model", "dc", "--out", s(&dc)]);
    assert!(out.status.success());

    let (soc_gaps, dc_gaps) = (gaps(&soc), gaps(&dc));
    let families: Vec<_> = soc_gaps.iter().map(|(f, _)| f.as_str()).collect();
    assert_eq!(families, ["1a", "1b", "1c", "1d", "1e", "1f"]);
    assert!(soc_gaps[0].1 <= 1e-6 && soc_gaps[1].1 <= 1e-6);
    assert!(dc_gaps[2].1 > soc_gaps[2].1);
    for dir in [&soc, &dc] {
        for f in ["solution.json", "point.json", "gaps.csv"] {
            assert!(dir.join(f).exists(), "{f}");
        }
        assert_eq!(manifests(dir), 1);
    }
    assert_eq!(json(&soc.join("manifest.json"))["command"], "run-opf");
}

#[test]
fn input_errors_exit_with_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = windflow(&["run-opf", "/no/such/case.json", "--out", s(tmp.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("loading case"));

    let out = gen("ieee30_mtdc_4farm", "0", "1", &tmp.path().join("zero"));
    assert_eq!(out.status.code(), Some(2));

    let bad = Command::new(env!("CARGO_BIN_EXE_windflow"))
        .args(["run-opf", s(&case("two_bus")), "--out", s(&tmp.path().join("b"))])
        .env("WINDFLOW_SOLVER", "simplex")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn scenario_generation_is_counted_and_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let out = gen("ieee30_mtdc_4farm", "3", "11", &a);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "81");
    gen("ieee30_mtdc_4farm", "3", "11", &b);
    for f in ["scenarios.json", "scenarios.csv", "distribution.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let set = ScenarioSet::from_json(&fs::read_to_string(a.join("scenarios.json")).unwrap()).unwrap();
    assert!((set.total_probability() - 1.0).abs() < 1e-9);
    assert_eq!(manifests(&a), 1);
}

#[test]
fn measurement_files_are_accepted() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("speeds.csv");
    let speeds: String = (0..200).map(|k| format!("{:.3},x\n", 3.0 + 9.0 * ((k * 37 % 200) as f64) / 200.0)).collect();
    fs::write(&path, format!("speed,site\n{speeds}")).unwrap();
    let out = windflow(&[
        "gen-scenarios",
        "--case",
        s(&case("tight_vss")),
        "--measurements",
        s(&path),
        "--family",
        "rayleigh",
        "--curves",
        s(&data("curves")),
        "--per-farm",
        "4",
        "--out",
        s(&tmp.path().join("out")),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "4");
    let dist = json(&tmp.path().join("out/distribution.json"));
    assert_eq!(dist["family"], "rayleigh");
}

#[test]
fn decomposition_agrees_with_single_stage() {
    let tmp = tempfile::tempdir().unwrap();
    let sc = tmp.path().join("sc");
    gen("ieee30_mtdc", "3,2", "5", &sc);
    let scen = sc.join("scenarios.json");
    let c = case("ieee30_mtdc");
    let run = |method: &str, extra: &[&str], name: &str| {
        let dir = tmp.path().join(name);
        let mut args = vec!["solve", s(&c), s(&scen), "--method", method, "--out"];
        args.push(dir.to_str().unwrap());
        args.extend_from_slice(extra);
        let out = windflow(&args);
        (out, dir)
    };
    let (out, single) = run("single", &[], "single");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let o = json(&single.join("solution.json"))["objective"].as_f64().unwrap();
    assert!(!single.join("trace.csv").exists());
    let size = json(&single.join("size.json"));
    assert_eq!(size["parameters"]["scenarios"], 6);

    let (out, par) = run("parallel-bda", &["--workers", "2"], "par");
    assert!(out.status.success());
    let ub = json(&par.join("solution.json"))["objective"].as_f64().unwrap();
    assert!((ub - o) / o <= 0.02 && ub >= o - 1e-6 * o, "{ub} vs {o}");
    assert_eq!(json(&par.join("solution.json"))["method"], "parallel-bda");

    let (_, p1) = run("parallel-bda", &["--workers", "1"], "p1");
    let (_, ser) = run("serial-bda", &[], "ser");
    assert_eq!(trace_rows(&p1), trace_rows(&ser));
    assert_eq!(fs::read(p1.join("cuts.json")).unwrap(), fs::read(ser.join("cuts.json")).unwrap());
    assert_eq!(manifests(&ser), 1);

    let (_, loose) = run("serial-bda", &["--gap", "0.5"], "loose");
    assert!(trace_rows(&loose).len() <= trace_rows(&ser).len());

    let (out, _) = run("serial-bda", &["--max-iter", "1"], "capped");
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn vss_command_reports_the_table() {
    let tmp = tempfile::tempdir().unwrap();
    let sc = tmp.path().join("sc");
    gen("tight_vss", "6", "3", &sc);
    let c = case("tight_vss");
    let out_dir = tmp.path().join("vss");
    let out = windflow(&["vss", s(&c), s(&sc.join("scenarios.json")), "--out", s(&out_dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out_dir.join("vss.json"));
    let vss = r["vss"].as_f64().unwrap();
    assert!(vss > 0.0);

    // The mean-wind dispatch sheds load; its cost is the dispatch cost plus
    // VoLL times the expected shed, plus at most the wind energy cost.
    let grid = load_case_file(&c).unwrap();
    let p = r["deterministic_dispatch"][0].as_f64().unwrap();
    let shed = r["expected_shed_deterministic"].as_f64().unwrap();
    let floor = grid.generators[0].cost(p) + grid.voll * shed;
    let det = r["deterministic_cost"].as_f64().unwrap();
    let farm = &grid.wind_farms[0];
    let wind_cap = farm.cost_c1 * 0.6;
    assert!(shed > 0.0);
    assert!(det >= floor - 1e-6 * det && det <= floor + wind_cap, "{det} vs {floor}");

    let same = tmp.path().join("same.json");
    let limits = FarmLimits {
        p_min: 0.0,
        p_max: 0.3,
        q_min: -0.1,
        q_max: 0.1,
    };
    let set = ScenarioSet::from_limits(vec![farm.id.clone()], vec![(0.25, vec![limits]); 4]);
    fs::write(&same, set.to_json()).unwrap();
    let out_dir = tmp.path().join("vss0");
    let out = windflow(&["vss", s(&c), s(&same), "--out", s(&out_dir)]);
    assert!(out.status.success());
    let r = json(&out_dir.join("vss.json"));
    let scale = r["stochastic_cost"].as_f64().unwrap().abs().max(1.0);
    assert!(r["vss"].as_f64().unwrap().abs() < 1e-7 * scale, "{r}");
}
