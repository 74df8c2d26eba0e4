//! Acceptance: the full pipeline is byte-for-byte reproducible under a
//! fixed seed.

use std::path::Path;
use std::process::Command;

fn chromaheat(args: &[&str]) {
    let out = Command::new(env!("CARGO_BIN_EXE_chromaheat"))
        .args(args)
        .output()
        .expect("spawn chromaheat");
    assert!(
        out.status.success(),
        "chromaheat {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

const CONFIG: &str = r#"
seed = 1234
[[scenarios]]
kind = "Case1"
[[scenarios]]
kind = "Case2"
[[scenarios]]
kind = "Case3"
[[scenarios]]
kind = "Comfort"
[[scenarios]]
kind = "Case1"
[[scenarios]]
kind = "Case2"
[[scenarios]]
kind = "Case3"
[[scenarios]]
kind = "Comfort"
[[scenarios]]
kind = "Case1"
[[scenarios]]
kind = "Case2"
[[scenarios]]
kind = "Case3"
[[scenarios]]
kind = "Comfort"
"#;

/// simulate -> detect -> calibrate -> classify -> export-map -> advise,
/// all files kept under `root`.
fn run_pipeline(root: &Path, cfg: &Path) {
    let sim_dir = root.join("sim");
    chromaheat(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        sim_dir.to_str().unwrap(),
    ]);
    let mut event_files = Vec::new();
    let mut traces: Vec<_> = std::fs::read_dir(&sim_dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    traces.sort();
    for trace in traces {
        let events = root.join(format!(
            "{}.events.jsonl",
            trace.file_stem().unwrap().to_string_lossy()
        ));
        chromaheat(&[
            "detect",
            "--config",
            cfg.to_str().unwrap(),
            "--trace",
            trace.to_str().unwrap(),
            "--out",
            events.to_str().unwrap(),
        ]);
        event_files.push(events);
    }
    let model = root.join("model.toml");
    let mut calibrate_args = vec!["calibrate".to_string(), "--events".to_string()];
    calibrate_args.extend(event_files.iter().map(|p| p.to_str().unwrap().to_string()));
    calibrate_args.push("--out".into());
    calibrate_args.push(model.to_str().unwrap().into());
    let arg_refs: Vec<&str> = calibrate_args.iter().map(String::as_str).collect();
    chromaheat(&arg_refs);

    chromaheat(&[
        "classify",
        "--model",
        model.to_str().unwrap(),
        "--events",
        event_files[0].to_str().unwrap(),
        "--out",
        root.join("classified.jsonl").to_str().unwrap(),
    ]);

    let mut map_args = vec!["export-map".to_string(), "--events".to_string()];
    map_args.extend(event_files.iter().map(|p| p.to_str().unwrap().to_string()));
    map_args.push("--model".into());
    map_args.push(model.to_str().unwrap().into());
    map_args.push("--out".into());
    map_args.push(root.join("map.csv").to_str().unwrap().into());
    let arg_refs: Vec<&str> = map_args.iter().map(String::as_str).collect();
    chromaheat(&arg_refs);

    let mut advise_args = vec!["advise".to_string(), "--events".to_string()];
    advise_args.extend(event_files.iter().map(|p| p.to_str().unwrap().to_string()));
    advise_args.push("--efficiency".into());
    advise_args.push("0.8".into());
    advise_args.push("--horizon".into());
    advise_args.push("43200".into());
    advise_args.push("--out".into());
    advise_args.push(root.join("advice.json").to_str().unwrap().into());
    let arg_refs: Vec<&str> = advise_args.iter().map(String::as_str).collect();
    chromaheat(&arg_refs);
}

fn collect_files(root: &Path, out: &mut Vec<std::path::PathBuf>) {
    for entry in std::fs::read_dir(root).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            collect_files(&path, out);
        } else {
            out.push(path);
        }
    }
}

#[test]
fn criterion_9_pipeline_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, CONFIG).unwrap();
    let run_a = dir.path().join("run_a");
    let run_b = dir.path().join("run_b");
    std::fs::create_dir_all(&run_a).unwrap();
    std::fs::create_dir_all(&run_b).unwrap();
    run_pipeline(&run_a, &cfg);
    run_pipeline(&run_b, &cfg);

    let mut files_a = Vec::new();
    collect_files(&run_a, &mut files_a);
    files_a.sort();
    assert!(files_a.len() >= 28, "expected full pipeline output, got {files_a:?}");
    for a in &files_a {
        let rel = a.strip_prefix(&run_a).unwrap();
        let b = run_b.join(rel);
        let bytes_a = std::fs::read(a).unwrap();
        let bytes_b = std::fs::read(&b).unwrap();
        assert_eq!(bytes_a, bytes_b, "{} differs between runs", rel.display());
    }
    println!(
        "criterion 9 (pipeline determinism, {} files byte-identical): PASS",
        files_a.len()
    );
}
