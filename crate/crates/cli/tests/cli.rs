use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use zcolor_core::{verify_trace, MoveTrace};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fx(name: &str) -> String {
    fixtures().join(name).display().to_string()
}

fn zcolor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zcolor")).args(args).env("ZCOLOR_FIXTURES", fixtures()).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn analyze_reports() {
    let out = zcolor(&["analyze", &fx("L8n6.pd")]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["link_name"], "L8n6");
    assert_eq!(r["determinant"], 0);
    assert_eq!(r["colorable"], true);
    for key in ["image", "simple_d", "achieved", "lower_bound"] {
        assert!(r.get(key).is_some(), "{key}");
    }

    let r = json(&zcolor(&["analyze", "--pretzel", "2,-2,2,-2"]));
    assert_eq!(r["colorable"], true);
    assert!(r["simple_d"].is_i64());

    let out = zcolor(&["analyze", &fx("hopf.pd")]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["determinant"], 2);
    assert_eq!(r["colorable"], false);
}

#[test]
fn reduce_reports_and_traces() {
    let r = json(&zcolor(&["reduce", "--pretzel", "3,-3"]));
    assert_eq!(r["achieved"], 4);
    assert_eq!(r["lower_bound"], 4);

    assert_eq!(code(&zcolor(&["reduce", &fx("hopf.pd")])), 3);

    let dir = tempfile::tempdir().unwrap();
    for name in ["L10n32", "L9n19"] {
        let t = dir.path().join(format!("{name}.json"));
        let out = zcolor(&["reduce", &fx(&format!("{name}.pd")), "--trace", t.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let trace = MoveTrace::from_json(&std::fs::read_to_string(&t).unwrap()).unwrap();
        assert_eq!(verify_trace(&trace), Ok(()));
        assert_eq!(trace.final_coloring().image().len() as u64, json(&out)["achieved"].as_u64().unwrap());
    }
}

/// Vertex and labeled edge lists read back from DOT text.
fn read_dot(text: &str) -> (Vec<i64>, Vec<(i64, i64, i64)>) {
    let num = |s: &str| s.trim().trim_matches('"').parse::<i64>().unwrap();
    let mut vs = Vec::new();
    let mut es = Vec::new();
    for line in text.lines().map(str::trim) {
        if let Some((lhs, rest)) = line.split_once(" -- ") {
            let (rhs, label) = rest.split_once(" [label=").unwrap();
            es.push((num(lhs), num(rhs), num(label.trim_end_matches("];"))));
        } else if line.starts_with('"') {
            vs.push(num(line.trim_end_matches(';')));
        }
    }
    (vs, es)
}

fn component_count(vs: &[i64], es: &[(i64, i64, i64)]) -> usize {
    let mut comp: BTreeMap<i64, i64> = vs.iter().map(|&v| (v, v)).collect();
    for _ in 0..vs.len() {
        for &(a, b, _) in es {
            let m = comp[&a].min(comp[&b]);
            comp.insert(a, m);
            comp.insert(b, m);
        }
    }
    let mut roots: Vec<i64> = comp.into_values().collect();
    roots.sort();
    roots.dedup();
    roots.len()
}

#[test]
fn palette_dot() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("p.dot");
    let out = zcolor(&["palette", &fx("L8n6.pd"), "--dot", dot.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("graph palette {"));
    let (vs, es) = read_dot(&text);
    assert_eq!(vs, vec![0, 1, 2, 3, 4]);
    assert_eq!(component_count(&vs, &es), 2);
    assert!(es.contains(&(1, 3, 2)));
    assert!(es.iter().all(|&(a, b, l)| (a - b) % 2 == 0 && 2 * l == a + b));

    assert_eq!(code(&zcolor(&["palette", &fx("trefoil.pd")])), 3);
}

#[test]
fn output_is_deterministic() {
    let a = zcolor(&["analyze", "--all", fixtures().to_str().unwrap()]);
    let b = zcolor(&["analyze", "--all", fixtures().to_str().unwrap()]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let all = json(&a);
    assert_eq!(all.as_array().unwrap().len(), 20);
    let dir = tempfile::tempdir().unwrap();
    let t1 = dir.path().join("a.json");
    let t2 = dir.path().join("b.json");
    zcolor(&["reduce", "--pretzel", "4,-4,4,-4", "--trace", t1.to_str().unwrap()]);
    zcolor(&["reduce", "--pretzel", "4,-4,4,-4", "--trace", t2.to_str().unwrap()]);
    assert_eq!(std::fs::read(t1).unwrap(), std::fs::read(t2).unwrap());
}

#[test]
fn parse_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pd");
    std::fs::write(&bad, "X[1,2,3,4]").unwrap();
    assert_eq!(code(&zcolor(&["analyze", bad.to_str().unwrap()])), 1);
    assert_eq!(code(&zcolor(&["analyze", "--pretzel", "2,x"])), 1);
    assert_eq!(code(&zcolor(&["analyze"])), 1);
    assert_eq!(code(&zcolor(&["frobnicate"])), 1);
}

fn selftest_in(dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zcolor")).arg("selftest").env("ZCOLOR_FIXTURES", dir).output().unwrap()
}

#[test]
fn selftest_passes_on_the_checkout() {
    let out = zcolor(&["selftest"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(json(&out).as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn selftest_names_corrupt_and_missing_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    for e in std::fs::read_dir(fixtures()).unwrap() {
        let p = e.unwrap().path();
        if p.extension().is_some_and(|x| x == "pd") {
            std::fs::copy(&p, dir.path().join(p.file_name().unwrap())).unwrap();
        }
    }
    std::fs::write(dir.path().join("L9n27.pd"), "X[1,2,3").unwrap();
    let out = selftest_in(dir.path());
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("L9n27.pd"));

    let out = selftest_in(&dir.path().join("nowhere"));
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not exist"));
}
