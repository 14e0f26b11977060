use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_deptree"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("deptree-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(name: &str, contents: &str) -> PathBuf {
    let p = scratch(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

#[test]
fn learn_is_deterministic() {
    let input = data("housing.csv");
    let a = run(&["learn", "--input", input.to_str().unwrap()]);
    let b = run(&["learn", "--input", input.to_str().unwrap()]);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn learn_json_matches_schema() {
    let input = data("housing.csv");
    let o = run(&[
        "learn",
        "--input",
        input.to_str().unwrap(),
        "--measure",
        "rho",
    ]);
    assert!(o.status.success());
    let v = json(&o);
    let nodes = v["nodes"].as_array().unwrap();
    assert_eq!(nodes.len(), 14);
    let edges = v["edges"].as_array().unwrap();
    assert_eq!(edges.len(), 13);
    for e in edges {
        let w = e["weight"].as_f64().unwrap();
        let s = e["signed_value"].as_f64().unwrap();
        assert_eq!(w, s.abs());
        assert!(nodes.iter().any(|n| n == &e["u"]));
        assert!(nodes.iter().any(|n| n == &e["v"]));
    }
    assert_eq!(v["measure"], "rho_abs");
    assert_eq!(v["lattice_order"], 506);
    let ratio = v["coverage_ratio"].as_f64().unwrap();
    assert!(ratio > 0.0 && ratio <= 1.0);
    let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
    assert_eq!(keys.len(), 5);
}

#[test]
fn dot_output_is_a_spanning_tree() {
    let input = data("abalone.csv");
    let dot = scratch("abalone.dot");
    let js = scratch("abalone.json");
    let o = run(&[
        "learn",
        "--input",
        input.to_str().unwrap(),
        "--dot",
        dot.to_str().unwrap(),
        "--json",
        js.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("graph deptree {"));
    assert!(text.trim_end().ends_with('}'));
    let edges: Vec<&str> = text.lines().filter(|l| l.contains(" -- ")).collect();
    assert_eq!(edges.len(), 8);
    for line in &edges {
        let label = line
            .split("label=\"")
            .nth(1)
            .unwrap()
            .trim_end_matches("\"];");
        let decimals = label.split('.').nth(1).unwrap();
        assert_eq!(decimals.len(), 4, "{line}");
    }
    let nodes = text
        .lines()
        .filter(|l| l.trim_end().ends_with("\";"))
        .count();
    assert_eq!(nodes, 9);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&js).unwrap()).unwrap();
    assert_eq!(v["edges"].as_array().unwrap().len(), 8);
}

#[test]
fn dot_escapes_quotes() {
    let input = write("quoted.csv", "\"a\"\"q\",b\n1,2\n2,1\n3,4\n4,3\n");
    let dot = scratch("quoted.dot");
    let o = run(&[
        "learn",
        "--input",
        input.to_str().unwrap(),
        "--measure",
        "rho",
        "--dot",
        dot.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.contains(r#""a\"q" -- "b""#), "{text}");
}

#[test]
fn two_column_learn_matches_measure() {
    let input = write(
        "pair.csv",
        "x,y\n0.1,3\n0.5,1\n0.2,4\n0.9,1.5\n0.3,5\n0.7,9\n0.4,2.5\n0.8,8\n0.6,7\n1.0,6\n",
    );
    for (flag, tag) in [("rho", "rho"), ("mi-cell", "mi_cell")] {
        let learn = run(&[
            "learn",
            "--input",
            input.to_str().unwrap(),
            "--measure",
            flag,
        ]);
        assert!(learn.status.success(), "{}", stderr(&learn));
        let v = json(&learn);
        let edge = &v["edges"][0];
        let measure = run(&[
            "measure",
            "--input",
            input.to_str().unwrap(),
            "--pair",
            "x,y",
            "--measure",
            flag,
        ]);
        assert!(measure.status.success());
        let text = stdout(&measure);
        assert!(text.starts_with(&format!("{tag}(x, y) = ")), "{text}");
        let value: f64 = text
            .split(" = ")
            .nth(1)
            .unwrap()
            .split_whitespace()
            .next()
            .unwrap()
            .parse()
            .unwrap();
        assert_eq!(value, edge["signed_value"].as_f64().unwrap());
        if flag == "mi-cell" {
            assert!(text.contains("(K = 3)"), "{text}");
        }
    }
}

#[test]
fn measure_examples() {
    let toy = write("toy.csv", "a,b\n1,10\n2,20\n");
    let o = run(&[
        "measure",
        "--input",
        toy.to_str().unwrap(),
        "--pair",
        "a,b",
        "--measure",
        "rho",
    ]);
    assert_eq!(stdout(&o), "rho(a, b) = 1\n");

    let rows: String = (0..50)
        .map(|i| format!("{i},{}\n", -(i as f64) * 0.5))
        .collect();
    let neg = write("neg.csv", &format!("x,negx\n{rows}"));
    let o = run(&[
        "measure",
        "--input",
        neg.to_str().unwrap(),
        "--pair",
        "x,negx",
        "--measure",
        "rho",
    ]);
    let rho: f64 = stdout(&o)
        .trim()
        .rsplit(' ')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((rho + 1.0).abs() <= 2.0 / 50.0);

    let o = run(&["measure", "--input", toy.to_str().unwrap(), "--pair", "a,a"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("itself"));
    let o = run(&["measure", "--input", toy.to_str().unwrap(), "--pair", "a,c"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown column"));
    let o = run(&["measure", "--input", toy.to_str().unwrap(), "--pair", "ab"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn synth_is_reproducible_and_round_trips() {
    let spec = data("synthetic_blocks.json");
    let a = run(&["synth", "--spec", spec.to_str().unwrap()]);
    let b = run(&["synth", "--spec", spec.to_str().unwrap()]);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().count(), 1001);
    assert_eq!(text.lines().next().unwrap(), "G1,G2,G3,Cn,Ce");
    assert!(text.lines().skip(1).all(|l| l.split(',').count() == 5));

    let other = run(&["synth", "--spec", spec.to_str().unwrap(), "--seed", "7"]);
    assert_ne!(other.stdout, a.stdout);

    let csv = scratch("blocks.csv");
    let o = run(&[
        "synth",
        "--spec",
        spec.to_str().unwrap(),
        "--output",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(std::fs::read(&csv).unwrap(), a.stdout);

    let learn = run(&["learn", "--input", csv.to_str().unwrap()]);
    let v = json(&learn);
    let edges: Vec<(String, String)> = v["edges"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            (
                e["u"].as_str().unwrap().into(),
                e["v"].as_str().unwrap().into(),
            )
        })
        .collect();
    let gauss = |n: &str| n.starts_with('G');
    let within = edges.iter().filter(|(u, v)| gauss(u) && gauss(v)).count();
    let across = edges.iter().filter(|(u, v)| gauss(u) != gauss(v)).count();
    assert_eq!(within, 2);
    assert_eq!(across, 1);
    assert!(edges.contains(&("Cn".into(), "Ce".into())));
}

#[test]
fn identity_spec_gives_independent_columns() {
    let spec = write(
        "identity.json",
        r#"{"blocks":[],"margins":[{"family":"standard_normal"},{"family":"standard_normal"}],"samples":1000,"seed":3}"#,
    );
    // Under independence rho has sd 1/sqrt(T-1) ≈ 0.032, so 0.08 is a
    // 2.5-sigma bound: about one seed in eighty exceeds it. Allow two
    // exceedances in twenty (P ≈ 0.002 of a third) and nothing beyond 4 sigma.
    let csv = scratch("identity.csv");
    let mut exceed = 0;
    for seed in 0..20 {
        let s = seed.to_string();
        let o = run(&[
            "synth",
            "--spec",
            spec.to_str().unwrap(),
            "--output",
            csv.to_str().unwrap(),
            "--seed",
            &s,
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        let m = run(&[
            "measure",
            "--input",
            csv.to_str().unwrap(),
            "--pair",
            "x1,x2",
            "--measure",
            "rho",
        ]);
        let rho: f64 = stdout(&m)
            .trim()
            .rsplit(' ')
            .next()
            .unwrap()
            .parse()
            .unwrap();
        assert!(rho.abs() < 0.127, "seed {seed}: rho = {rho}");
        exceed += usize::from(rho.abs() >= 0.08);
    }
    assert!(exceed <= 2, "{exceed} of 20 seeds had |rho| >= 0.08");
}

#[test]
fn error_paths_exit_one() {
    let not_pd = write(
        "notpd.json",
        r#"{"blocks":[{"vars":[1,2],"family":"gaussian","theta":1.5}],"margins":[{"family":"standard_normal"},{"family":"standard_normal"}],"samples":10}"#,
    );
    let o = run(&["synth", "--spec", not_pd.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));

    let overlapping = write(
        "overlap.json",
        r#"{"blocks":[{"vars":[1,2,3],"family":"gaussian","theta":0.9},{"vars":[1,3],"family":"gaussian","theta":-0.9}],"margins":[{"family":"standard_normal"},{"family":"standard_normal"},{"family":"standard_normal"}],"samples":10}"#,
    );
    let o = run(&["synth", "--spec", overlapping.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr(&o).lines().count(), 1);

    let bad = write("bad.csv", "a,b\n1,x\n2,3\n");
    let o = run(&["learn", "--input", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let msg = stderr(&o);
    assert_eq!(msg.lines().count(), 1);
    assert!(msg.contains("row 1") && msg.contains("\"b\""), "{msg}");

    let single = write("single.csv", "a\n1\n2\n");
    assert_eq!(
        run(&["learn", "--input", single.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );

    let housing = data("housing.csv");
    let o = run(&[
        "learn",
        "--input",
        housing.to_str().unwrap(),
        "--lattice-order",
        "507",
    ]);
    assert_eq!(o.status.code(), Some(1));

    let constant: String = (0..20).map(|i| format!("{i},1\n")).collect();
    let constant = write("constant.csv", &format!("a,b\n{constant}"));
    let o = run(&[
        "learn",
        "--input",
        constant.to_str().unwrap(),
        "--measure",
        "mi-kde",
    ]);
    assert_eq!(o.status.code(), Some(1));

    let o = run(&["learn", "--input", "/nonexistent/file.csv"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&[
        "learn",
        "--input",
        housing.to_str().unwrap(),
        "--measure",
        "bogus",
    ]);
    assert_eq!(o.status.code(), Some(1));
}
