use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pqgraph::io::{read_instance, write_instance};
use pqgraph::{CoefficientFields, Exponents, GraphFunction, ProblemInstance, WeightedGraph};
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pqgraph"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn grid_text() -> String {
    let mut lines = vec!["graph 100".to_string(), "exponents 3 2 0.5 3".to_string()];
    for x in 0..100 {
        lines.push(format!("v {x} 1 1 1 0.1 1"));
    }
    for r in 0..10 {
        for c in 0..10 {
            let x = r * 10 + c;
            if c < 9 {
                lines.push(format!("e {x} {} 1", x + 1));
            }
            if r < 9 {
                lines.push(format!("e {x} {} 1", x + 10));
            }
        }
    }
    lines.join("\n") + "\n"
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_two_vertex_fixture() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "two.txt", "graph 2\nv a 1\nv b 1\ne a b 2\n");
    let o = run(&["validate", "--instance", s(&p)]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["valid"], true);
    assert_eq!(v["mu0"].as_f64(), Some(1.0));
    assert_eq!(v["degree_bound"].as_f64(), Some(2.0));
}

#[test]
fn validate_reports_disconnected_graph() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "split.txt", "graph 3\nv a 1\nv b 1\nv c 1\ne a b 1\n");
    let o = run(&["validate", "--instance", s(&p)]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["valid"], false);
}

#[test]
fn parse_errors_name_the_line() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "bad.txt", "graph 2\nv a 1\nv b x\n");
    let o = run(&["validate", "--instance", s(&p)]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    let o = run(&["validate", "--instance", s(&dir.path().join("missing.txt"))]);
    assert_eq!(code(&o), 3);
}

#[test]
fn constants_by_ratio() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "grid.txt", &grid_text());
    let o = run(&["constants", "--instance", s(&p), "--lambda-ratio", "0.5"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let f = |k: &str| v[k].as_f64().unwrap();
    assert!((f("lambda") - 0.5 * f("lambda_star")).abs() <= 1e-15 * f("lambda_star"));
    assert!(f("x_lambda") > f("x0") && f("s_lambda") > f("s0"));
    assert!(f("identity_defect_x") <= 1e-12 && f("identity_defect_s") <= 1e-12);
    let o = run(&["constants", "--instance", s(&p), "--lambda", "-1"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn solve_negative_single_vertex_matches_scalar_root() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "one.txt", "graph 1\nexponents 2 2 0.5 3\nv x 1 1 1 1 1\n");
    let o = run(&[
        "solve-negative",
        "--instance",
        s(&p),
        "--lambda",
        "-1",
        "--grad-tol",
        "1e-12",
    ]);
    assert_eq!(code(&o), 0);
    let u = json(&o)["solution"]["x"].as_f64().unwrap();
    let h = |u: f64| 2.0 * u - u.powf(-0.5) + u.powi(3);
    let (mut a, mut b) = (1e-3, 10.0);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if h(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    assert!((u - a).abs() <= 1e-10 * a, "{u} vs {a}");
    let o = run(&["solve-negative", "--instance", s(&p), "--lambda", "0.5"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn solve_output_is_deterministic_and_verifiable() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "grid.txt", &grid_text());
    let out1 = dir.path().join("a.json");
    let out2 = dir.path().join("b.json");
    for out in [&out1, &out2] {
        let o = run(&[
            "solve-minus",
            "--instance",
            s(&p),
            "--lambda-ratio",
            "0.5",
            "--seed",
            "4",
            "--out",
            s(out),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = std::fs::read(&out1).unwrap();
    assert_eq!(a, std::fs::read(&out2).unwrap());
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["nehari_class"], "minus");
    let o = run(&[
        "verify",
        "--instance",
        s(&p),
        "--lambda-ratio",
        "0.5",
        "--solution",
        s(&out1),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["nehari_class"], "minus");

    let big = write(
        &dir,
        "big.json",
        &format!(
            "{{\"solution\": {{{}}}}}",
            (0..100).map(|x| format!("\"{x}\": 50")).collect::<Vec<_>>().join(",")
        ),
    );
    let o = run(&[
        "verify",
        "--instance",
        s(&p),
        "--lambda-ratio",
        "0.5",
        "--solution",
        s(&big),
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn stall_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "grid.txt", &grid_text());
    let o = run(&[
        "solve-negative",
        "--instance",
        s(&p),
        "--lambda",
        "-1",
        "--max-iters",
        "1",
        "--grad-tol",
        "1e-30",
    ]);
    assert_eq!(code(&o), 2);
    assert_eq!(json(&o)["converged"], false);
}

#[test]
fn fiber_csv_with_summary() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "grid.txt", &grid_text());
    let out = dir.path().join("fiber.csv");
    let o = run(&[
        "fiber",
        "--instance",
        s(&p),
        "--lambda-ratio",
        "0.5",
        "--points",
        "50",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0);
    let table = std::fs::read_to_string(&out).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("t,phi,phi_prime,J_of_tu"));
    assert_eq!(lines.count(), 50);
    let summary: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fiber.csv.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["classification"], "two_roots");
    let (t1, tt, t2) = (
        summary["t1"].as_f64().unwrap(),
        summary["t_tilde"].as_f64().unwrap(),
        summary["t2"].as_f64().unwrap(),
    );
    assert!(t1 < tt && tt < t2);
}

fn column(table: &str, name: &str) -> Vec<f64> {
    let mut lines = table.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
}

#[test]
fn sweeps() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "grid.txt", &grid_text());
    let o = run(&[
        "sweep",
        "--instance",
        s(&p),
        "--lambda-ratios",
        "0.1,0.3,0.5,0.7,0.9",
        "--solve",
        "--jobs",
        "2",
    ]);
    assert_eq!(code(&o), 0);
    let table = String::from_utf8(o.stdout).unwrap();
    let x = column(&table, "x_lambda");
    assert!(x.windows(2).all(|w| w[1] < w[0]));
    assert!(table.lines().skip(1).all(|l| l.contains("true")));

    let o = run(&[
        "sweep",
        "--instance",
        s(&p),
        "--p-values",
        "3.5,3.75,3.875,3.9375",
        "--lambda-ratio",
        "0.5",
    ]);
    assert_eq!(code(&o), 0);
    let x = column(&String::from_utf8(o.stdout).unwrap(), "x_lambda");
    assert!(x.windows(2).all(|w| w[1] > w[0]));

    assert_eq!(code(&run(&["sweep", "--instance", s(&p), "--lambda-ratios", ""])), 3);
    assert_eq!(code(&run(&["sweep", "--instance", s(&p)])), 3);

    let o = run(&[
        "sweep",
        "--instance",
        s(&p),
        "--lambdas",
        "-1",
        "--solve",
        "--max-iters",
        "1",
        "--grad-tol",
        "1e-30",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn written_instances_reload_bit_exact() {
    let g = WeightedGraph::from_edges(
        vec![0.3, 1.0 / 3.0, 2.5, 0.7],
        &[(0, 1, 0.1), (1, 2, 1.0 / 7.0), (2, 3, 3.3), (3, 0, 1e-3)],
    );
    let fields = CoefficientFields::new(
        GraphFunction::new(vec![0.2, 1.7, 1.0 / 9.0, 3.0]),
        GraphFunction::new(vec![1.1, 0.9, 2.0, 0.4]),
        GraphFunction::new(vec![0.05, 0.1, 0.15, 0.2]),
        GraphFunction::new(vec![1.0, 0.0, 0.3, 2.0]),
    )
    .unwrap();
    let e = Exponents::new(2.7, 1.6, 0.3, 2.9).unwrap();
    let original = ProblemInstance::new(g.clone(), fields.clone(), e, 0.1).unwrap();
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "inst.txt", &write_instance(&g, Some(&fields), Some(&e)));
    let back = read_instance(&p).unwrap();
    let reloaded = ProblemInstance::new(back.graph, back.fields.unwrap(), back.exponents.unwrap(), 0.1).unwrap();
    let (a, b) = (original.scalars(), reloaded.scalars());
    assert_eq!(a.a0.to_bits(), b.a0.to_bits());
    assert_eq!(a.b0.to_bits(), b.b0.to_bits());
    assert_eq!(a.mu0.to_bits(), b.mu0.to_bits());
    assert_eq!(a.f_norm_p.to_bits(), b.f_norm_p.to_bits());
    assert_eq!(a.f_norm_q.to_bits(), b.f_norm_q.to_bits());
    assert_eq!(a.g_sup.to_bits(), b.g_sup.to_bits());
}

#[test]
fn help_exits_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["frobnicate"])), 3);
}
