use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use effective_forms::mae::{jet_from_generators, JetForm};
use effective_forms::multilinear::pullback;
use effective_forms::normal_forms::representative;
use effective_forms::poly::Poly;
use effective_forms::scalar::parse_rational;
use effective_forms::symplectic::is_symplectic;
use effective_forms::{KForm, Mat, Rational};
use serde_json::{json, Value};
use tempfile::TempDir;

type Q = Rational;

fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_effforms")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, doc: &Value) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string(doc).unwrap()).unwrap();
    p
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn doc_of(w: &KForm<Q>) -> Value {
    let terms: Vec<Value> = w
        .terms()
        .map(|(b, c)| json!({"idx": b.indices(), "coef": c.to_string()}))
        .collect();
    json!({"dim": w.dim(), "degree": w.degree(), "scalar": "rational", "terms": terms})
}

fn rep(family: u8, p: Option<i64>) -> KForm<Q> {
    representative(family, p.map(q).as_ref()).unwrap()
}

fn json_report(args: &[&str]) -> (Value, Output) {
    let mut all = args.to_vec();
    all.push("--json");
    let o = run(&all);
    let v = serde_json::from_slice(&o.stdout).unwrap_or(Value::Null);
    (v, o)
}

/// A fixed rational symplectic map: a shear composed with a block-diagonal map.
fn conjugator() -> Mat<Q> {
    let a = Mat::from_rows(vec![
        vec![q(1), q(1), q(0)],
        vec![q(0), q(1), q(2)],
        vec![q(0), q(0), q(1)],
    ]);
    let a_inv_t = a.inverse().unwrap().transpose();
    let s = Mat::from_rows(vec![
        vec![q(1), q(0), q(1)],
        vec![q(0), q(2), q(0)],
        vec![q(1), q(0), q(-1)],
    ]);
    let block = Mat::from_fn(6, 6, |i, j| match (i < 3, j < 3) {
        (true, true) => a[(i, j)].clone(),
        (false, false) => a_inv_t[(i - 3, j - 3)].clone(),
        _ => q(0),
    });
    let shear = Mat::from_fn(6, 6, |i, j| {
        if i == j {
            q(1)
        } else if i < 3 && j >= 3 {
            s[(i, j - 3)].clone()
        } else {
            q(0)
        }
    });
    let f = block.mul(&shear);
    assert!(is_symplectic(&f));
    f
}

#[test]
fn classify_special_lagrangian_row() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "row3.json", &doc_of(&rep(3, Some(1))));
    let (v, o) = json_report(&["classify", path(&p)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(v["orbit"]["family"], 3);
    assert_eq!(v["orbit"]["parameter"]["value"], "1");
    assert_eq!(v["q"]["rank"], 6);
    assert_eq!(v["q"]["signature"], json!([0, 6, 0]));
    assert_eq!(v["stabilizer"]["dim"], 8);
    assert_eq!(v["killing"]["signature"], json!([0, 8, 0]));
    assert_eq!(v["prolongation_dim"], 0);
    assert_eq!(v["basis"], "e1..e3 = 1..3, f1..f3 = 4..6; Omega = sum e_i* ^ f_i*");
    let pde = v["pde"].as_str().unwrap();
    assert!(pde.starts_with("-h11*h22*h33"), "{pde}");
    assert!(pde.ends_with("h11 + h22 + h33"), "{pde}");
    assert!(v.get("witness").is_none());

    let text = stdout(&run(&["classify", path(&p)]));
    assert!(text.contains("orbit: family 3, nu = 1"));
    assert!(text.contains("dim J^(1) = 0"));
}

#[test]
fn empty_terms_is_family_nine() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "zero.json", &json!({"dim": 6, "degree": 3, "scalar": "rational", "terms": []}));
    let (v, o) = json_report(&["classify", path(&p)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(v["orbit"]["family"], 9);
    assert_eq!(v["stabilizer"]["dim"], 21);
}

#[test]
fn conjugated_row_keeps_family_and_parameter() {
    let dir = TempDir::new().unwrap();
    let w = pullback(&conjugator(), &rep(2, Some(2))).unwrap();
    let p = write(&dir, "conj.json", &doc_of(&w));
    let (v, o) = json_report(&["classify", path(&p)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(v["orbit"]["family"], 2);
    assert_eq!(v["orbit"]["parameter"]["name"], "nu");
    assert_eq!(v["orbit"]["parameter"]["value"], "2");
    assert_eq!(v["orbit"]["parameter"]["sixth_power"], "64");
}

#[test]
fn pfaffian_types() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (json!([{"idx": [1, 2], "coef": "1"}, {"idx": [3, 4], "coef": "-1"}]), "+1, elliptic"),
        (json!([{"idx": [1, 2], "coef": "1"}, {"idx": [3, 4], "coef": "1"}]), "-1, hyperbolic"),
        (json!([{"idx": [1, 2], "coef": "1"}]), "0, parabolic"),
    ];
    for (i, (terms, expected)) in cases.into_iter().enumerate() {
        let doc = json!({"dim": 4, "degree": 2, "scalar": "rational", "terms": terms});
        let p = write(&dir, &format!("pf{i}.json"), &doc);
        let o = run(&["pfaffian", path(&p)]);
        assert_eq!(o.status.code(), Some(0));
        let out = stdout(&o);
        assert!(out.contains(expected), "{out}");
        assert!(out.contains("basis: e1..e2 = 1..2, f1..f2 = 3..4"), "{out}");
    }
}

#[test]
fn prolongation_of_degenerate_rows() {
    let dir = TempDir::new().unwrap();
    for family in [4u8, 5] {
        let p = write(&dir, "row.json", &doc_of(&rep(family, None)));
        let o = run(&["prolong", path(&p)]);
        assert_eq!(o.status.code(), Some(0));
        let out = stdout(&o);
        assert!(out.contains("stabilizer: dim 8"), "{out}");
        assert!(out.contains("dim J^(1) = 7"), "{out}");
    }
    let p = write(&dir, "row1.json", &doc_of(&rep(1, Some(1))));
    assert!(stdout(&run(&["prolong", path(&p)])).contains("dim J^(1) = 0"));
}

#[test]
fn stabilizer_command_reports_killing_signature() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "row1.json", &doc_of(&rep(1, Some(2))));
    let (v, o) = json_report(&["stabilizer", path(&p)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(v["stabilizer"]["dim"], 8);
    assert_eq!(v["stabilizer"]["basis"].as_array().unwrap().len(), 8);
    assert_eq!(v["killing"]["signature"], json!([5, 3, 0]));
    assert!(v.get("prolongation_dim").is_none());
    assert!(v.get("orbit").is_none());
}

#[test]
fn equiv_rejects_rows_six_and_seven() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "row6.json", &doc_of(&rep(6, None)));
    let b = write(&dir, "row7.json", &doc_of(&rep(7, None)));
    let o = run(&["equiv", path(&a), path(&b)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("q_ω signature mismatch"));
    assert!(stdout(&o).contains("equivalent: false"));
}

#[test]
fn equiv_compares_parameters() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", &doc_of(&rep(2, Some(2))));
    let b = write(&dir, "b.json", &doc_of(&rep(2, Some(3))));
    let c = write(&dir, "c.json", &doc_of(&pullback(&conjugator(), &rep(2, Some(2))).unwrap()));
    let o = run(&["equiv", path(&a), path(&b)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("orbit parameter mismatch"));
    let (v, o) = json_report(&["equiv", path(&c), path(&a), "--witness"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(v["equivalent"], true);
    assert!(v["witness"]["residual"].as_f64().unwrap() < 1e-8);
    assert!(v["witness"]["defect"].as_f64().unwrap() < 1e-10);
}

#[test]
fn not_effective_exits_two_with_bot() {
    let dir = TempDir::new().unwrap();
    let doc = json!({"dim": 6, "degree": 3, "scalar": "rational", "terms": [{"idx": [1, 2, 5], "coef": "1"}]});
    let p = write(&dir, "bad.json", &doc);
    for cmd in ["classify", "mae", "witness"] {
        let o = run(&[cmd, path(&p)]);
        assert_eq!(o.status.code(), Some(2), "{cmd}");
        assert!(stderr(&o).contains("bot(w) = (1)*e1"), "{}", stderr(&o));
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn input_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["classify", path(&missing)]).status.code(), Some(1));

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{not json").unwrap();
    assert_eq!(run(&["classify", path(&garbage)]).status.code(), Some(1));

    let bad_docs = [
        json!({"dim": 6, "degree": 3, "scalar": "rational", "terms": [{"idx": [2, 1, 3], "coef": "1"}]}),
        json!({"dim": 6, "degree": 3, "scalar": "rational", "terms": [{"idx": [1, 2], "coef": "1"}]}),
        json!({"dim": 5, "degree": 3, "scalar": "rational", "terms": []}),
        json!({"dim": 6, "degree": 3, "scalar": "rational", "terms": [{"idx": [1, 2, 7], "coef": "1"}]}),
        json!({"dim": 6, "degree": 3, "scalar": "rational", "terms": [{"idx": [1, 2, 3], "coef": "1/0"}]}),
        json!({"dim": 6, "degree": 3, "scalar": "exact", "terms": []}),
        json!({"dim": 6, "degree": 3, "scalar": "rational", "terms": [], "extra": 1}),
    ];
    for (i, doc) in bad_docs.iter().enumerate() {
        let p = write(&dir, &format!("bad{i}.json"), doc);
        let o = run(&["classify", path(&p)]);
        assert_eq!(o.status.code(), Some(1), "doc {i}: {}", stderr(&o));
    }

    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn decimals_only_in_float_mode() {
    let dir = TempDir::new().unwrap();
    let terms = json!([{"idx": [1, 2, 3], "coef": "0.5"}, {"idx": [4, 5, 6], "coef": "1/2"}]);
    let exact = write(&dir, "exact.json", &json!({"dim": 6, "degree": 3, "scalar": "rational", "terms": terms}));
    let o = run(&["classify", path(&exact)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("\"0.5\""), "{}", stderr(&o));

    let float = write(&dir, "float.json", &json!({"dim": 6, "degree": 3, "scalar": "float", "terms": terms}));
    let (v, o) = json_report(&["classify", path(&float)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(v["input"]["scalar"], "float");
    assert_eq!(v["input"]["terms"][0]["coef"], "0.5");
    assert_eq!(v["orbit"]["family"], 1);
    // c e123 + c f123 is family 1 with gamma = c^2.
    let approx = v["orbit"]["parameter"]["approx"].as_f64().unwrap();
    assert!((approx - 0.25).abs() < 1e-12, "{approx}");
}

#[test]
fn echoed_input_round_trips() {
    let dir = TempDir::new().unwrap();
    // Unmerged terms with unreduced fractions.
    let doc = json!({"dim": 6, "degree": 3, "scalar": "rational", "terms": [
        {"idx": [1, 2, 6], "coef": "2/4"},
        {"idx": [1, 3, 5], "coef": "1"},
        {"idx": [1, 2, 6], "coef": "1/2"}
    ]});
    let p = write(&dir, "raw.json", &doc);
    let (v, o) = json_report(&["classify", path(&p)]);
    assert_eq!(o.status.code(), Some(0));
    let echo = &v["input"];
    assert_eq!(echo["terms"], json!([{"idx": [1, 2, 6], "coef": "1"}, {"idx": [1, 3, 5], "coef": "1"}]));
    let p2 = write(&dir, "echo.json", echo);
    let o2 = run(&["classify", path(&p2), "--json"]);
    assert_eq!(o2.stdout, o.stdout);
    // The report itself is valid JSON that reserializes to the same value.
    let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(again, v);
}

#[test]
fn float_echo_round_trips() {
    let dir = TempDir::new().unwrap();
    let doc = json!({"dim": 6, "degree": 3, "scalar": "float", "terms": [
        {"idx": [1, 2, 3], "coef": "0.1"},
        {"idx": [4, 5, 6], "coef": "1e-3"},
        {"idx": [1, 2, 6], "coef": "1/3"},
        {"idx": [3, 4, 5], "coef": "1/3"}
    ]});
    let p = write(&dir, "f.json", &doc);
    let (v, o) = json_report(&["effective", path(&p)]);
    assert_eq!(o.status.code(), Some(0));
    let p2 = write(&dir, "f2.json", &v["input"]);
    let o2 = run(&["effective", path(&p2), "--json"]);
    assert_eq!(o2.stdout, o.stdout);
}

#[test]
fn witness_reports_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let w = pullback(&conjugator(), &rep(1, Some(1))).unwrap();
    let p = write(&dir, "c.json", &doc_of(&w));
    let args = ["classify", path(&p), "--witness", "--seed", "7", "--json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["witness"]["kind"], "numerical");
    assert!(v["witness"]["residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn constructive_witness_is_exact() {
    let dir = TempDir::new().unwrap();
    let w = pullback(&conjugator(), &rep(8, None)).unwrap();
    let p = write(&dir, "row8.json", &doc_of(&w));
    let (v, o) = json_report(&["witness", path(&p)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(v["orbit"]["family"], 8);
    assert_eq!(v["witness"]["kind"], "constructive");
    let rows: Vec<Vec<Q>> = v["witness"]["map"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            r.as_array()
                .unwrap()
                .iter()
                .map(|x| parse_rational(x.as_str().unwrap()).unwrap())
                .collect()
        })
        .collect();
    let f = Mat::from_rows(rows);
    assert!(is_symplectic(&f));
    assert_eq!(pullback(&f, &rep(8, None)).unwrap(), w);
}

#[test]
fn witness_to_target_and_mismatch() {
    let dir = TempDir::new().unwrap();
    let src = write(&dir, "src.json", &doc_of(&pullback(&conjugator(), &rep(4, None)).unwrap()));
    let dst = write(&dir, "dst.json", &doc_of(&rep(4, None)));
    let other = write(&dir, "other.json", &doc_of(&rep(5, None)));
    let (v, o) = json_report(&["witness", path(&src), path(&dst)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(v["witness"]["relation"], "pullback(map, target) = input");
    assert!(v["witness"]["residual"].as_f64().unwrap() < 1e-8);
    let o = run(&["witness", path(&src), path(&other)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("q_ω signature mismatch"));
}

fn jet_doc(jf: &JetForm<Q>) -> Value {
    let mut doc = doc_of(&jf.omega0);
    let mut jet = Vec::new();
    for part in [&jf.omega1, &jf.omega2] {
        for (b, p) in part.terms() {
            for (m, c) in p.terms() {
                jet.push(json!({"idx": b.indices(), "monomial": m, "coef": c.to_string()}));
            }
        }
    }
    doc["jet"] = Value::Array(jet);
    doc
}

#[test]
fn mae_checks_jets() {
    let dir = TempDir::new().unwrap();
    let mono = |e: [u32; 6], c: i64| Poly::monomial(6, e.to_vec(), q(c));
    let h = mono([1, 0, 0, 0, 1, 1], 1).add(&mono([0, 2, 0, 1, 0, 0], -2));
    let k = mono([1, 1, 0, 0, 1, 1], 1).add(&mono([0, 0, 0, 0, 0, 4], 3));
    let jf = jet_from_generators(&rep(2, Some(1)), &h, &k).unwrap();
    let p = write(&dir, "jet.json", &jet_doc(&jf));
    let (v, o) = json_report(&["mae", path(&p)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(v["orbit"]["family"], 2);
    assert_eq!(v["jet"]["sigma1"], h.render(&["q1", "q2", "q3", "q4", "q5", "q6"]));
    assert!(v["jet"]["sigma2"].is_string());
    assert_eq!(v["jet"]["conclusion"], true);

    // A degree-1 term that is not of the form L_{X_h} w0.
    let doc = json!({"dim": 6, "degree": 3, "scalar": "rational",
        "terms": [{"idx": [1, 2, 3], "coef": "1"}, {"idx": [4, 5, 6], "coef": "1"}],
        "jet": [{"idx": [1, 2, 3], "monomial": [1, 0, 0, 0, 0, 0], "coef": "1/2"}]});
    let p = write(&dir, "bad_jet.json", &doc);
    let (v, o) = json_report(&["mae", path(&p)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(v["jet"].get("sigma1").is_none());
    assert_eq!(v["jet"]["conclusion"], false);

    let too_high = json!({"dim": 6, "degree": 3, "scalar": "rational", "terms": [],
        "jet": [{"idx": [1, 2, 3], "monomial": [3, 0, 0, 0, 0, 0], "coef": "1"}]});
    let p = write(&dir, "high.json", &too_high);
    assert_eq!(run(&["mae", path(&p)]).status.code(), Some(1));
}

#[test]
fn effective_command_decomposes() {
    let dir = TempDir::new().unwrap();
    let doc = json!({"dim": 6, "degree": 3, "scalar": "rational", "terms": [{"idx": [1, 2, 5], "coef": "1"}]});
    let p = write(&dir, "e.json", &doc);
    let (v, o) = json_report(&["effective", path(&p)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(v["effective"]["effective"], false);
    assert_eq!(v["effective"]["bot"], "(1)*e1");
    let comps = v["effective"]["components"].as_array().unwrap();
    assert_eq!(comps.len(), 2);
    assert_eq!(comps[1], json!({"degree": 1, "terms": [{"idx": [1], "coef": "1/2"}]}));
}
