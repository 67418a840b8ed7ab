use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use esph::delaunay::TriangulationKind;
use esph::harness::{gen_polytope, TrialConfig};
use esph::pointfile::{format_points, parse_points};
use esph::report::analyze;
use serde_json::Value;

fn esph() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_esph"));
    cmd.env_remove("ESPH_SEED");
    cmd
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(cmd: &mut Command) -> (i32, String, String) {
    let Output {
        status,
        stdout,
        stderr,
    } = cmd.output().unwrap();
    (
        status.code().expect("exit code"),
        String::from_utf8(stdout).unwrap(),
        String::from_utf8(stderr).unwrap(),
    )
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

const QUAD: &str = "2 4\n0 0\n3 0\n3 3\n0 4\n";
const HEXAGON: &str = "# a generic hexagon\n2 6\n0 0\n4 0\n7 3\n5 7\n1 6\n-2 3\n";
const SQUARE: &str = "2 4\n0 0\n1 0\n1 1\n0 1\n";

#[test]
fn analyze_quadrilateral() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "quad.txt", QUAD);
    let (code, out, _) = run(esph().arg("analyze").arg(&f));
    assert_eq!(code, 0);
    let r = json(&out);
    assert_eq!(r["counts"]["d_ears"], 2);
    assert_eq!(r["theorems"]["thm5_pass"], true);
    assert_eq!(r["census2d"]["s_minus"], 2);
    // Top-level keys come out in a fixed order.
    let at = |key: &str| out.find(&format!("\"{key}\":")).unwrap();
    let keys = [
        "dim", "n", "generic", "counts", "census2d", "theorems", "ears", "bm_ears",
    ];
    assert!(keys.windows(2).all(|w| at(w[0]) < at(w[1])));
}

#[test]
fn analyze_output_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "hex.txt", HEXAGON);
    let a = run(esph().arg("analyze").arg(&f));
    let b = run(esph().arg("analyze").arg(&f));
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
}

#[test]
fn census_of_hexagon() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "hex.txt", HEXAGON);
    let (code, out, err) = run(esph().arg("census2d").arg(&f));
    assert_eq!(code, 0, "{err}");
    let r = json(&out);
    assert_eq!(r["identities_pass"], true);
    let n = r["n"].as_u64().unwrap();
    let s = r["s_minus"].as_u64().unwrap();
    let u = r["u_minus"].as_u64().unwrap();
    assert_eq!(2 * s + u, n);
}

#[test]
fn census_needs_a_polygon() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "tet.txt",
        "3 5\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n1 1 1\n",
    );
    assert_eq!(run(esph().arg("census2d").arg(&f)).0, 2);
}

#[test]
fn census_rejects_non_convex_order() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bowtie.txt", "2 4\n0 0\n3 3\n3 0\n0 4\n");
    assert_eq!(run(esph().arg("census2d").arg(&f)).0, 2);
}

#[test]
fn square_is_not_generic() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "square.txt", SQUARE);
    let (code, out, _) = run(esph().arg("check").arg(&f));
    assert_eq!(code, 2);
    let r = json(&out);
    assert_eq!(r["is_generic"], false);
    assert_eq!(r["violations"], serde_json::json!([[0, 1, 2, 3]]));
    assert_eq!(run(esph().arg("analyze").arg(&f)).0, 2);
}

#[test]
fn parse_errors_exit_3_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "short.txt", "2 3\n0 0\n1 0\n");
    let (code, _, err) = run(esph().arg("analyze").arg(&f));
    assert_eq!(code, 3);
    assert!(err.contains("parse error: line 4"), "{err}");
    let f = write(dir.path(), "junk.txt", "2 3\n0 0\n1 zero\n0 1\n");
    let (code, _, err) = run(esph().arg("check").arg(&f));
    assert_eq!(code, 3);
    assert!(err.contains("parse error: line 3"), "{err}");
}

#[test]
fn gen_round_trips_exactly() {
    let (code, out, _) = run(esph().args(["gen", "--dim", "3", "--verts", "7", "--seed", "42"]));
    assert_eq!(code, 0);
    let parsed = parse_points(&out).unwrap();
    let expected = gen_polytope(&TrialConfig::new(3, 7, 42, 1), 0).unwrap();
    assert_eq!(parsed.points, expected);
    assert_eq!(format_points(3, &parsed.points), out);

    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "gen.txt", &out);
    let (code, report, _) = run(esph().arg("analyze").arg(&f));
    assert_eq!(code, 0);
    assert_eq!(json(&report)["n"], 7);
}

#[test]
fn explicit_seed_beats_environment() {
    let args = ["gen", "--dim", "2", "--verts", "6"];
    let with_env = run(esph().args(args).env("ESPH_SEED", "5")).1;
    let with_flag = run(esph().args(args).args(["--seed", "5"])).1;
    assert_eq!(with_env, with_flag);
    let both = run(esph()
        .args(args)
        .args(["--seed", "6"])
        .env("ESPH_SEED", "5"))
    .1;
    assert_eq!(both, run(esph().args(args).args(["--seed", "6"])).1);
    assert_ne!(both, with_env);
}

/// A polytope with a Delaunay ear that is not a BM-ear, and that ear.
fn instance_with_gap() -> (String, Vec<usize>, Vec<usize>) {
    let cfg = TrialConfig::with_range(3, 6, 9, 7, 200);
    for trial in 0..cfg.trials {
        let points = gen_polytope(&cfg, trial).unwrap();
        let a = analyze(&points, 3).unwrap();
        let bm = a.bm_ear_simplices(TriangulationKind::Delaunay);
        let ears = a.d_ears.simplices(&a.lifted.dt);
        if let Some(plain) = ears.iter().find(|e| !bm.contains(e)) {
            return (format_points(3, &points), plain.clone(), bm[0].clone());
        }
    }
    panic!("no instance with a non-BM ear in 200 trials");
}

fn ids(v: &[usize]) -> String {
    v.iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

#[test]
fn shelling_ends_at_bm_ear_and_rejects_others() {
    let (text, plain, bm) = instance_with_gap();
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "poly.txt", &text);

    let (code, out, err) =
        run(esph()
            .arg("shelling")
            .arg(&f)
            .args(["--target", &ids(&bm), "--group", "lower"]));
    assert_eq!(code, 0, "{err}");
    let r = json(&out);
    let order = r["facet_order"].as_array().unwrap();
    assert_eq!(order.last().unwrap(), &serde_json::json!(bm));

    let (code, _, err) =
        run(esph()
            .arg("shelling")
            .arg(&f)
            .args(["--target", &ids(&plain), "--group", "lower"]));
    assert_eq!(code, 5, "{err}");
    assert!(err.contains("not a BM-ear"), "{err}");
}

#[test]
fn shelling_target_must_be_in_group() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "quad.txt", QUAD);
    let (code, out, _) = run(esph().arg("analyze").arg(&f));
    assert_eq!(code, 0);
    let upper = json(&out)["ears"]["ud_ears"][0].clone();
    let target: Vec<usize> = serde_json::from_value(upper).unwrap();
    let (code, _, _) =
        run(esph()
            .arg("shelling")
            .arg(&f)
            .args(["--target", &ids(&target), "--group", "lower"]));
    assert_eq!(code, 2);
    let (code, out, _) =
        run(esph()
            .arg("shelling")
            .arg(&f)
            .args(["--target", &ids(&target), "--group", "upper"]));
    assert_eq!(code, 0);
    assert_eq!(json(&out)["group"], "upper");
}

#[test]
fn svg_has_one_circle_per_extremal_circle() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "hex.txt", HEXAGON);
    let out_path = dir.path().join("hex.svg");
    let (code, _, err) = run(esph().arg("svg").arg(&f).arg("--out").arg(&out_path));
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&out_path).unwrap();
    let doc = roxmltree::Document::parse(&text).expect("well-formed XML");
    let root = doc.root_element();
    assert_eq!(root.tag_name().name(), "svg");
    assert_eq!(root.attribute("viewBox"), Some("0 0 800 800"));

    let report = json(&run(esph().arg("analyze").arg(&f)).1);
    let extremal = report["counts"]["empty_neighboring_spheres"]
        .as_u64()
        .unwrap()
        + report["counts"]["full_neighboring_spheres"]
            .as_u64()
            .unwrap();
    let circles: Vec<_> = doc
        .descendants()
        .filter(|n| n.has_tag_name("circle"))
        .collect();
    assert_eq!(circles.len() as u64, extremal);
    for c in &circles {
        let class = c.attribute("class").unwrap();
        assert!(
            class.starts_with("empty") || class.starts_with("full"),
            "{class}"
        );
    }
    let polygons = doc
        .descendants()
        .filter(|n| n.has_tag_name("polygon"))
        .count();
    assert_eq!(polygons, 1);
    assert!(doc.descendants().any(|n| n.has_tag_name("line")));
}

#[test]
fn svg_needs_a_polygon() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "tet.txt",
        "3 5\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n1 1 1\n",
    );
    assert_eq!(run(esph().arg("svg").arg(&f)).0, 2);
}

#[test]
fn small_search_reports_best_instance() {
    let (code, out, err) =
        run(esph().args(["search", "--dim", "3", "--trials", "6", "--seed", "3"]));
    assert_eq!(code, 0, "{err}");
    let r = json(&out);
    assert_eq!(r["trials_run"], 6);
    assert!(r["best"]["record"]["bmd_ears"].as_u64().unwrap() >= 2);
    assert_eq!(r["defect_trials"], serde_json::json!([]));
}

#[test]
fn search_needs_three_dimensions() {
    assert_eq!(
        run(esph().args(["search", "--dim", "2", "--trials", "3"])).0,
        2
    );
}
