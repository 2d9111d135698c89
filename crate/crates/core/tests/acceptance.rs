//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use collar_index::degree::{pl_degree, winding_degree, GriddedRegion, PlBudget, WindingBudget};
use collar_index::homology::{lefschetz_hopf, SimplicialComplex, SimplicialSelfMap};
use collar_index::MapExpr;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

/// Wall-time limit for the whole bundled catalog.
const CATALOG_TIME_LIMIT: Duration = Duration::from_secs(60);
const MIN_THEOREM_SCENARIOS: usize = 12;
const MIN_NEIGHBOURHOOD_SCENARIOS: usize = 4;
const RANDOM_DEGREE_MAPS: usize = 100;
const RANDOM_DEGREE_ATTEMPTS: usize = 400;
const DEGREE_SEED: u64 = 2024;

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_collar-index")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios/fixtures")
        .join(format!("{name}.json"))
}

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(binary())
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
    )
}

struct Catalog {
    raw: String,
    report: Value,
    elapsed: Duration,
}

impl Catalog {
    fn load() -> Catalog {
        let start = Instant::now();
        let (code, raw) = run(&["--report", "structured"]);
        let elapsed = start.elapsed();
        assert!(
            code == 0 || code == 1 || code == 2,
            "catalog run exited with {code}"
        );
        let report = serde_json::from_str(&raw).expect("structured report parses");
        Catalog {
            raw,
            report,
            elapsed,
        }
    }

    fn of_kind(&self, kind: &str) -> Vec<&Value> {
        self.report["scenarios"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|s| s["kind"] == kind)
            .collect()
    }
}

fn passed(s: &Value) -> bool {
    s["outcome"] == "PASS"
}

fn int(v: &Value) -> i64 {
    v.as_i64().unwrap_or(i64::MIN)
}

fn name(s: &Value) -> &str {
    s["name"].as_str().unwrap_or("?")
}

type Check = Result<String, String>;

fn all_pass(items: &[&Value]) -> Result<(), String> {
    match items.iter().find(|s| !passed(s)) {
        Some(s) => Err(format!("{} is {}: {}", name(s), s["outcome"], s["summary"])),
        None => Ok(()),
    }
}

fn theorem_suite(c: &Catalog) -> Check {
    let t = c.of_kind("theorem");
    if t.len() < MIN_THEOREM_SCENARIOS {
        return Err(format!("only {} theorem scenarios", t.len()));
    }
    all_pass(&t)?;
    if let Some(s) = t.iter().find(|s| int(&s["details"]["residual"]) != 0) {
        return Err(format!(
            "{} has residual {}",
            name(s),
            s["details"]["residual"]
        ));
    }
    if c.elapsed >= CATALOG_TIME_LIMIT {
        return Err(format!("catalog took {:.1}s", c.elapsed.as_secs_f64()));
    }
    Ok(format!(
        "{} scenarios, all residuals 0, catalog in {:.1}s",
        t.len(),
        c.elapsed.as_secs_f64()
    ))
}

fn ball_boundary_degree(c: &Catalog) -> Check {
    let b = c.of_kind("ball_boundary_degree");
    all_pass(&b)?;
    let outside: Vec<_> = b
        .iter()
        .filter(|s| s["details"]["case"] == "image_outside")
        .collect();
    let inside: Vec<_> = b
        .iter()
        .filter(|s| s["details"]["case"] == "image_inside")
        .collect();
    for s in &outside {
        let d = &s["details"];
        if int(&d["i_f"]) != int(&d["predicted"]) {
            return Err(format!(
                "{}: I(f) {} vs {}",
                name(s),
                d["i_f"],
                d["predicted"]
            ));
        }
    }
    let degrees: Vec<i64> = outside
        .iter()
        .map(|s| int(&s["details"]["sphere_degree"]))
        .collect();
    for d in 1..=5 {
        if !degrees.contains(&d) {
            return Err(format!("no planar case of degree {d}"));
        }
    }
    if !outside.iter().any(|s| name(s).contains("ball3")) {
        return Err("no three-dimensional case".into());
    }
    if inside.is_empty()
        || inside
            .iter()
            .any(|s| int(&s["details"]["fixed_points_found"]) < 1)
    {
        return Err("a contraction located no fixed point".into());
    }
    Ok(format!(
        "{} degree cases, {} contractions",
        outside.len(),
        inside.len()
    ))
}

fn exit_everywhere(c: &Catalog) -> Check {
    let e = c.of_kind("exit_everywhere");
    all_pass(&e)?;
    for s in &e {
        let d = &s["details"];
        if int(&d["i_f"]) != int(&d["l_rf"]) - int(&d["l_boundary"]["value"]) {
            return Err(format!("{}: sides differ", name(s)));
        }
    }
    let dims = ["interval", "disk", "ball3"];
    if let Some(missing) = dims
        .iter()
        .find(|k| !e.iter().any(|s| name(s).contains(*k)))
    {
        return Err(format!("no {missing} case"));
    }
    Ok(format!("{} scenarios in dimensions 1, 2, 3", e.len()))
}

fn contractions_and_homotopies(c: &Catalog) -> Check {
    let n = c.of_kind("no_exit");
    all_pass(&n)?;
    let contractible: Vec<_> = n.iter().filter(|s| !name(s).contains("annulus")).collect();
    if contractible.is_empty() {
        return Err("no contraction on a contractible domain".into());
    }
    for s in &contractible {
        let d = &s["details"];
        if (int(&d["i_f"]), int(&d["l_rf"])) != (1, 1) {
            return Err(format!(
                "{}: I(f) {} L(rf) {}",
                name(s),
                d["i_f"],
                d["l_rf"]
            ));
        }
    }
    let h = c.of_kind("homotopic_to_inclusion");
    all_pass(&h)?;
    let mut chis = Vec::new();
    for s in &h {
        let d = &s["details"];
        let chi = int(&d["euler_characteristic"]);
        if int(&d["i_f"]) + int(&d["i_boundary"]) != chi {
            return Err(format!("{}: I_f + I_boundary != chi", name(s)));
        }
        chis.push(chi);
    }
    if !(chis.contains(&1) && chis.contains(&0)) {
        return Err(format!("euler characteristics seen: {chis:?}"));
    }
    Ok(format!(
        "{} contractions, chi {:?}",
        contractible.len(),
        chis
    ))
}

fn morse(c: &Catalog) -> Check {
    let m = c.of_kind("morse");
    if m.len() < 2 {
        return Err("fewer than two field scenarios".into());
    }
    all_pass(&m)?;
    for s in &m {
        let d = &s["details"];
        if int(&d["ind_v"]) + int(&d["ind_boundary"]) != 1 || int(&d["euler_characteristic"]) != 1 {
            return Err(format!("{}: {}", name(s), s["summary"]));
        }
    }
    let path = fixture("degenerate_morse");
    let (code, text) = run(&["--file", path.to_str().unwrap()]);
    if code != 2 || !text.starts_with("INCONCLUSIVE") {
        return Err(format!("degenerate annulus field gave exit {code}: {text}"));
    }
    Ok("radial and constant fields sum to 1, degenerate field INCONCLUSIVE".into())
}

fn axioms(c: &Catalog) -> Check {
    let a = c.of_kind("axiom_suite");
    all_pass(&a)?;
    let s = a.first().ok_or("no axiom suite")?;
    let tally = |axiom: &str| -> Result<&Value, String> {
        s["details"]["tallies"]
            .as_array()
            .unwrap()
            .iter()
            .find(|t| t["axiom"] == axiom)
            .ok_or(format!("no {axiom} tally"))
    };
    let mut total = 0;
    for axiom in [
        "units",
        "multiplicativity",
        "localization",
        "additivity",
        "homotopy",
        "commutativity",
    ] {
        let t = tally(axiom)?;
        if int(&t["violations"]) != 0 {
            return Err(format!("{axiom}: {}", t["notes"]));
        }
        total += int(&t["certified"]);
    }
    let certified = |axiom: &str| tally(axiom).map(|t| int(&t["certified"]));
    let cases = |axiom: &str| {
        tally(axiom).map(|t| int(&t["certified"]) + int(&t["violations"]) + int(&t["inconclusive"]))
    };
    if cases("multiplicativity")? != 20
        || certified("homotopy")? != 20
        || cases("commutativity")? != 5
    {
        return Err("wrong number of multiplicativity, homotopy or commutativity cases".into());
    }
    Ok(format!("{total} certified cases, 0 violations"))
}

fn random_polynomial(rng: &mut ChaCha8Rng) -> MapExpr {
    let monomials = [
        "1", "x1", "x2", "x1^2", "x1*x2", "x2^2", "x1^3", "x1^2*x2", "x1*x2^2", "x2^3",
    ];
    let component = |rng: &mut ChaCha8Rng| {
        monomials
            .iter()
            .map(|m| format!("{:.3}*{m}", rng.gen_range(-1.0..1.0)))
            .collect::<Vec<_>>()
            .join(" + ")
    };
    let (a, b) = (component(rng), component(rng));
    MapExpr::parse_for_dim(&format!("{a}; {b}"), 2).unwrap()
}

fn engines_agree() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(DEGREE_SEED);
    let disk = GriddedRegion::ball(vec![0.0, 0.0], 1.0).unwrap();
    let circle = |t: f64| {
        let a = std::f64::consts::TAU * t;
        vec![a.cos(), a.sin()]
    };
    let mut agreed = 0;
    let mut nonzero = 0;
    for _ in 0..RANDOM_DEGREE_ATTEMPTS {
        if agreed == RANDOM_DEGREE_MAPS {
            break;
        }
        let g = random_polynomial(&mut rng);
        let w = winding_degree(&g, &circle, [0.0, 0.0], &WindingBudget::default());
        let p = pl_degree(&g, &disk, &[0.0, 0.0], &PlBudget::default());
        let (Ok(w), Ok(p)) = (w, p) else { continue };
        if w.degree != p.degree {
            return Err(format!("winding {} vs PL {} for {g:?}", w.degree, p.degree));
        }
        agreed += 1;
        nonzero += usize::from(w.degree != 0);
    }
    if agreed < RANDOM_DEGREE_MAPS {
        return Err(format!("only {agreed} maps certified by both engines"));
    }

    let hexagon = SimplicialComplex::hexagon();
    let disk = SimplicialComplex::hexagon_disk();
    let annulus = SimplicialComplex::hexagon_annulus();
    let sphere = SimplicialComplex::tetrahedron_boundary();
    let shell = sphere.prism();
    let mut maps: Vec<(&SimplicialComplex, Vec<usize>)> = Vec::new();
    for k in 0..6 {
        maps.push((&hexagon, (0..6).map(|i| (i + k) % 6).collect()));
        maps.push((&hexagon, (0..6).map(|i| (k + 6 - i) % 6).collect()));
        let mut v: Vec<usize> = (0..6).map(|i| (i + k) % 6).collect();
        v.push(6);
        maps.push((&disk, v));
        maps.push((&disk, vec![6; 7]));
        maps.push((&annulus, (0..12).map(|i| (i % 6 + k) % 6).collect()));
        maps.push((
            &annulus,
            (0..12).map(|i| (i / 6) * 6 + (i % 6 + k) % 6).collect(),
        ));
    }
    for p in permutations(4) {
        maps.push((&sphere, p.clone()));
        maps.push((
            &shell,
            p.iter()
                .chain(p.iter())
                .enumerate()
                .map(|(i, v)| v + 4 * (i / 4))
                .collect(),
        ));
    }
    let mut checked = 0;
    for (c, v) in &maps {
        let Ok(m) = SimplicialSelfMap::new(c, v.clone()) else {
            continue;
        };
        lefschetz_hopf(c, &m).map_err(|e| format!("{v:?}: {e}"))?;
        checked += 1;
    }
    for c in [
        &hexagon,
        &disk,
        &annulus,
        &sphere,
        &shell,
        &SimplicialComplex::simplex(3),
    ] {
        let l = lefschetz_hopf(c, &SimplicialSelfMap::identity(c)).map_err(|e| e.to_string())?;
        if l.value != c.euler_characteristic() {
            return Err(format!(
                "identity has L = {}, chi = {}",
                l.value,
                c.euler_characteristic()
            ));
        }
    }
    Ok(format!(
        "{agreed} random maps agree ({nonzero} of nonzero degree), {checked} simplicial maps trace-consistent"
    ))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn retraction_independence(c: &Catalog) -> Check {
    let mut compared = 0;
    for s in c.of_kind("theorem") {
        let d = &s["details"];
        for a in d["alternates"].as_array().into_iter().flatten() {
            if a["i_boundary"] != d["i_boundary"] || a["l_rf"] != d["l_rf"] {
                return Err(format!(
                    "{}: {} changes the result",
                    name(s),
                    a["retraction"]
                ));
            }
            compared += 1;
        }
    }
    if compared == 0 {
        return Err("no alternate retractions were run".into());
    }
    Ok(format!("{compared} alternate retractions agree"))
}

fn thin_neighbourhood(c: &Catalog) -> Check {
    let b = c.of_kind("boundary_neighborhood");
    if b.len() < MIN_NEIGHBOURHOOD_SCENARIOS {
        return Err(format!("only {} scenarios", b.len()));
    }
    all_pass(&b)?;
    for s in &b {
        let d = &s["details"];
        if d["thin_index"] != d["boundary_index"] {
            return Err(format!("{}: {}", name(s), s["summary"]));
        }
    }
    Ok(format!("{} scenarios agree", b.len()))
}

fn determinism_and_exit_codes(c: &Catalog) -> Check {
    let (_, again) = run(&["--report", "structured"]);
    if again != c.raw {
        return Err("structured reports differ between runs".into());
    }
    for (name, want) in [
        ("pass", 0),
        ("broken_identity", 1),
        ("degenerate_morse", 2),
        ("malformed", 3),
    ] {
        let path = fixture(name);
        let (code, _) = run(&["--file", path.to_str().unwrap()]);
        if code != want {
            return Err(format!("{name}: exit {code}, expected {want}"));
        }
    }
    Ok("identical reports, fixture exits 0/1/2/3".into())
}

#[test]
fn acceptance() {
    let catalog = Catalog::load();
    let criteria: Vec<(&str, Check)> = vec![
        ("identity on the bundled catalog", theorem_suite(&catalog)),
        ("ball boundary degree", ball_boundary_degree(&catalog)),
        ("exit everywhere", exit_everywhere(&catalog)),
        (
            "contractions and homotopies",
            contractions_and_homotopies(&catalog),
        ),
        ("planar vector fields", morse(&catalog)),
        ("index axioms", axioms(&catalog)),
        ("engine cross-validation", engines_agree()),
        ("retraction independence", retraction_independence(&catalog)),
        ("thin neighbourhood", thin_neighbourhood(&catalog)),
        (
            "determinism and exit codes",
            determinism_and_exit_codes(&catalog),
        ),
    ];
    let mut failed = 0;
    for (i, (label, result)) in criteria.iter().enumerate() {
        match result {
            Ok(note) => println!("criterion {:2} PASS {label}: {note}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:2} FAIL {label}: {why}", i + 1);
            }
        }
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
