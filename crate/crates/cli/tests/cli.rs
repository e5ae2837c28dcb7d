use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use orbitred_cli::problem::{parse_problem, ProblemFile};
use orbitred_cli::ReportDoc;

fn problem(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("problems")
        .join(format!("{name}.toml"))
}

fn text(name: &str) -> String {
    std::fs::read_to_string(problem(name)).unwrap()
}

fn orbitred(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_orbitred"));
    cmd.args(args).env_remove("ORBITRED_SEED");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Asserts the exit status and a single-line diagnostic starting with `section:`.
fn assert_failure(o: &Output, code: i32, section: &str) -> String {
    let err = stderr(o);
    assert_eq!(o.status.code(), Some(code), "{err}");
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with(&format!("{section}: ")), "{err}");
    err
}

fn write_temp(dir: &tempfile::TempDir, name: &str, contents: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_str().unwrap().to_string()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn problem_files_round_trip() {
    for name in ["minimal", "plane_reflections", "plane_inversion", "cubic"] {
        let parsed = ProblemFile::from_toml(&text(name)).unwrap();
        let printed = parsed.to_toml();
        assert_eq!(ProblemFile::from_toml(&printed).unwrap(), parsed, "{name}");
        assert_eq!(
            ProblemFile::from_toml(&printed).unwrap().to_toml(),
            printed,
            "{name}"
        );
        parse_problem(&printed).unwrap();
    }
}

#[test]
fn minimal_problem() {
    let p = parse_problem(&text("minimal")).unwrap();
    assert_eq!(p.basis.stability_order(), 4);
    assert_eq!(p.potential.to_string(), "b*J1^2 + a*J1");
    assert!(p.digest.starts_with("sha256:") && p.digest.len() == 7 + 64);
}

#[test]
fn cubic_problem() {
    let p = parse_problem(&text("cubic")).unwrap();
    assert_eq!(p.basis.dim(), 3);
    assert_eq!(p.basis.degrees(), &[2, 4, 6]);
    assert_eq!(p.params.critical_names(), ["a"]);
    assert_eq!(p.potential.ctx().len(), 22);
    assert_eq!(
        p.potential,
        orbitred::catalog::cubic_model()
            .potential
            .with_vars(p.basis.j_vars().clone())
            .unwrap()
    );
    assert!(p.basis.check_invariance().unwrap().ok);
}

#[test]
fn unsound_syzygy_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let corrupted = text("plane_inversion").replace("J1*J2 -> J3^2", "J3^2 -> J1*J1");
    assert!(matches!(
        parse_problem(&corrupted),
        Err(orbitred_cli::CliError::Input { .. })
    ));
    let path = write_temp(&dir, "bad.toml", &corrupted);
    let err = assert_failure(&orbitred(&["pmatrix", &path], &[]), 2, "invariants");
    assert!(err.contains("does not vanish"), "{err}");
    assert!(err.contains("line 16, column 14"), "{err}");
}

#[test]
fn non_invariant_expression_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(
        &dir,
        "bad.toml",
        &text("plane_inversion").replace("J3 = \"x*y\"", "J3 = \"x*y + x\""),
    );
    assert_failure(&orbitred(&["pmatrix", &path], &[]), 2, "invariants");
    let path = write_temp(
        &dir,
        "moved.toml",
        &text("plane_reflections")
            .replace("J1 = \"x^2\"", "J1 = \"x^2 + y^2\"")
            .replace("J2 = \"y^2\"", "J2 = \"x*y^3 + y^4\""),
    );
    let err = assert_failure(&orbitred(&["pmatrix", &path], &[]), 2, "group");
    assert!(err.contains("J2"), "{err}");
}

#[test]
fn located_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let syntax = text("minimal").replace("\"x^2\"", "\"x^^2\"");
    let err = assert_failure(
        &orbitred(&["pmatrix", &write_temp(&dir, "a.toml", &syntax)], &[]),
        2,
        "invariants",
    );
    assert!(err.contains("line 7, column 9"), "{err}");

    let unknown = text("minimal").replace("a*J1 + b*J1^2", "a*J1 + q*J1^2");
    let err = assert_failure(
        &orbitred(&["reduce", &write_temp(&dir, "b.toml", &unknown)], &[]),
        2,
        "potential",
    );
    assert!(
        err.contains("line 13, column 22") && err.contains("unknown name `q`"),
        "{err}"
    );

    let implicit = text("minimal").replace("a*J1", "a J1");
    assert_failure(
        &orbitred(&["reduce", &write_temp(&dir, "c.toml", &implicit)], &[]),
        2,
        "potential",
    );

    let toml = text("minimal").replace("[space]", "[space]\nextra = 1");
    let err = assert_failure(
        &orbitred(&["reduce", &write_temp(&dir, "d.toml", &toml)], &[]),
        2,
        "space",
    );
    assert!(err.contains("line 4"), "{err}");

    let clash = text("minimal").replace("generic = [\"a\", \"b\"]", "generic = [\"a\", \"J1\"]");
    let err = assert_failure(
        &orbitred(&["reduce", &write_temp(&dir, "e.toml", &clash)], &[]),
        2,
        "parameters",
    );
    assert!(err.contains("already used"), "{err}");

    let version = text("minimal").replace("format_version = 1", "format_version = 9");
    assert_failure(
        &orbitred(&["reduce", &write_temp(&dir, "f.toml", &version)], &[]),
        2,
        "format_version",
    );
}

#[test]
fn usage_errors() {
    assert_failure(&orbitred(&["reduce"], &[]), 2, "usage");
    assert_failure(&orbitred(&["frobnicate"], &[]), 2, "usage");
    assert_failure(
        &orbitred(&["reduce", "/nonexistent/problem.toml"], &[]),
        2,
        "input",
    );
    let p = problem("plane_inversion");
    assert_failure(
        &orbitred(&["reduce", path_str(&p), "--mode", "sideways"], &[]),
        2,
        "flags",
    );
    assert_failure(
        &orbitred(&["reduce", path_str(&p), "--order", "4"], &[]),
        2,
        "flags",
    );
    assert_failure(
        &orbitred(&["reduce", path_str(&p), "--keep", "J1*J2"], &[]),
        2,
        "options",
    );
    assert_failure(
        &orbitred(
            &["check-term", path_str(&p), "--term", "b1*J1^2 + b2*J2^2"],
            &[],
        ),
        2,
        "flags",
    );
}

#[test]
fn pmatrix_of_the_plane_inversion() {
    let o = orbitred(&["pmatrix", path_str(&problem("plane_inversion"))], &[]);
    assert!(o.status.success());
    let want = "[    4*J1        0     2*J3 ]\n[       0     4*J2     2*J3 ]\n[    2*J3     2*J3  J1 + J2 ]\n";
    assert_eq!(stdout(&o), want);
}

#[test]
fn simple_queries() {
    let cubic = problem("cubic");
    let o = orbitred(&["stability-order", path_str(&cubic)], &[]);
    assert_eq!(stdout(&o), "12\n");
    let o = orbitred(&["general-potential", path_str(&cubic)], &[]);
    assert!(stdout(&o).starts_with("coefficients: 22\n"));
    let o = orbitred(
        &[
            "general-potential",
            path_str(&problem("plane_inversion")),
            "--degree",
            "4",
        ],
        &[],
    );
    assert!(stdout(&o).starts_with("coefficients: 8\n"));

    let o = orbitred(&["check-term", path_str(&cubic), "--term", "c2*J1^3"], &[]);
    let out = stdout(&o);
    assert!(o.status.success());
    assert!(
        out.contains("eliminable: yes") && out.contains("requires: b2 != 0"),
        "{out}"
    );
    let o = orbitred(
        &[
            "check-term",
            path_str(&problem("plane_reflections")),
            "--term",
            "b2*J2^2",
            "--mode",
            "varying",
        ],
        &[],
    );
    assert!(stdout(&o).contains("eliminable: yes"));
}

fn reduce_json(name: &str, extra: &[&str], envs: &[(&str, &str)]) -> ReportDoc {
    let p = problem(name);
    let mut args = vec!["reduce", path_str(&p), "--json"];
    args.extend_from_slice(extra);
    let o = orbitred(&args, envs);
    assert!(o.status.success(), "{}", stderr(&o));
    ReportDoc::from_json(&stdout(&o)).unwrap()
}

#[test]
fn cubic_census_in_varying_mode() {
    let doc = reduce_json("cubic", &["--mode", "varying"], &[]);
    assert_eq!(doc.mode, "varying");
    assert_eq!(doc.critical, ["a"]);
    assert_eq!(doc.truncation, 12);
    assert_eq!(
        doc.surviving,
        ["J1", "J2", "J1^2", "J3", "J2^2", "J2*J3", "J3^2", "J2^3"]
    );
    assert!(doc.conditions.iter().all(|c| !c.contains('a')));
    assert!(doc.conditions.iter().any(|c| c == "b2"));
    assert!(doc.conditions.iter().any(|c| c == "b1 + 4*b2"));
    let stages: Vec<(u32, &str)> = doc
        .stages
        .iter()
        .map(|s| (s.target_degree, s.status.as_str()))
        .collect();
    assert_eq!(
        stages,
        [
            (6, "applied"),
            (8, "applied"),
            (10, "applied"),
            (12, "applied")
        ]
    );
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let p = problem("plane_inversion");
    let mut reports = Vec::new();
    for name in ["one.json", "two.json"] {
        let out = dir.path().join(name);
        let o = orbitred(
            &[
                "reduce",
                path_str(&p),
                "--mode",
                "varying",
                "--report",
                path_str(&out),
            ],
            &[],
        );
        assert!(o.status.success(), "{}", stderr(&o));
        reports.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    let doc = ReportDoc::from_json(std::str::from_utf8(&reports[0]).unwrap()).unwrap();
    assert_eq!(doc.to_json().as_bytes(), &reports[0][..]);
}

#[test]
fn report_strings_rebuild_the_report() {
    let p = parse_problem(&text("cubic")).unwrap();
    let settings = p.settings.clone();
    let (report, doc) = orbitred_cli::commands::run_reduction(&p, &settings).unwrap();
    assert_eq!(doc.to_report(&p.basis).unwrap(), report);
    let reread = ReportDoc::from_json(&doc.to_json()).unwrap();
    assert_eq!(reread, doc);
}

#[test]
fn seed_precedence() {
    assert_eq!(reduce_json("minimal", &[], &[]).seed, 42);
    assert_eq!(
        reduce_json("minimal", &[], &[("ORBITRED_SEED", "7")]).seed,
        7
    );
    assert_eq!(
        reduce_json("minimal", &["--seed", "9"], &[("ORBITRED_SEED", "7")]).seed,
        9
    );
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(
        &dir,
        "s.toml",
        &format!("{}\n[options]\nseed = 5\n", text("minimal")),
    );
    let o = orbitred(&["reduce", &path, "--json"], &[("ORBITRED_SEED", "7")]);
    assert_eq!(ReportDoc::from_json(&stdout(&o)).unwrap().seed, 5);
    let o = orbitred(
        &["reduce", path_str(&problem("minimal"))],
        &[("ORBITRED_SEED", "seven")],
    );
    assert_failure(&o, 2, "options");
}

#[test]
fn explicit_orders() {
    let order = "4:J3^2,J2^2,J1^2,J2*J3,J1*J3";
    let doc = reduce_json("plane_inversion", &["--order", order], &[]);
    assert_eq!(
        doc.stages[0].targets,
        ["J3^2", "J2^2", "J1^2", "J2*J3", "J1*J3"]
    );
    assert_eq!(doc.orders.len(), 1);
    let plain = reduce_json("plane_inversion", &[], &[]);
    assert_ne!(plain.stages[0].targets, doc.stages[0].targets);
    assert_eq!(plain.reduced_potential, doc.reduced_potential);

    let with_columns = reduce_json(
        "plane_inversion",
        &[
            "--order",
            "4:J1^2,J2^2,J3^2,J1*J3,J2*J3;J2^2,J1^2,J3^2,J1*J3,J2*J3",
        ],
        &[],
    );
    let cols: Vec<&str> = with_columns.stages[0]
        .solution
        .iter()
        .map(|[m, _]| m.as_str())
        .collect();
    assert_eq!(cols, ["J2^2", "J1^2", "J3^2", "J1*J3", "J2*J3"]);

    let p = problem("plane_inversion");
    let o = orbitred(&["reduce", path_str(&p), "--order", "4:J1^3"], &[]);
    assert_failure(&o, 2, "reduce");
}

#[test]
fn keep_set_from_flags() {
    let doc = reduce_json("plane_reflections", &["--keep", "J1*J2"], &[]);
    assert_eq!(doc.strategy.kind, "keep_set");
    assert!(doc.surviving.contains(&"J1*J2".to_string()));
    assert!(doc.stages[0].zeroed.iter().all(|z| z != "J1*J2"));
}

fn verify_args<'a>(name: &'a Path, report: &'a Path, extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec!["verify", path_str(name), "--report", path_str(report)];
    v.extend_from_slice(extra);
    v
}

#[test]
fn verify_the_cubic_reduction() {
    let dir = tempfile::tempdir().unwrap();
    let p = problem("cubic");
    let report = dir.path().join("cubic.json");
    let o = orbitred(
        &[
            "reduce",
            path_str(&p),
            "--mode",
            "varying",
            "--report",
            path_str(&report),
        ],
        &[],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let args = verify_args(
        &p,
        &report,
        &[
            "--set",
            "a=0",
            "--set",
            "b1=1",
            "--set",
            "b2=2",
            "--default-value",
            "1",
        ],
    );
    let o = orbitred(&args, &[]);
    let out = stdout(&o);
    assert!(o.status.success(), "{out}{}", stderr(&o));
    assert!(
        out.contains("seed: 42") && out.ends_with("result: pass\n"),
        "{out}"
    );
}

#[test]
fn verify_failures() {
    let dir = tempfile::tempdir().unwrap();
    let p = problem("plane_reflections");
    let report = dir.path().join("r.json");
    assert!(orbitred(
        &["reduce", path_str(&p), "--report", path_str(&report)],
        &[]
    )
    .status
    .success());

    let ok = orbitred(
        &verify_args(&p, &report, &["--default-value", "1", "--samples", "6"]),
        &[],
    );
    assert!(ok.status.success(), "{}", stderr(&ok));

    let resonant = orbitred(
        &verify_args(&p, &report, &["--set", "a2=-1", "--default-value", "1"]),
        &[],
    );
    assert_failure(&resonant, 1, "verify");

    let missing = orbitred(&verify_args(&p, &report, &["--set", "a1=1"]), &[]);
    assert_failure(&missing, 2, "verify");

    let other = problem("plane_inversion");
    let mismatch = orbitred(
        &verify_args(&other, &report, &["--default-value", "1"]),
        &[],
    );
    let err = assert_failure(&mismatch, 2, "report");
    assert!(err.contains("digest"), "{err}");

    let doc = std::fs::read_to_string(&report).unwrap();
    let tampered = dir.path().join("t.json");
    std::fs::write(&tampered, doc.replacen("\"a1*J1", "\"2*a1*J1", 1)).unwrap();
    let o = orbitred(&verify_args(&p, &tampered, &["--default-value", "1"]), &[]);
    assert_failure(&o, 1, "report");

    std::fs::write(&tampered, "{ not json").unwrap();
    let o = orbitred(&verify_args(&p, &tampered, &["--default-value", "1"]), &[]);
    assert_failure(&o, 2, "report");
}
