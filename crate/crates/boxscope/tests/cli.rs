use std::path::Path;
use std::process::{Command, Output};

fn boxscope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boxscope"))
        .args(args)
        .env_remove("BOXSCOPE_CACHE")
        .output()
        .expect("spawn boxscope")
}

fn with_cache(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boxscope"))
        .args(args)
        .env("BOXSCOPE_CACHE", cache)
        .output()
        .expect("spawn boxscope")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn worked_example_lines() {
    assert_eq!(stdout(&boxscope(&["order", "2", "5"])), "ord_2(5) = 4, mu = 3\n");
    assert_eq!(
        stdout(&boxscope(&["quotient", "2", "5"])),
        "G_2/G_2(5) = Z/5 ⋊_2 Z/4, |G| = 20\n"
    );
    let d = boxscope(&["diameter", "2", "5"]);
    assert!(d.status.success());
    assert!(stdout(&d).starts_with("diameter = 3, |G| = 20, bounds [1.33, 43.0"));
}

#[test]
fn geometric_scan_ratio_is_two_thirds() {
    let o = boxscope(&["--csv", "scan", "2", "geometric", "--alpha", "1/2", "--kmax", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "k,N,ord,group_size,ratio_order,diameter,ratio_diam,alpha_hat"
    );
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].starts_with("1,3,2,6,0.666666666667"));
    assert!(rows[3].starts_with("4,81,54,4374,0.666666666667"));
}

#[test]
fn usage_and_domain_errors_exit_2() {
    assert_eq!(boxscope(&["order", "2", "4"]).status.code(), Some(2));
    assert_eq!(boxscope(&["order", "2", "x"]).status.code(), Some(2));
    assert_eq!(
        boxscope(&["scan", "2", "geometric", "--alpha", "1.5", "--kmax", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(boxscope(&["oddorder", "-2", "1", "2"]).status.code(), Some(2));
    let o = boxscope(&["quotient", "1", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: "));
}

#[test]
fn resource_caps_exit_3() {
    let o = boxscope(&["--max-vertices", "100", "diameter", "2", "1001"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("--max-vertices"));
    assert_eq!(
        boxscope(&["--max-vertices", "10", "export-dot", "2", "5"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        boxscope(&["oddorder", "2", "1", "2", "--count", "50", "--kmax", "9"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn json_is_deterministic_apart_from_timing() {
    let run = || {
        let o = boxscope(&["--json", "--jobs", "3", "sweep", "3", "--n-max", "40"]);
        assert!(o.status.success());
        stdout(&o)
            .lines()
            .map(|l| {
                let mut v: serde_json::Value = serde_json::from_str(l).unwrap();
                v.as_object_mut().unwrap().remove("wall_time_ms");
                v
            })
            .collect::<Vec<_>>()
    };
    let first = run();
    assert_eq!(first.len(), 27);
    assert_eq!(first, run());
    let serial = boxscope(&["--json", "--jobs", "1", "order", "2", "5"]);
    assert_eq!(
        stdout(&serial),
        "{\"m\":2,\"N\":5,\"ord\":4,\"order_factors\":\"2^2\",\"mu\":3,\"mu_mod_N\":3}\n"
    );
}

#[test]
fn cache_replays_and_tolerates_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("nested/cache.jsonl");
    let first = with_cache(&cache, &["--csv", "sweep", "2", "--n-max", "25"]);
    assert!(first.status.success(), "{}", stderr(&first));
    assert!(stderr(&first).contains("0 of 13 moduli served from cache"));
    let lines = std::fs::read_to_string(&cache).unwrap();
    assert_eq!(lines.lines().count(), 13);

    let mut text = lines.clone();
    text.push_str("{not json\n");
    std::fs::write(&cache, text).unwrap();
    let second = with_cache(&cache, &["--csv", "sweep", "2", "--n-max", "25"]);
    assert!(second.status.success());
    assert!(stderr(&second).contains("skipped 1 corrupt line"));
    assert!(stderr(&second).contains("13 of 13 moduli served from cache"));
    let strip = |s: &str| -> Vec<String> {
        s.lines()
            .map(|l| {
                l.split(',')
                    .enumerate()
                    .filter(|(i, _)| *i != 5)
                    .map(|(_, c)| c)
                    .collect()
            })
            .collect()
    };
    assert_eq!(strip(&stdout(&first)), strip(&stdout(&second)));

    let d = with_cache(&cache, &["diameter", "2", "25"]);
    assert!(stdout(&d).starts_with("diameter = "));
    assert!(stderr(&d).contains("from cache"));
}

#[test]
fn csv_uses_lf_line_endings() {
    let o = boxscope(&["--csv", "density", "natural", "1 mod 4", "--x", "100"]);
    let text = stdout(&o);
    assert!(!text.contains('\r'));
    assert_eq!(text, "set,x,density,decimal\n1 mod 4,100,11/25,0.44\n");
}

#[test]
fn dot_export_lists_every_edge() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.dot");
    let o = boxscope(&["export-dot", "2", "5", "-o", path.to_str().unwrap()]);
    assert!(o.status.success());
    let dot = std::fs::read_to_string(&path).unwrap();
    assert!(dot.starts_with("digraph \"Cay(Z/5 ⋊_2 Z/4)\" {"));
    assert_eq!(dot.matches(" -> ").count(), 80);
    assert_eq!(dot.matches("[label=\"").count(), 100);
    assert!(dot.trim_end().ends_with('}'));
    assert_eq!(stdout(&boxscope(&["export-dot", "2", "5"])), dot);
}

#[test]
fn oddorder_and_density_examples() {
    assert_eq!(stdout(&boxscope(&["oddorder", "2", "1", "2"])), "3 7 3\n5 31 5\n");
    let r = stdout(&boxscope(&[
        "density",
        "ratio-scan",
        "2",
        "--primes",
        "3,5",
        "--bound",
        "45",
    ]));
    assert!(
        r.lines().any(|l| l.split_whitespace().take(3).eq(["45", "12", "4/15"])),
        "{r}"
    );
    assert!(r.lines().last().unwrap().starts_with("min ord_2(N)/N = 4/15"));
}

#[test]
fn verify_reports_single_criterion() {
    let o = boxscope(&["verify", "1"]);
    assert!(stdout(&o).starts_with("PASS #1 "), "{}", stdout(&o));
    assert_eq!(boxscope(&["verify", "3"]).status.code(), Some(1));
    assert_eq!(boxscope(&["verify", "12"]).status.code(), Some(2));
}
