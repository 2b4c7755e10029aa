use std::path::PathBuf;

use manin_core::cli::run;

fn spec_file(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("specs")
        .join(name)
        .display()
        .to_string()
}

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("manin").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn value<'a>(out: &'a str, key: &str) -> Option<&'a str> {
    out.lines().find_map(|l| l.strip_prefix(key)?.strip_prefix('='))
}

fn assert_machine_shape(out: &str) {
    assert!(out.ends_with('\n'));
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines.iter().all(|l| l.contains('=')), "{out}");
    assert!(matches!(*lines.last().unwrap(), "status=pass" | "status=fail"));
}

#[test]
fn imk_sweep_passes() {
    let spec = spec_file("legendre.family");
    let (code, out, _) = invoke(&[
        "imk-check",
        "--spec",
        &spec,
        "--prime-sweep",
        "13,3,5,11,7",
        "--format",
        "machine",
    ]);
    assert_eq!(code, 0, "{out}");
    assert_machine_shape(&out);
    for p in [3, 5, 7, 11, 13] {
        assert_eq!(value(&out, &format!("p{p}.direct_ok")), Some("true"));
        assert_eq!(value(&out, &format!("p{p}.dual_ok")), Some("true"));
    }
    let order: Vec<&str> = out.lines().filter(|l| l.contains(".p=")).collect();
    assert_eq!(order, ["p3.p=3", "p5.p=5", "p7.p=7", "p11.p=11", "p13.p=13"]);
    assert_eq!(value(&out, "status"), Some("pass"));
}

#[test]
fn kernel_test_is_deterministic() {
    let spec = spec_file("legendre3.curve");
    let args = ["kernel-test", "--spec", &spec, "--seed", "1", "--format", "machine"];
    let (code, out, _) = invoke(&args);
    assert_eq!(code, 0, "{out}");
    assert_machine_shape(&out);
    assert_eq!(value(&out, "type_a"), Some("5"));
    assert_eq!(value(&out, "type_b"), Some("3"));
    assert_eq!(invoke(&args).1, out);
}

#[test]
fn gates_and_input_errors() {
    let (code, out, err) = invoke(&[
        "hasse-witt",
        "--spec",
        &spec_file("supersingular.curve"),
        "--format",
        "machine",
    ]);
    assert_eq!(code, 1);
    assert_eq!(value(&out, "reason"), Some("NotOrdinary"));
    assert_eq!(value(&out, "status"), Some("fail"));
    assert!(!err.is_empty());

    let (code, out, _) = invoke(&[
        "picard-fuchs",
        "--spec",
        &spec_file("isotrivial.family"),
        "--format",
        "machine",
    ]);
    assert_eq!(code, 1);
    assert_eq!(value(&out, "reason"), Some("IsotrivialFamily"));

    let dir = std::env::temp_dir().join(format!("manin-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.curve");
    std::fs::write(&bad, "p=3\na2=((1+t)\na4=t\na6=0\n").unwrap();
    let (code, out, err) = invoke(&["hasse-witt", "--spec", bad.to_str().unwrap(), "--format", "machine"]);
    assert_eq!(code, 2);
    assert_eq!(value(&out, "reason"), Some("ParseError"));
    assert!(err.contains("line 2"), "{err}");

    let even = dir.join("even.curve");
    std::fs::write(&even, "p=4\na2=0\na4=1\na6=t\n").unwrap();
    assert_eq!(invoke(&["hasse-witt", "--spec", even.to_str().unwrap()]).0, 2);

    let nonintegral = dir.join("third.family");
    std::fs::write(&nonintegral, "family=true\na2=0\na4=t/3\na6=1\n").unwrap();
    let (code, out, _) = invoke(&[
        "imk-check",
        "--spec",
        nonintegral.to_str().unwrap(),
        "--prime-sweep",
        "3",
        "--format",
        "machine",
    ]);
    assert_eq!(code, 1);
    assert_eq!(value(&out, "reason"), Some("BadReduction"));
    std::fs::remove_dir_all(&dir).unwrap();

    assert_eq!(invoke(&["hasse-witt"]).0, 2);
    assert_eq!(invoke(&["frobnicate"]).0, 2);
    assert_eq!(invoke(&["--help"]).0, 0);
}

#[test]
fn other_commands() {
    let (code, out, _) = invoke(&[
        "picard-fuchs",
        "--spec",
        &spec_file("legendre.family"),
        "--format",
        "machine",
    ]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "alpha"), Some("(2*t-1)/(t^2-t)"));
    assert_eq!(value(&out, "beta"), Some("(1/4)/(t^2-t)"));

    let (code, out, _) = invoke(&[
        "hasse-witt",
        "--spec",
        &spec_file("legendre3.curve"),
        "--format",
        "machine",
    ]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "lambda_bar"), Some("2*t+2"));

    let (code, out, _) = invoke(&[
        "manin-eval",
        "--spec",
        &spec_file("curve_b.curve"),
        "--format",
        "machine",
    ]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(value(&out, "mu_of_p_multiple_zero"), Some("true"));

    let (code, out, _) = invoke(&["selftest"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().last().unwrap().ends_with("pass"));
}
