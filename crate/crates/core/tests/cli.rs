use geocurrents::cli::run;
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(args.iter().copied(), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = call(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn documented_examples() {
    assert_eq!(json(&["stretch", "--exact", "--map", "phi", "-k", "2"])["value"], "119/54");
    assert_eq!(json(&["count", "-v", "a", "-w", "~bab"])["value"], "1");
    let (code, out, err) = call(&["realize", "--level", "2", "--coords", r#"{"aa":1,"bb":1}"#]);
    assert_eq!((code, out.as_str()), (1, ""));
    assert!(err.contains("NotRealizable"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    let (code, _, err) = call(&["frobnicate"]);
    assert_eq!(code, 2);
    assert!(err.contains("Usage"));
    assert_eq!(call(&["count", "-v", "a"]).0, 2);
    assert_eq!(call(&["stretch", "--map", "phi", "--exact", "--mc"]).0, 2);
}

#[test]
fn domain_errors_name_the_error() {
    for (args, name) in [
        (vec!["reduce", "-w", "ab?"], "InvalidInput"),
        (vec!["apply", "--map", "tau", "-w", "c"], "InvalidInput"),
        (vec!["stretch", "--exact", "--map", "a=>aa; b=>aaa"], "NotInjective"),
        (vec!["closed-form", "--map", "tau"], "Unsupported"),
        (vec!["current", "--uniform", "--chart", "theta"], "Unsupported"),
        (vec!["stretch", "--mc", "--map", "phi", "--n", "10"], "InvalidInput"),
    ] {
        let (code, _, err) = call(&args);
        assert_eq!(code, 1, "{args:?}");
        assert!(err.contains(name), "{args:?}: {err}");
    }
}

#[test]
fn every_subcommand_has_help() {
    for c in [
        "reduce", "count", "length", "apply", "inject-check", "current", "project", "extend", "realize", "extremal", "iform",
        "table", "push", "stretch", "closed-form", "distortion", "extrema", "teq", "freq",
    ] {
        let (code, out, _) = call(&[c, "--help"]);
        assert_eq!(code, 0, "{c}");
        assert!(out.contains("Usage"), "{c}");
    }
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["stretch", "--mc", "--map", "tau", "--n", "2000", "--trials", "4", "--seed", "3"],
        vec!["teq", "ab", "ba", "--trials", "20", "--seed", "9"],
        vec!["freq", "--n", "5000", "--m", "2", "--emit", "csv"],
        vec!["extrema", "--map", "phi"],
    ] {
        assert_eq!(call(&args), call(&args));
    }
    let a = json(&["stretch", "--mc", "--map", "tau", "--n", "2000", "--trials", "4", "--seed", "3"]);
    let b = json(&["stretch", "--mc", "--map", "tau", "--n", "2000", "--trials", "4", "--seed", "4"]);
    assert_ne!(a["float"], b["float"]);
    assert_ne!(a["inputs_digest"], b["inputs_digest"]);
}

#[test]
fn emitted_currents_are_accepted_back() {
    let current = call(&["current", "-w", "abAAb", "--level", "3"]).1;
    let extended = call(&["extend", "--input", &current, "--to", "4"]).1;
    assert_eq!(json(&["project", "--input", &extended])["current"], serde_json::from_str::<Value>(&current).unwrap()["current"]);
    assert_eq!(json(&["realize", "--input", &current])["witness"], "~abAAb");
    let (code, _, err) = call(&["push", "--map", "tau", "--input", &current, "--to", "2"]);
    assert_eq!(code, 1);
    assert!(err.contains("LevelTooLow"));
    let deep = call(&["current", "-w", "abAAb", "--level", "6"]).1;
    let pushed = call(&["push", "--map", "tau", "--input", &deep, "--to", "2"]).1;
    let direct = json(&["current", "-w", json(&["apply", "--map", "tau", "-w", "~abAAb"])["value"].as_str().unwrap(), "--level", "2"]);
    assert_eq!(serde_json::from_str::<Value>(&pushed).unwrap()["current"], direct["current"]);
    assert_eq!(json(&["iform", "--input", &current])["value"], "5");
    // τ(abAAb) is conjugate to abAba, so the distortion is 5/5
    assert_eq!(json(&["apply", "--map", "tau", "-w", "~abAAb"])["value"], "~aabAb");
    assert_eq!(json(&["distortion", "--map", "tau", "--input", &current])["value"], "1");
}

#[test]
fn chart_and_metric_flags() {
    let metric = r#"{"x":"1/2","y":"3"}"#;
    let l = json(&["length", "--chart", "theta", "--metric", metric, "-w", "ab"]);
    // ab = yX zX: 3 + 1/2 + 1 + 1/2
    assert_eq!(l["value"], "5");
    let cur = call(&["current", "--chart", "theta", "-w", "ab", "--level", "2"]).1;
    assert_eq!(json(&["iform", "--metric", metric, "--input", &cur])["value"], "5");
    let table = json(&["table", "--chart", "dumbbell"]);
    assert!(table["window_K"].as_u64().unwrap() >= 1);
}

#[test]
fn stretch_and_closed_forms_agree() {
    for k in ["2", "3"] {
        assert_eq!(
            json(&["stretch", "--exact", "--map", "phi", "-k", k])["value"],
            json(&["closed-form", "--map", "phi", "-k", k])["value"]
        );
        assert_eq!(
            json(&["stretch", "--exact", "--map", "phi_inv", "-k", k])["value"],
            json(&["closed-form", "--map", "phi_inv", "--corrected", "-k", k])["value"]
        );
    }
    assert_eq!(json(&["closed-form", "--map", "phi_inv", "-k", "2"])["value"], "169/81");
}

#[test]
fn extrema_and_teq_examples() {
    let ex = json(&["extrema", "--map", "tau", "--level", "2"]);
    assert_eq!(ex["min"]["value"], "1/2");
    assert_eq!(ex["min"]["witness"], "~aB");
    assert_eq!(ex["max"]["value"], "2");
    assert_eq!(ex["max"]["witness"], "~b");
    assert_eq!(ex["exact"], true);
    let loose = json(&["extrema", "--map", "tau", "--level", "2", "--strict"]);
    assert_eq!(loose["exact"], false);
    assert_eq!(json(&["teq", "abAB", "ABab"])["value"], "PassedAllTrials");
    assert_eq!(json(&["teq", "a", "b", "--trials", "10"])["value"], "Falsified");
}

#[test]
fn csv_emission() {
    let (code, out, _) = call(&["current", "-w", "ab", "--level", "2", "--emit", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out, "path,coordinate\nab,1\nba,1\n");
    let (_, out, _) = call(&["closed-form", "--map", "phi", "--emit", "csv"]);
    assert!(out.contains("value,119/54"));
    let (_, out, _) = call(&["stretch", "--mc", "--map", "tau", "--n", "1000", "--trials", "3", "--emit", "csv"]);
    assert_eq!(out.lines().count(), 4);
}
