use adelix_cli::{run, Outcome};
use serde_json::Value;

fn adelix(args: &[&str]) -> Outcome {
    run(std::iter::once("adelix").chain(args.iter().copied()))
}

fn json(out: &Outcome) -> Value {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout))
}

fn validator() -> jsonschema::Validator {
    let schema: Value = serde_json::from_str(include_str!("../schema/report.schema.json")).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

/// Every float in a report sits inside an approx value, next to its tolerance.
fn floats_are_tagged(v: &Value, inside_approx: bool) -> bool {
    match v {
        Value::Number(n) => inside_approx || n.is_i64() || n.is_u64(),
        Value::Array(xs) => xs.iter().all(|x| floats_are_tagged(x, inside_approx)),
        Value::Object(m) => {
            let approx = m.get("kind").and_then(Value::as_str) == Some("approx");
            m.iter().all(|(k, x)| floats_are_tagged(x, approx || k == "arch_tol"))
        }
        _ => true,
    }
}

const COMMANDS: &[(&[&str], i32)] = &[
    (&["selftest", "--quick"], 0),
    (&["residue", "--form", "dt/t", "--field", "Q"], 0),
    (&["residue", "--form", "dt/t", "--field", "Qp", "--p", "3"], 0),
    (&["residue", "--form", "dt/(t-1)", "--field", "Fp", "--p", "5", "--at", "1"], 0),
    (&["residue", "--form", "(3/t+5+t) dt", "--field", "R", "--at", "inf"], 0),
    (&["residue", "--form", "t^(1/2) dt"], 2),
    (&["residue", "--form", "dt/t^40", "--t-window", "8"], 3),
    (&["residue", "--form", "dt", "--field", "Qp"], 2),
    (&["curve-coh", "--p", "5", "--divisor", "3*inf-1*(t)"], 0),
    (&["curve-coh", "--p", "3", "--divisor", "3*inf - 1*(t) + 2*(t^2+1)"], 0),
    (&["curve-coh", "--p", "2", "--divisor", "2*(t^2+2)"], 2),
    (&["curve-coh", "--p", "2", "--divisor", "1*(t) 2*inf"], 2),
    (&["arith-rr", "--gram", "[[4]]"], 0),
    (&["arith-rr", "--gram", "[[1,0],[0,4]]"], 0),
    (&["arith-rr", "--divisor", "1*(2)-1*(5)+0.5*inf"], 0),
    (&["arith-rr", "--gram", "[[1,2],[2,1]]"], 2),
    (&["surface", "residue", "--flag", "V2@t=0", "--form", "dt/(2*t)"], 0),
    (&["surface", "residue", "--flag", "E1/2@3", "--form", "dt/(3*t-1)"], 0),
    (&["surface", "residue", "--flag", "arch@t=0", "--form", "dt/(2*t)"], 0),
    (&["surface", "residue", "--flag", "W2@t=0", "--form", "dt"], 2),
    (&["surface", "check", "point", "--form", "dt/(2*t)", "--at", "2,t=0"], 0),
    (&["surface", "check", "vertical", "--form", "dt/(t*(t-1))", "--p", "3"], 0),
    (&["surface", "check", "horizontal", "--form", "dt/(6*t)", "--at", "0"], 0),
    (&["surface", "check", "point", "--form", "dt/(t^2+1)", "--at", "2,t=1"], 2),
    (&["surface", "h0", "--divisor", "1*V2+3*Einf"], 0),
    (&["surface", "pairing", "--omega", "dt", "--p", "2", "--window", "-1,1"], 0),
    (&["surface", "pairing", "--omega", "3*dt/t", "--divisor", "1*V3", "--p", "3"], 0),
    (&["surface", "pairing", "--omega", "dt", "--p", "2", "--points", "0"], 2),
];

#[test]
fn exit_codes_and_schema() {
    let v = validator();
    for (args, code) in COMMANDS {
        let out = adelix(args);
        assert_eq!(out.code, *code, "{args:?}\n{}", out.stdout);
        let report = json(&out);
        let errors: Vec<String> = v.iter_errors(&report).map(|e| format!("{e} at {}", e.instance_path())).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}\n{report:#}");
        assert!(floats_are_tagged(&report, false), "{args:?}: untagged float\n{report:#}");
    }
}

#[test]
fn worked_examples() {
    let r = json(&adelix(&["surface", "check", "point", "--form", "dt/(2*t)", "--at", "2,t=0"]));
    assert_eq!(r["results"]["total"], serde_json::json!({ "kind": "exact", "value": "0" }));
    let r = json(&adelix(&["arith-rr", "--gram", "[[4]]"]));
    assert!(r["results"]["rr_defect"]["value"].as_f64().unwrap().abs() < 1e-8);
    let r = json(&adelix(&["residue", "--form", "dt/t", "--field", "Qp", "--p", "2"]));
    assert_eq!(r["results"]["residue"]["rational"], "-1");
    let r = json(&adelix(&["curve-coh", "--p", "5", "--divisor", "3*inf-1*(t)"]));
    assert_eq!((r["results"]["h0"].as_i64(), r["results"]["deg"].as_i64()), (Some(3), Some(2)));
    let r = json(&adelix(&["surface", "h0", "--divisor", "1*V2+3*Einf"]));
    assert_eq!((r["results"]["rank"].as_i64(), r["results"]["coefficient_ideal"].as_str()), (Some(4), Some("(1/2)Z")));
}

#[test]
fn precision_errors_name_the_window() {
    let r = json(&adelix(&["residue", "--form", "dt/t^40", "--t-window", "8"]));
    assert_eq!(r["error"]["kind"], "window_too_small");
    assert_eq!(r["error"]["needed"]["value"], -40);
    let ok = adelix(&["residue", "--form", "dt/t^40", "--t-window", "-40,8"]);
    assert_eq!(ok.code, 0, "{}", ok.stdout);
}

#[test]
fn parse_errors_carry_offsets() {
    let r = json(&adelix(&["residue", "--form", "t^(1/2) dt"]));
    assert_eq!(r["error"]["kind"], "parse");
    assert_eq!(r["error"]["offset"], 2);
}

#[test]
fn usage_errors_and_text_output() {
    let out = adelix(&["frobnicate"]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.is_empty() && !out.stderr.is_empty());
    assert_eq!(adelix(&["--help"]).code, 0);
    let out = adelix(&["surface", "h0", "--divisor", "1*V2+3*Einf", "--text"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("(1/2)Z"), "{}", out.stdout);
}
