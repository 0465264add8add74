use std::process::Command;

use serde_json::Value;
use strata0::cli::run;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("strata0").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn call_json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.push("--json");
    let (code, out, err) = call(&a);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn phat_of_trivial_blowup() {
    let v = call_json(&["phat", "--d", "2", "--kappa=-1,-1,-1,-1,-1,1"]);
    let parts = v["partitions"].as_array().unwrap();
    assert_eq!(parts.len(), 25);
    assert!(parts.iter().all(|p| p["r"] == 1));
}

#[test]
fn boundary_of_four_poles() {
    let v = call_json(&["boundary", "--d", "2", "--kappa=-1,-1,-1,-1"]);
    let parts = v["partitions"].as_array().unwrap();
    assert_eq!(parts.len(), 3);
    for p in parts {
        assert_eq!(p["mu"]["num"], "0");
        assert_eq!(p["blocks"][0][0], 1);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(
        call(&["volume", "--d", "2", "--kappa=2,-1,-1,-1,-1,-1,-1"]).0,
        3
    );
    assert_eq!(call(&["volume", "--d", "2", "--kappa=-1,-1,-1"]).0, 2);
    assert_eq!(call(&["volume", "--kappa=-1,-1,-1,-1"]).0, 2);
    assert_eq!(
        call(&[
            "volume",
            "--d",
            "2",
            "--kappa=-1,-1,-1,-1",
            "--samples",
            "0"
        ])
        .0,
        2
    );
    assert_eq!(call(&["frobnicate"]).0, 2);
    assert_eq!(call(&["--help"]).0, 0);
    let (code, _, err) = call(&[
        "principal",
        "--d",
        "2",
        "--kappa=-1,-1,-1,-1",
        "--tree",
        "1,2;3,x 0-1",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("position 6"), "{err}");
}

#[test]
fn volume_shape() {
    let v = call_json(&["volume", "--d", "2", "--kappa=-1,-1,-1,-1"]);
    let vol = &v["volume"];
    assert_eq!(vol["coefficient"]["num"], "-1");
    assert_eq!(vol["coefficient"]["den"], "4");
    assert_eq!(vol["pi_power"], 2);
    assert!(vol["signed_decimal"]
        .as_str()
        .unwrap()
        .starts_with("-2.4674011"));
    assert!(vol["abs_decimal"]
        .as_str()
        .unwrap()
        .starts_with("2.4674011"));
}

#[test]
fn principal_and_divisor() {
    let v = call_json(&[
        "principal",
        "--d",
        "2",
        "--kappa=2,-1,-1,-1,-1,-1,-1",
        "--tree",
        "1;2,3,4;5,6,7 0-1 0-2",
    ]);
    assert_eq!(v["beta"], serde_json::json!([[1, 1], [0, 1], [1, 0]]));
    assert_eq!(v["in_support"], true);
    assert_eq!(v["fiber_dim"], 1);
    let v = call_json(&["divisor", "--d", "2", "--kappa=-1,-1,-1,-1"]);
    assert_eq!(v["boundary_form"].as_array().unwrap().len(), 3);
    assert_eq!(v["psi_form"].as_array().unwrap().len(), 7);
}

#[test]
fn intersect_products() {
    let v = call_json(&["intersect", "--n", "5", "--factors", "psi1; psi1"]);
    assert_eq!(v["value"]["num"], "1");
    let a = call_json(&[
        "intersect",
        "--d",
        "3",
        "--kappa=-1,-1,-1,-1,-1,-1",
        "--factors",
        "Dmu;Dmu;Dmu",
    ]);
    let b = call_json(&[
        "intersect",
        "--d",
        "3",
        "--kappa=-1,-1,-1,-1,-1,-1",
        "--factors",
        "DmuPsi;Dmu;DmuPsi",
    ]);
    assert_eq!(a["value"], b["value"]);
    assert_eq!(call(&["intersect", "--n", "5", "--factors", "psi1"]).0, 2);
}

#[test]
fn verify_family_cases() {
    for (kappa, chart, case) in [
        (
            "--kappa=-1,-1,-1,-1,-1,-1,1,1",
            "3,4,5,6;1,7;2,8 0-1 0-2",
            "a",
        ),
        ("--kappa=0,0,-1,-1,-1,0,-1", "1,2;3,4,5;6,7 0-1 0-2", "b"),
        ("--kappa=2,-1,-1,-1,-1,-1,-1", "1;2,3,4;5,6,7 0-1 0-2", "c"),
    ] {
        let v = call_json(&[
            "verify-family",
            "--d",
            "2",
            kappa,
            "--chart",
            chart,
            "--samples",
            "5",
        ]);
        assert_eq!(v["all_passed"], true);
        assert_eq!(v["codim2_case"], case);
        assert_eq!(v["pairs"].as_array().unwrap().len(), 4);
    }
}

#[test]
fn deterministic_output() {
    let args = [
        "verify-family",
        "--d",
        "2",
        "--kappa=0,0,-1,-1,-1,0,-1",
        "--chart",
        "1,2;3,4,5;6,7 0-1 0-2 t[0-1]=1/7",
        "--seed",
        "99",
        "--samples",
        "3",
        "--json",
    ];
    assert_eq!(call(&args), call(&args));
    let other: Vec<&str> = args
        .iter()
        .map(|a| if *a == "99" { "100" } else { a })
        .collect();
    assert_ne!(call(&args).1, call(&other).1);
}

#[test]
fn json_round_trip() {
    for args in [
        vec![
            "exceptional",
            "--d",
            "2",
            "--kappa=2,-1,-1,-1,-1,-1,-1",
            "--json",
        ],
        vec!["divisor", "--d", "3", "--kappa=-1,-1,-1,-1,-1,-1", "--json"],
    ] {
        let (_, out, _) = call(&args);
        let v: Value = serde_json::from_str(&out).unwrap();
        let again = serde_json::to_string_pretty(&v).unwrap();
        assert_eq!(format!("{again}\n"), out);
    }
}

#[test]
fn out_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("strata0-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("phat.json");
    let p = path.to_str().unwrap();
    let (code, out, _) = call(&[
        "phat",
        "--d",
        "2",
        "--kappa=-1,-1,-1,-1,-1,1",
        "--json",
        "--out",
        p,
    ]);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), out);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn exceptional_exhaustive_check() {
    let v = call_json(&[
        "exceptional",
        "--d",
        "2",
        "--kappa=-1,-1,-1,-1,-1,1",
        "--max-codim",
        "3",
    ]);
    assert_eq!(v["trivial"], true);
    assert_eq!(v["no_multi_principal_strata"], true);
    assert_eq!(v["terms"].as_array().unwrap().len(), 0);
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_strata0");
    let st = Command::new(bin)
        .args(["volume", "--d", "2", "--kappa=2,-1,-1,-1,-1,-1,-1"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(3));
    assert!(!st.stderr.is_empty());
    let st = Command::new(bin)
        .args(["boundary", "--d", "2", "--kappa=-1,-1,-1,-1"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(0));
}
