use folia::syntax::{parse_foliation_file, parse_point, print_foliation_file};
use proptest::prelude::*;

const NAMES: [&str; 4] = ["x", "y", "z", "w"];

fn term(n: usize) -> impl Strategy<Value = String> {
    (-9i64..=9, 1i64..=5, prop::collection::vec(0u32..=3, n)).prop_map(|(a, b, exps)| {
        let mut parts = vec![if b == 1 { a.to_string() } else { format!("{a}/{b}") }];
        for (i, e) in exps.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(NAMES[i].to_string()),
                _ => parts.push(format!("{}^{e}", NAMES[i])),
            }
        }
        parts.join("*")
    })
}

fn poly_text(n: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(term(n), 1..4).prop_map(|ts| ts.join(" + "))
}

fn file_text() -> impl Strategy<Value = String> {
    (3usize..=4)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(poly_text(n), n), any::<bool>(), any::<bool>()))
        .prop_map(|(n, coeffs, polydisc, ncp)| {
            let lines: String = coeffs.iter().enumerate().map(|(i, c)| format!("    {}: {c};\n", NAMES[i])).collect();
            let domain = if polydisc { "polydisc 1" } else { "affine" };
            let ncp = if ncp { "  assume ncp;\n" } else { "" };
            format!(
                "foliation \"generated\" {{\n  vars: {};\n  field {{\n{lines}  }}\n  domain: {domain};\n  query components;\n{ncp}}}\n",
                NAMES[..n].join(", ")
            )
        })
}

proptest! {
    #[test]
    fn printed_files_parse_back(src in file_text()) {
        let f = parse_foliation_file(&src).unwrap();
        let printed = print_foliation_file(&f);
        let g = parse_foliation_file(&printed).unwrap();
        prop_assert_eq!(&g, &f);
        prop_assert_eq!(print_foliation_file(&g), printed);
    }

    #[test]
    fn arbitrary_text_never_panics(src in "\\PC{0,200}") {
        let _ = parse_foliation_file(&src);
    }

    #[test]
    fn token_soup_never_panics(tokens in prop::collection::vec(
        prop::sample::select(vec!["foliation", "\"a\"", "{", "}", "vars:", "x", "y", ",", ";", "field", "x:", "(",
            ")", "^", "999999", "*", "+", "-", "/", "0", "root", "t", "query", "domain:", "polydisc", "params:", "!=", "#"]),
        0..60,
    )) {
        let _ = parse_foliation_file(&tokens.join(" "));
    }
}

#[test]
fn deep_nesting_is_rejected_not_overflowed() {
    let expr = format!("{}x{}", "(".repeat(10_000), ")".repeat(10_000));
    let src = format!("foliation \"deep\" {{\n  vars: x, y;\n  field {{\n    x: {expr};\n    y: 1;\n  }}\n}}\n");
    let err = parse_foliation_file(&src).unwrap_err();
    assert!(err.to_string().contains("deep"), "{err}");
}

#[test]
fn huge_exponents_are_rejected() {
    let src = "foliation \"big\" {\n  vars: x, y;\n  field {\n    x: x^100000;\n    y: 1;\n  }\n}\n";
    assert!(parse_foliation_file(src).is_err());
}

#[test]
fn points_use_declared_names() {
    let src = "foliation \"p\" {\n  vars: x, y;\n  params: c != 0;\n  field {\n    x: y;\n    y: c*x;\n  }\n}\n";
    let f = parse_foliation_file(src).unwrap();
    assert_eq!(parse_point("(c, 1/2 + i)", &f.ctx).unwrap().len(), 2);
    assert!(parse_point("(q, 0)", &f.ctx).is_err());
    assert!(parse_point("(0, 0, 0)", &f.ctx).is_err());
}
