mod common;

use common::World;
use trust_schema::schema::anchor_base64;
use trust_schema::{load_schema, SchemaError, Signer};

#[test]
fn bundled_schema_has_four_rules_and_anchor() {
    let w = World::new(1);
    let ids: Vec<&str> = w.schema.rules.iter().map(|r| r.id.as_str()).collect();
    assert_eq!(ids, ["pubparams", "dkey", "entity", "app-data"]);
    assert_eq!(w.schema.anchor, w.anchor.cert);
    assert_eq!(w.schema.rules[2].signer, Signer::Anchor);
}

#[test]
fn text_round_trip() {
    let w = World::new(2);
    let again = load_schema(&w.schema.to_text()).unwrap();
    assert_eq!(again, w.schema);
}

#[test]
fn comments_and_blank_lines_are_ignored() {
    let w = World::new(3);
    let text = format!(
        "# trust\n\nanchor: {}   # root\n\n  rule r: /a/<>* => anchor\n",
        anchor_base64(&w.anchor.cert)
    );
    assert_eq!(load_schema(&text).unwrap().rules.len(), 1);
}

#[test]
fn rejects_missing_anchor_and_empty_rules() {
    assert_eq!(load_schema("rule r: /a => anchor\n"), Err(SchemaError::MissingAnchor));
    let w = World::new(4);
    let text = format!("anchor: {}\n", anchor_base64(&w.anchor.cert));
    assert_eq!(load_schema(&text), Err(SchemaError::NoRules));
}

#[test]
fn rejects_undefined_capture() {
    let w = World::new(5);
    let text = format!(
        "anchor: {}\nrule r: /a/<x>/<>* => /<y>/KEY/<>*\n",
        anchor_base64(&w.anchor.cert)
    );
    assert!(matches!(
        load_schema(&text),
        Err(SchemaError::UndefinedCapture { ref rule, ref capture }) if rule == "r" && capture == "y"
    ));
}

#[test]
fn parse_errors_carry_line_numbers() {
    let w = World::new(6);
    let a = anchor_base64(&w.anchor.cert);
    let cases = [
        (format!("anchor: {a}\nrule r /a => anchor\n"), 2),
        (format!("anchor: {a}\n\nrule r: /a anchor\n"), 3),
        (format!("anchor: {a}\nrule r: /a/<b => anchor\n"), 2),
        (format!("anchor: {a}\nbogus\n"), 2),
        ("anchor: !!!\n".to_owned(), 1),
        (format!("anchor: {a}\nrule r: /a => anchor\nrule r: /b => anchor\n"), 3),
        (format!("anchor: {a}\nanchor: {a}\n"), 2),
    ];
    for (text, line) in cases {
        match load_schema(&text) {
            Err(SchemaError::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
            other => panic!("{text}: {other:?}"),
        }
    }
}

#[test]
fn anchor_must_be_self_signed() {
    let w = World::new(7);
    let text = format!("anchor: {}\nrule r: /a => anchor\n", anchor_base64(&w.aa.cert));
    assert!(matches!(load_schema(&text), Err(SchemaError::BadAnchor(_))));
}
