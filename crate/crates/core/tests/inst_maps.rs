use bigengine::frontend::print_bigraph;
use bigengine::matcher::find_occurrences;
use bigengine::rewriting::{apply_at, RuleError};
use bigengine::{iso_equal, parse_bigraph, parse_model, BrsSpec, FrontendError};

fn load(name: &str) -> Result<BrsSpec, FrontendError> {
    let path = format!("{}/../../models/{name}.big", env!("CARGO_MANIFEST_DIR"));
    parse_model(&std::fs::read_to_string(path).unwrap())
}

fn apply_once(spec: &BrsSpec) -> bigengine::Bigraph {
    let rule = spec.rules().next().unwrap();
    let occ = find_occurrences(&spec.init, &rule.lhs).unwrap();
    assert_eq!(occ.len(), 1);
    apply_at(&spec.init, rule, &occ[0]).unwrap()
}

#[test]
fn copy_duplicates_the_database_contents() {
    let spec = load("copy").unwrap();
    let out = apply_once(&spec);
    let expected = parse_bigraph(
        "/y (/x (Adult{x} | Server{x,y}.(Data | Data)) | Database{y}.Data)",
        &spec.signature,
    )
    .unwrap();
    assert!(iso_equal(&out, &expected), "{}", print_bigraph(&out));
}

#[test]
fn delete_empties_the_database() {
    let spec = load("delete").unwrap();
    let out = apply_once(&spec);
    let expected =
        parse_bigraph("/y (/x (Adult{x} | Server{x,y}.Data) | Database{y}.1)", &spec.signature).unwrap();
    assert!(iso_equal(&out, &expected), "{}", print_bigraph(&out));
}

#[test]
fn delete_as_printed_has_an_invalid_map() {
    match load("errors/delete_as_printed") {
        Err(FrontendError::Rule { source, .. }) => assert_eq!(source, RuleError::InvalidInstMap),
        other => panic!("{other:?}"),
    }
}

#[test]
fn copied_links_stay_connected() {
    let src = "
        atomic ctrl A = 1; ctrl Server = 0; ctrl Database = 0; atomic ctrl B = 1;
        react copy = Server.id || Database.id --> Server.(id | id) || Database.id @[0,1,1];
        big s0 = Server.1 || Database.(A{x} | /e (B{e} | B{e}));
        begin brs init s0; rules = [ {copy} ]; end";
    let spec = parse_model(src).unwrap();
    let out = apply_once(&spec);
    let x = out.outer_link("x").unwrap();
    assert_eq!(out.link_ports(x).len(), 2, "both copies of A sit on x");
    // Closed edges inside a copied parameter are copied with it.
    assert_eq!(out.edge_count(), 2);
    let expected = parse_bigraph(
        "Server.(A{x} | /e (B{e} | B{e})) || Database.(A{x} | /f (B{f} | B{f}))",
        &spec.signature,
    )
    .unwrap();
    assert!(iso_equal(&out, &expected), "{}", print_bigraph(&out));
}
