use geomlaw::limits::ExperimentConfig;

#[test]
fn checked_in_schema_is_current() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../schema/experiment.schema.json");
    let text = std::fs::read_to_string(path).expect("schema file");
    let on_disk: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(
        on_disk,
        ExperimentConfig::json_schema(),
        "regenerate with `geomlaw validate --schema > schema/experiment.schema.json`"
    );
}
