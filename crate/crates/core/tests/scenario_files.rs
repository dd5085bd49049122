use std::path::PathBuf;

use slidenav::scenario::{load_scenario, preset, PRESETS};

#[test]
fn checked_in_scenarios_match_presets() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    for name in PRESETS {
        let spec = load_scenario(&dir.join(format!("{name}.json"))).unwrap();
        assert_eq!(spec, preset(name).unwrap(), "{name}");
    }
}
