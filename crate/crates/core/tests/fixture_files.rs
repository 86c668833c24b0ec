use std::path::PathBuf;

use mapsolve::fixtures;
use mapsolve::Instance;

#[test]
fn fixture_files_match_the_builtin_instances() {
    let dir: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures"].iter().collect();
    for (stem, inst) in fixtures::all() {
        let text = std::fs::read_to_string(dir.join(format!("{stem}.json")))
            .unwrap_or_else(|e| panic!("{stem}.json: {e}"));
        let loaded = Instance::from_json(&text).unwrap();
        assert_eq!(loaded, inst, "{stem}.json");
    }
}
