//! The family-descriptor parser must never panic on arbitrary input, and any
//! accepted descriptor must round-trip through its canonical serialization.

#![no_main]

use libfuzzer_sys::fuzz_target;
use osilab::sketch::FamilyConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(config) = text.parse::<FamilyConfig>() else {
        return;
    };
    let canonical = config.to_string();
    let reparsed: FamilyConfig = canonical
        .parse()
        .unwrap_or_else(|e| panic!("canonical form failed to reparse: {e}\n{canonical}"));
    assert_eq!(reparsed, config, "round trip changed the descriptor");
});
