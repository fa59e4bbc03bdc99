//! Any descriptor the parser accepts must be drawable: the sampled matrix
//! has the declared shape, finite entries, and is deterministic in the seed.

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
    // Cap the work per input; huge shapes are valid but uninteresting here.
    if config.family.n().saturating_mul(config.family.k()) > 4096 {
        return;
    }
    let a = config
        .family
        .draw(config.seed)
        .expect("parsed configs are drawable");
    assert_eq!((a.rows(), a.cols()), (config.family.n(), config.family.k()));
    assert!(a.is_finite(), "non-finite entries from a valid descriptor");
    let b = config
        .family
        .draw(config.seed)
        .expect("parsed configs are drawable");
    assert_eq!(a, b, "draw is not deterministic in the seed");
});
