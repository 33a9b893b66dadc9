//! Fuzzes the weight description decoder: any accepted spec must build at a
//! small resolution without panicking, and the built field must survive a
//! constant scan.

#![no_main]

use libfuzzer_sys::fuzz_target;
use mixedweak::config::WeightSpec;
use mixedweak::weights::{ap_constant, cube_family};

fuzz_target!(|data: &[u8]| {
    let Ok(spec) = serde_json::from_slice::<WeightSpec>(data) else {
        return;
    };
    let _ = spec.rebuildable();
    let Ok(w) = spec.build(1, 1.0, 8) else {
        return;
    };
    if let Ok(family) = cube_family(&w, 4, 0) {
        let _ = ap_constant(&w, 1.0, &family);
    }
});
