//! Fuzzes the top-level run configuration decoder and its validation. Small
//! accepted configs additionally build their fields.

#![no_main]

use libfuzzer_sys::fuzz_target;
use mixedweak::config::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(cfg) = serde_json::from_slice::<ExperimentConfig>(data) else {
        return;
    };
    if cfg.validate().is_err() {
        return;
    }
    // cap the work per input; validation already ran on everything
    if cfg.cells <= 64 && cfg.dim == 1 {
        if let Ok((_, _, f, _)) = cfg.build_fields(cfg.cells) {
            let _ = cfg.t_grid(&f);
        }
    }
});
