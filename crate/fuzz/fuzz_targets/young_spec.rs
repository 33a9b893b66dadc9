//! Fuzzes the profile description decoder and the evaluation paths behind
//! it: no input may panic, and every accepted profile must evaluate.

#![no_main]

use libfuzzer_sys::fuzz_target;
use mixedweak::config::YoungSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(spec) = serde_json::from_slice::<YoungSpec>(data) else {
        return;
    };
    let Ok(phi) = spec.build() else {
        return;
    };
    let _ = phi.eval_raw(0.0);
    let _ = phi.eval_raw(0.5);
    let _ = phi.eval_raw(3.0);
    let _ = phi.generalized_inverse(1.5);
    let _ = phi.is_identity();
});
