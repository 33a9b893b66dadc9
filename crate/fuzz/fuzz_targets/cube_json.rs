//! Fuzzes the cube wire format `{"grid": i, "k": k, "m": [...]}`: every
//! accepted cube must support its geometry queries without panicking.

#![no_main]

use libfuzzer_sys::fuzz_target;
use mixedweak::grid::Cube;

fuzz_target!(|data: &[u8]| {
    let Ok(cube) = serde_json::from_slice::<Cube>(data) else {
        return;
    };
    let _ = cube.side();
    let _ = cube.volume();
    for a in 0..cube.n as usize {
        let _ = cube.low(a);
        let _ = cube.high(a);
    }
    if let Ok(parent) = cube.parent() {
        let _ = parent.contains(&cube);
    }
    if let Ok(children) = cube.children() {
        for c in &children {
            let _ = cube.contains(c);
        }
    }
    let _ = serde_json::to_string(&cube);
});
