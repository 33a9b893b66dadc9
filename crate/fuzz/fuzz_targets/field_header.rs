//! Fuzzes the on-disk field format: a JSON header followed by a `0x00`
//! separator and a little-endian `f64` payload, mirroring the
//! `<base>.json` / `<base>.bin` pair.

#![no_main]

use libfuzzer_sys::fuzz_target;
use mixedweak::config::FieldHeader;
use mixedweak::field::SampledField;

fuzz_target!(|data: &[u8]| {
    let Some(split) = data.iter().position(|&b| b == 0) else {
        return;
    };
    let (head, tail) = (&data[..split], &data[split + 1..]);
    let Ok(header) = serde_json::from_slice::<FieldHeader>(head) else {
        return;
    };
    if header.cells > 1 << 12 {
        return;
    }
    let values: Vec<f64> = tail
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let Ok(field) = SampledField::new(
        header.dim,
        header.half_width,
        header.cells,
        header.kind,
        values,
    ) else {
        return;
    };
    let full = field.full_range();
    let _ = field.integrate(&full);
    let _ = field.min_over(&full);
});
