//! Muckenhoupt and reverse-Hölder constant estimation on sampled weights,
//! plus the weight generators used by the experiments.
//!
//! Constants over "all cubes" are estimated as maxima over a scanned family:
//! every dyadic cube of every shifted grid that fits in the box, plus a
//! seeded batch of random mesh-aligned boxes. Estimates are therefore lower
//! bounds of the true constants and nondecreasing as the family grows.
//! Unboundedness (a weight outside the class) is detected by refinement:
//! the estimate keeps growing as the mesh resolution doubles.

use crate::error::{Error, Result};
use crate::field::{CellRange, FieldKind, SampledField};
#[cfg(test)]
use crate::field::power_weight;
use crate::grid::build_grids;
use crate::maximal::{box_levels, cubes_in_box, maximal_hl_uncentered_field};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Scanned cube family: all dyadic cubes of all grids snapped to the mesh,
/// plus `random` mesh-aligned boxes drawn from the given seed.
pub fn cube_family(w: &SampledField, random: usize, seed: u64) -> Result<Vec<CellRange>> {
    let grids = build_grids(w.dim())?;
    let mut out: Vec<CellRange> = Vec::new();
    for g in &grids {
        for k in box_levels(w) {
            for (_, r) in cubes_in_box(w, g, k) {
                out.push(r);
            }
        }
    }
    out.sort_by_key(|r| (r.lo, r.hi));
    out.dedup();
    let n = w.cells();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random {
        let mut r = CellRange {
            lo: [0; 3],
            hi: [1; 3],
            n: w.dim(),
        };
        let len = rng.gen_range(1..=n);
        for a in 0..w.dim() as usize {
            let lo = rng.gen_range(0..=n - len);
            r.lo[a] = lo;
            r.hi[a] = lo + len;
        }
        out.push(r);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct MuckenhouptReport {
    pub p: f64,
    pub constant: f64,
    pub cubes_scanned: usize,
    /// Cell-range bounds of the attaining cube, axis 0.
    pub attaining: Option<(usize, usize)>,
}

fn weight_guard(w: &SampledField) -> Result<()> {
    if w.kind() != FieldKind::Weight {
        return Err(Error::NotAWeight("field is not declared as a weight".into()));
    }
    Ok(())
}

fn sup_scan(family: &[CellRange], score: impl Fn(&CellRange) -> f64) -> (f64, Option<(usize, usize)>) {
    let mut best = 0.0f64;
    let mut attaining = None;
    for r in family {
        let s = score(r);
        if s > best {
            best = s;
            attaining = Some((r.lo[0], r.hi[0]));
        }
    }
    (best, attaining)
}

/// `A_p` constant estimate over the family. `p = 1` uses
/// `avg(w) / min(w)` per cube; `p > 1` uses
/// `avg(w) avg(w^{1-p'})^{p-1}`.
pub fn ap_constant(w: &SampledField, p: f64, family: &[CellRange]) -> Result<MuckenhouptReport> {
    weight_guard(w)?;
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("A_p needs p >= 1, got {p}")));
    }
    let (constant, attaining) = if p == 1.0 {
        sup_scan(family, |r| {
            let mut sum = 0.0f64;
            let mut min = f64::INFINITY;
            let mut count = 0usize;
            for i in w.iter_range(r) {
                let v = w.values()[i];
                sum += v;
                min = min.min(v);
                count += 1;
            }
            sum / count as f64 / min
        })
    } else {
        let pprime = p / (p - 1.0);
        let dual = w.map(FieldKind::Weight, |v| v.powf(1.0 - pprime))?;
        sup_scan(family, |r| {
            w.mean(r) * dual.mean(r).powf(p - 1.0)
        })
    };
    Ok(MuckenhouptReport {
        p,
        constant,
        cubes_scanned: family.len(),
        attaining,
    })
}

/// Reverse-Hölder constant estimate:
/// `sup_Q (avg w^s)^{1/s} / avg w` for `s > 1`.
pub fn rh_constant(w: &SampledField, s: f64, family: &[CellRange]) -> Result<MuckenhouptReport> {
    weight_guard(w)?;
    if !(s > 1.0) {
        return Err(Error::Domain(format!("reverse Hölder needs s > 1, got {s}")));
    }
    let ws = w.map(FieldKind::Weight, |v| v.powf(s))?;
    let (constant, attaining) = sup_scan(family, |r| ws.mean(r).powf(1.0 / s) / w.mean(r));
    Ok(MuckenhouptReport {
        p: s,
        constant,
        cubes_scanned: family.len(),
        attaining,
    })
}

/// Declares a refinement sequence of estimates divergent when doubling the
/// resolution grows the estimate by a factor of at least 1.10 twice in a
/// row. The slowest blow-ups among the tested out-of-class weights grow by
/// about 1.12 per doubling, while in-class constants converge, so their
/// growth factors approach 1.
pub fn refinement_diverges(estimates: &[f64]) -> bool {
    estimates
        .windows(3)
        .any(|w| w[1] >= 1.10 * w[0] && w[2] >= 1.10 * w[1])
}

/// `A_infty`-type fit: the largest `eps` on the ladder `{0.05, ..., 1}`
/// admitting a moderate `C >= 1` with `w(E)/w(Q) <= C (|E|/|Q|)^eps` on all
/// scanned `(Q, E)` pairs; `E` ranges over sublevel sets of `w` on `Q` and
/// seeded random cell unions. The returned pair satisfies the display on
/// every scanned pair by construction.
pub fn ainfty_fit(w: &SampledField, family: &[CellRange], subsets_per_cube: usize, seed: u64) -> Result<(f64, f64)> {
    weight_guard(w)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // (|E|/|Q|, w(E)/w(Q)) pairs
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    for r in family {
        let cells: Vec<usize> = w.iter_range(r).collect();
        let total: f64 = cells.iter().map(|&i| w.values()[i]).sum();
        let count = cells.len();
        let mut push = |subset: &[usize]| {
            if subset.is_empty() {
                return;
            }
            let mass: f64 = subset.iter().map(|&i| w.values()[i]).sum();
            pairs.push((subset.len() as f64 / count as f64, mass / total));
        };
        // full cube: degenerate pair constraining only C >= 1
        push(&cells);
        // sublevel sets at quartile thresholds
        let mut sorted: Vec<f64> = cells.iter().map(|&i| w.values()[i]).collect();
        sorted.sort_by(f64::total_cmp);
        for q in [0.25, 0.5, 0.75] {
            let thr = sorted[((count - 1) as f64 * q) as usize];
            let subset: Vec<usize> = cells.iter().copied().filter(|&i| w.values()[i] <= thr).collect();
            push(&subset);
        }
        for _ in 0..subsets_per_cube {
            let keep = rng.gen_range(0.05..0.95);
            let subset: Vec<usize> = cells.iter().copied().filter(|_| rng.gen::<f64>() < keep).collect();
            push(&subset);
        }
    }
    // C(eps) = max over pairs of ratio_w / ratio_m^eps; accept moderate C
    const C_CAP: f64 = 50.0;
    let c_of = |eps: f64| -> f64 {
        pairs
            .iter()
            .map(|&(m, wm)| wm / m.powf(eps))
            .fold(1.0f64, f64::max)
    };
    let mut eps = 1.0f64;
    while eps > 0.05 + 1e-12 {
        let c = c_of(eps);
        if c <= C_CAP {
            return Ok((c, eps));
        }
        eps -= 0.05;
    }
    Ok((c_of(0.05), 0.05))
}

/// `(Mf)^delta` for `delta in [0, 1)`: an `A_1` weight whenever `f` is not
/// almost everywhere zero.
pub fn coifman_rochberg_weight(f: &SampledField, delta: f64) -> Result<SampledField> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::Domain(format!("exponent must lie in [0,1), got {delta}")));
    }
    if f.values().iter().all(|&v| v == 0.0) {
        return Err(Error::Domain("source field vanishes identically".into()));
    }
    if f.values().iter().any(|&v| v < 0.0) {
        return Err(Error::Domain("source field must be nonnegative".into()));
    }
    let m = maximal_hl_uncentered_field(f)?;
    SampledField::new(
        f.dim(),
        f.half_width(),
        f.cells(),
        FieldKind::Weight,
        m.iter().map(|&v| v.powf(delta)).collect(),
    )
}

pub use crate::field::power_weight as power_weight_field;
