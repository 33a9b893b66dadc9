//! Luxemburg averages and the maximal operators on sampled fields.
//!
//! The Luxemburg average of `f` over a region `Q` with respect to a Young
//! function `Phi` and a measure `w dx` is
//!
//! ```text
//! ||f||_{Phi,Q,w} = inf { lambda > 0 : (1/w(Q)) int_Q Phi(|f|/lambda) w <= 1 }
//! ```
//!
//! computed by bisection against the monotone predicate. Field-wide maximal
//! transforms are restricted to one dimension; suprema never look at cubes
//! that stick out of the field box, so values near the boundary are
//! truncated one-sidedly (experiments keep supports well inside the box).

use crate::error::{Error, Result};
use crate::field::{CellRange, SampledField};
use crate::grid::{build_grids, Cube, DyadicGrid};
use crate::young::{generalized_inverse_of, ConjugateTable, YoungFunction};
use rayon::prelude::*;

/// Outcome of one Luxemburg bisection.
#[derive(Debug, Clone, Copy)]
pub struct LuxemburgResult {
    pub value: f64,
    pub iterations: u32,
    /// `|avg Phi(|f|/value) - 1|`; zero when `f` vanishes on the region.
    pub residual: f64,
}

/// Relative bisection tolerance for Luxemburg averages.
pub const LUX_REL_TOL: f64 = 1e-10;
/// Bracket endpoints: `lambda` ranges over
/// `[fmax / Phi^{-1}(HUGE), fmax / Phi^{-1}(TINY)]`.
const HUGE: f64 = 1e18;
const TINY: f64 = 1e-18;

/// Core bisection over explicit `(|f| value, w mass)` pairs.
/// `phi_eval` must be nondecreasing with `phi_eval(0) = 0`.
fn lux_core(samples: &[(f64, f64)], phi_eval: &dyn Fn(f64) -> f64, inv_huge: f64, inv_tiny: f64) -> LuxemburgResult {
    let wtot: f64 = samples.iter().map(|&(_, w)| w).sum();
    let fmax = samples.iter().map(|&(f, _)| f).fold(0.0f64, f64::max);
    if fmax == 0.0 {
        return LuxemburgResult {
            value: 0.0,
            iterations: 0,
            residual: 0.0,
        };
    }
    let avg = |lambda: f64| -> f64 {
        samples.iter().map(|&(f, w)| phi_eval(f / lambda) * w).sum::<f64>() / wtot
    };
    let mut lo = fmax / inv_huge;
    let mut hi = fmax / inv_tiny;
    if avg(lo) <= 1.0 {
        return LuxemburgResult {
            value: lo,
            iterations: 0,
            residual: (avg(lo) - 1.0).abs(),
        };
    }
    let mut iterations = 0;
    while hi - lo > LUX_REL_TOL * hi && iterations < 200 {
        let mid = 0.5 * (lo + hi);
        if avg(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    LuxemburgResult {
        value: hi,
        iterations,
        residual: (avg(hi) - 1.0).abs(),
    }
}

fn collect_samples(f: &SampledField, r: &CellRange, w: Option<&SampledField>) -> Result<Vec<(f64, f64)>> {
    if r.is_empty() {
        return Err(Error::Domain("empty evaluation region".into()));
    }
    if let Some(w) = w {
        if w.dim() != f.dim() || w.cells() != f.cells() || w.half_width() != f.half_width() {
            return Err(Error::Domain("weight lives on a different mesh".into()));
        }
        Ok(f.iter_range(r).map(|i| (f.values()[i].abs(), w.values()[i])).collect())
    } else {
        Ok(f.iter_range(r).map(|i| (f.values()[i].abs(), 1.0)).collect())
    }
}

/// `||f||_{Phi,Q}` over a snapped region with Lebesgue measure.
pub fn luxemburg_average(f: &SampledField, r: &CellRange, phi: &YoungFunction) -> Result<LuxemburgResult> {
    weighted_luxemburg_average(f, r, phi, None)
}

/// `||f||_{Phi,Q,w}`; `w = None` means Lebesgue measure.
pub fn weighted_luxemburg_average(
    f: &SampledField,
    r: &CellRange,
    phi: &YoungFunction,
    w: Option<&SampledField>,
) -> Result<LuxemburgResult> {
    let samples = collect_samples(f, r, w)?;
    if phi.is_identity() {
        // inf { lambda : avg |f| / lambda <= 1 } is the weighted mean
        let wtot: f64 = samples.iter().map(|&(_, w)| w).sum();
        let mean = samples.iter().map(|&(f, w)| f * w).sum::<f64>() / wtot;
        return Ok(LuxemburgResult {
            value: mean,
            iterations: 0,
            residual: 0.0,
        });
    }
    let inv_huge = phi.generalized_inverse(HUGE)?;
    let inv_tiny = phi.generalized_inverse(TINY)?;
    Ok(lux_core(&samples, &|t| phi.eval_raw(t), inv_huge, inv_tiny))
}

/// Luxemburg average against the conjugate profile, evaluated through a
/// precomputed table.
pub fn conjugate_luxemburg_average(
    f: &SampledField,
    r: &CellRange,
    table: &ConjugateTable,
    w: Option<&SampledField>,
) -> Result<LuxemburgResult> {
    let samples = collect_samples(f, r, w)?;
    let eval = |t: f64| table.eval(t);
    let inv_huge = generalized_inverse_of(&eval, HUGE);
    let inv_tiny = generalized_inverse_of(&eval, TINY);
    Ok(lux_core(&samples, &eval, inv_huge, inv_tiny))
}

/// `inf_{tau > 0} tau (1 + (1/w(Q)) int_Q Phi(|f|/tau) w)`, the infimum form
/// equivalent to the Luxemburg average. Golden-section over `log tau`.
pub fn infimum_form(
    f: &SampledField,
    r: &CellRange,
    phi: &YoungFunction,
    w: Option<&SampledField>,
) -> Result<f64> {
    let samples = collect_samples(f, r, w)?;
    let lux = weighted_luxemburg_average(f, r, phi, w)?.value;
    if lux == 0.0 {
        return Ok(0.0);
    }
    let wtot: f64 = samples.iter().map(|&(_, w)| w).sum();
    let h = |tau: f64| -> f64 {
        let avg = samples.iter().map(|&(f, w)| phi.eval_raw(f / tau) * w).sum::<f64>() / wtot;
        tau * (1.0 + avg)
    };
    let obj = |s: f64| h(s.exp());
    let (a, b) = ((lux * 1e-8).ln(), (lux * 1e2).ln());
    let (smin, vmin) = crate::quad::golden_min(&obj, a, b, 200);
    let _ = smin;
    Ok(vmin.min(h(a.exp())).min(h(b.exp())))
}

/// `[(1/w(Q)) int |fg| w] / (||f||_{Phi,Q,w} ||g||_{conj Phi,Q,w})`.
/// The generalized Hölder inequality bounds this by 2.
pub fn generalized_holder_ratio(
    f: &SampledField,
    g: &SampledField,
    r: &CellRange,
    phi: &YoungFunction,
    table: &ConjugateTable,
    w: Option<&SampledField>,
) -> Result<f64> {
    let fs = collect_samples(f, r, w)?;
    let gs = collect_samples(g, r, w)?;
    let wtot: f64 = fs.iter().map(|&(_, w)| w).sum();
    let numerator = fs
        .iter()
        .zip(&gs)
        .map(|(&(fv, wm), &(gv, _))| fv * gv * wm)
        .sum::<f64>()
        / wtot;
    let nf = weighted_luxemburg_average(f, r, phi, w)?.value;
    let ng = conjugate_luxemburg_average(g, r, table, w)?.value;
    let denom = nf * ng;
    if denom == 0.0 || !denom.is_finite() {
        if numerator == 0.0 {
            return Ok(0.0);
        }
        if !denom.is_finite() {
            return Ok(0.0);
        }
        return Err(Error::Property(format!(
            "Hölder denominator vanished with numerator {numerator}"
        )));
    }
    Ok(numerator / denom)
}

/// Uncentered Hardy-Littlewood maximal field over mesh-aligned intervals,
/// one dimension. `O(N^2)` over all window lengths: per length, prefix-sum
/// window averages plus a monotone-deque sliding maximum.
pub fn maximal_hl_uncentered_field(f: &SampledField) -> Result<Vec<f64>> {
    if f.dim() != 1 {
        return Err(Error::Domain("uncentered maximal field needs dimension 1".into()));
    }
    let n = f.cells();
    let mut prefix = vec![0.0f64; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + f.values()[i].abs();
    }
    let mut out = vec![0.0f64; n];
    let mut deque: std::collections::VecDeque<usize> = std::collections::VecDeque::new();
    for len in 1..=n {
        // window averages a(i) over [i, i+len), i in 0..=n-len; cell j sees
        // the windows with i in [j+1-len, j] clipped to that range
        deque.clear();
        let avg = |i: usize| (prefix[i + len] - prefix[i]) / len as f64;
        let mut next_push = 0usize;
        for (j, o) in out.iter_mut().enumerate() {
            let i_max = j.min(n - len);
            while next_push <= i_max {
                let a_new = avg(next_push);
                while let Some(&b) = deque.back() {
                    if avg(b) <= a_new {
                        deque.pop_back();
                    } else {
                        break;
                    }
                }
                deque.push_back(next_push);
                next_push += 1;
            }
            let i_min = (j + 1).saturating_sub(len);
            while *deque.front().unwrap() < i_min {
                deque.pop_front();
            }
            let v = avg(*deque.front().unwrap());
            if v > *o {
                *o = v;
            }
        }
    }
    Ok(out)
}

/// Uncentered HL maximal value at one cell by direct window scan (oracle
/// path, `O(N^2)` per point).
pub fn maximal_hl_uncentered_at(f: &SampledField, cell: usize) -> Result<f64> {
    if f.dim() != 1 {
        return Err(Error::Domain("uncentered maximal needs dimension 1".into()));
    }
    let n = f.cells();
    let mut prefix = vec![0.0f64; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + f.values()[i].abs();
    }
    let mut best = 0.0f64;
    for i in 0..=cell {
        for j in cell + 1..=n {
            best = best.max((prefix[j] - prefix[i]) / (j - i) as f64);
        }
    }
    Ok(best)
}

/// Cubes of one grid and level that fit inside the field box, as snapped
/// ranges. Snapped ranges may repeat geometry at coarse levels; duplicates
/// are harmless for sup-type scans.
pub fn cubes_in_box(f: &SampledField, grid: &DyadicGrid, k: i32) -> Vec<(Cube, CellRange)> {
    let l = f.half_width();
    let side = (k as f64).exp2();
    if side > 2.0 * l {
        return Vec::new();
    }
    let mut out = Vec::new();
    // scan corner candidates along each axis by walking cube indices
    let first = grid
        .containing_cube(&vec![-l + 1e-9 * side; grid.n as usize], k)
        .expect("level in range");
    let steps = (2.0 * l / side).round() as i64 + 1;
    match grid.n {
        1 => {
            for dm in 0..=steps {
                let q = Cube {
                    m: [first.m[0] + dm, 0, 0],
                    ..first
                };
                if q.low(0) >= -l - 1e-12 * side && q.high(0) <= l + 1e-12 * side {
                    if let Some(r) = f.snap_cube(&q) {
                        out.push((q, r));
                    }
                }
            }
        }
        _ => {
            for dm0 in 0..=steps {
                for dm1 in 0..=steps {
                    let q = Cube {
                        m: [first.m[0] + dm0, first.m[1] + dm1, 0],
                        ..first
                    };
                    let fits = (0..2).all(|a| q.low(a) >= -l - 1e-12 * side && q.high(a) <= l + 1e-12 * side);
                    if fits {
                        if let Some(r) = f.snap_cube(&q) {
                            out.push((q, r));
                        }
                    }
                }
            }
        }
    }
    out
}

/// The levels a dyadic scan visits: cell side up to the box side.
pub fn box_levels(f: &SampledField) -> std::ops::RangeInclusive<i32> {
    let k_min = f.cell_width().log2().round() as i32;
    let k_max = (2.0 * f.half_width()).log2().round() as i32;
    k_min..=k_max
}

/// Dyadic Orlicz maximal field for one grid: per cell, the sup of Luxemburg
/// averages over the grid cubes that contain the cell and fit in the box.
pub fn maximal_orlicz_dyadic_field(f: &SampledField, phi: &YoungFunction, grid: &DyadicGrid) -> Result<Vec<f64>> {
    if f.dim() != 1 {
        return Err(Error::Domain("dyadic maximal field needs dimension 1".into()));
    }
    let n = f.cells();
    let mut out = vec![0.0f64; n];
    for k in box_levels(f) {
        let cubes = cubes_in_box(f, grid, k);
        let vals: Vec<(CellRange, f64)> = cubes
            .par_iter()
            .map(|(_, r)| Ok((*r, luxemburg_average(f, r, phi)?.value)))
            .collect::<Result<Vec<_>>>()?;
        for (r, v) in vals {
            for cell in out.iter_mut().take(r.hi[0]).skip(r.lo[0]) {
                if v > *cell {
                    *cell = v;
                }
            }
        }
    }
    Ok(out)
}

/// Dyadic Orlicz maximal value at one cell by walking the ancestor chain.
pub fn maximal_orlicz_dyadic_at(f: &SampledField, phi: &YoungFunction, grid: &DyadicGrid, cell: usize) -> Result<f64> {
    let x = [f.cell_center(cell)];
    let l = f.half_width();
    let mut best = 0.0f64;
    for k in box_levels(f) {
        let q = grid.containing_cube(&x, k)?;
        if q.low(0) < -l - 1e-12 * q.side() || q.high(0) > l + 1e-12 * q.side() {
            continue;
        }
        if let Some(r) = f.snap_cube(&q) {
            best = best.max(luxemburg_average(f, &r, phi)?.value);
        }
    }
    Ok(best)
}

/// Field-wide Orlicz maximal data: one dyadic field per shifted grid, their
/// pointwise max, and the `3^n`-inflated control bound `3^n sum_i M_{Phi,D^i}`.
pub struct OrliczMaximalField {
    pub per_grid: Vec<Vec<f64>>,
    pub dyadic_max: Vec<f64>,
    pub inflated: Vec<f64>,
}

pub fn maximal_orlicz_field(f: &SampledField, phi: &YoungFunction) -> Result<OrliczMaximalField> {
    let grids = build_grids(f.dim())?;
    let per_grid: Vec<Vec<f64>> = grids
        .iter()
        .map(|g| maximal_orlicz_dyadic_field(f, phi, g))
        .collect::<Result<Vec<_>>>()?;
    let n = f.cells();
    let factor = 3usize.pow(f.dim() as u32) as f64;
    let mut dyadic_max = vec![0.0f64; n];
    let mut inflated = vec![0.0f64; n];
    for g in &per_grid {
        for i in 0..n {
            dyadic_max[i] = dyadic_max[i].max(g[i]);
            inflated[i] += g[i];
        }
    }
    for v in inflated.iter_mut() {
        *v *= factor;
    }
    Ok(OrliczMaximalField {
        per_grid,
        dyadic_max,
        inflated,
    })
}

/// Uncentered Orlicz maximal value at one cell by brute force over all
/// mesh-aligned windows (oracle path for small fields).
pub fn maximal_orlicz_uncentered_at(f: &SampledField, phi: &YoungFunction, cell: usize) -> Result<f64> {
    if f.dim() != 1 {
        return Err(Error::Domain("uncentered maximal needs dimension 1".into()));
    }
    let n = f.cells();
    let mut best = 0.0f64;
    for i in 0..=cell {
        for j in cell + 1..=n {
            let r = CellRange {
                lo: [i, 0, 0],
                hi: [j, 1, 1],
                n: 1,
            };
            best = best.max(luxemburg_average(f, &r, phi)?.value);
        }
    }
    Ok(best)
}

/// Evaluation route for field-wide maximal transforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaximalMode {
    /// Exact sup over mesh-aligned intervals; identity profile only.
    UncenteredHl,
    /// Max of the `3^n` dyadic fields (lower estimate of the uncentered sup).
    DyadicMax,
    /// `3^n`-inflated sum (upper bound of the uncentered sup).
    Inflated,
}

/// `S_Phi f = M_Phi(f v) / v`, cellwise.
pub fn sawyer_field(f: &SampledField, v: &SampledField, phi: &YoungFunction, mode: MaximalMode) -> Result<Vec<f64>> {
    use crate::field::FieldKind;
    let fv = f.zip_map(v, FieldKind::Function, |a, b| a * b)?;
    let m = match mode {
        MaximalMode::UncenteredHl => {
            if !phi.is_identity() {
                return Err(Error::Domain("uncentered mode requires the identity profile".into()));
            }
            maximal_hl_uncentered_field(&fv)?
        }
        MaximalMode::DyadicMax => maximal_orlicz_field(&fv, phi)?.dyadic_max,
        MaximalMode::Inflated => maximal_orlicz_field(&fv, phi)?.inflated,
    };
    Ok(m.iter().zip(v.values()).map(|(&mv, &vv)| mv / vv).collect())
}
