//! Stopping-time machinery: level-set decompositions of dyadic Orlicz
//! maximal functions, the layered sets `Omega_k`, principal cubes, and
//! instrumented checkers for the three summation claims used to control
//!
//! ```text
//! sum_{(k,j)} u(Q_j^k) v^r(Q_j^k)/|Q_j^k|  by  C int Phi(f/t) u v^r dx.
//! ```
//!
//! Everything here is one-dimensional and works on a single dyadic grid at
//! a time. Cube families are restricted to cubes that fit inside the field
//! box; decomposition recursion stops at cell level, so "null measure"
//! exceptions are vacuous in the cell model.

use crate::error::{Error, Result};
use crate::field::{CellRange, SampledField};
use crate::grid::{Cube, DyadicGrid};
use crate::maximal::{box_levels, cubes_in_box, luxemburg_average};
use crate::young::YoungFunction;
use serde::Serialize;
use std::cell::RefCell;
use std::collections::HashMap;

/// Memoized Luxemburg averages of one field, keyed by snapped range.
/// Layered decompositions revisit the same cubes at every threshold.
pub struct LuxCache<'a> {
    g: &'a SampledField,
    phi: &'a YoungFunction,
    map: RefCell<HashMap<(usize, usize), f64>>,
}

impl<'a> LuxCache<'a> {
    pub fn new(g: &'a SampledField, phi: &'a YoungFunction) -> Self {
        Self {
            g,
            phi,
            map: RefCell::new(HashMap::new()),
        }
    }

    pub fn get(&self, r: &CellRange) -> Result<f64> {
        let key = (r.lo[0], r.hi[0]);
        if let Some(&v) = self.map.borrow().get(&key) {
            return Ok(v);
        }
        let v = luxemburg_average(self.g, r, self.phi)?.value;
        self.map.borrow_mut().insert(key, v);
        Ok(v)
    }
}

/// One emitted cube with the per-cube averages used downstream.
#[derive(Debug, Clone, Serialize)]
pub struct LayerCube {
    pub cube: Cube,
    #[serde(skip)]
    pub range: CellRange,
    /// `||g||_{Phi,Q}`.
    pub lux_g: f64,
    pub avg_v: f64,
    pub avg_u: f64,
    pub avg_vr: f64,
    pub u_mass: f64,
    pub vr_mass: f64,
    /// Membership in `Gamma`: the cube meets `{v <= a^{k+1}}`.
    pub in_gamma: bool,
}

/// Maximal cubes of one level set (or one `Omega_k` layer).
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionForest {
    /// Threshold (`lambda`, or `a^k` for layers).
    pub lambda: f64,
    /// Layer index for `Omega_k` forests.
    pub k: Option<i32>,
    pub cubes: Vec<LayerCube>,
}

/// Root cubes of the admissible family: cubes inside the box whose parent
/// sticks out. They are pairwise disjoint and every admissible cube lies
/// under exactly one root.
fn family_roots(f: &SampledField, grid: &DyadicGrid) -> Vec<(Cube, CellRange)> {
    let l = f.half_width();
    let fits = |q: &Cube| q.low(0) >= -l - 1e-12 * q.side() && q.high(0) <= l + 1e-12 * q.side();
    let mut out = Vec::new();
    for k in box_levels(f) {
        for (q, r) in cubes_in_box(f, grid, k) {
            let parent_fits = q.parent().map(|p| fits(&p)).unwrap_or(false);
            if !parent_fits {
                out.push((q, r));
            }
        }
    }
    out
}

fn payload(
    cube: Cube,
    range: CellRange,
    lux_g: f64,
    v: Option<&SampledField>,
    u: Option<&SampledField>,
    vr: Option<&SampledField>,
) -> LayerCube {
    let vol = |f: &SampledField, r: &CellRange| f.integrate(r);
    LayerCube {
        cube,
        range,
        lux_g,
        avg_v: v.map_or(0.0, |v| v.mean(&range)),
        avg_u: u.map_or(0.0, |u| u.mean(&range)),
        avg_vr: vr.map_or(0.0, |w| w.mean(&range)),
        u_mass: u.map_or(0.0, |u| vol(u, &range)),
        vr_mass: vr.map_or(0.0, |w| vol(w, &range)),
        in_gamma: false,
    }
}

/// Maximal dyadic cubes of `{ M_{Phi,D} g > lambda }`: top-down recursion
/// emitting a cube as soon as its Luxemburg average exceeds `lambda`.
pub fn level_set_decomposition(
    g: &SampledField,
    phi: &YoungFunction,
    grid: &DyadicGrid,
    lambda: f64,
) -> Result<DecompositionForest> {
    level_set_with_cache(&LuxCache::new(g, phi), grid, lambda)
}

/// [`level_set_decomposition`] against a shared Luxemburg cache, so layered
/// sweeps revisit each cube's norm only once.
pub fn level_set_with_cache(
    cache: &LuxCache<'_>,
    grid: &DyadicGrid,
    lambda: f64,
) -> Result<DecompositionForest> {
    let g = cache.g;
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("threshold must be positive, got {lambda}")));
    }
    let mut cubes = Vec::new();
    let k_min = *box_levels(g).start();
    let mut stack: Vec<(Cube, CellRange)> = family_roots(g, grid);
    while let Some((q, r)) = stack.pop() {
        if cache.get(&r)? > lambda {
            cubes.push(payload(q, r, cache.get(&r)?, None, None, None));
        } else if q.k > k_min {
            for c in q.children()? {
                if let Some(cr) = g.snap_cube(&c) {
                    stack.push((c, cr));
                }
            }
        }
    }
    cubes.sort_by_key(|c| c.range.lo[0]);
    Ok(DecompositionForest {
        lambda,
        k: None,
        cubes,
    })
}

/// Maximal dyadic cubes of
/// `Omega_k = {M_D v > a^k} cap {M_{Phi,D} g > a^k}`. The recursion carries
/// one flag per condition; a cube is emitted at the first node where both
/// flags hold, which is exactly the maximal cube of the intersection.
#[allow(clippy::too_many_arguments)]
pub fn omega_layer(
    g: &SampledField,
    v: &SampledField,
    u: &SampledField,
    r: f64,
    phi: &YoungFunction,
    grid: &DyadicGrid,
    a: f64,
    k: i32,
) -> Result<DecompositionForest> {
    let vr = v.map(crate::field::FieldKind::Weight, |x| x.powf(r))?;
    omega_layer_with_cache(&LuxCache::new(g, phi), v, u, &vr, grid, a, k)
}

/// [`omega_layer`] against a shared Luxemburg cache and a prebuilt `v^r`.
pub fn omega_layer_with_cache(
    cache: &LuxCache<'_>,
    v: &SampledField,
    u: &SampledField,
    vr: &SampledField,
    grid: &DyadicGrid,
    a: f64,
    k: i32,
) -> Result<DecompositionForest> {
    let g = cache.g;
    if !(a > 2.0f64.powi(g.dim() as i32)) {
        return Err(Error::Domain(format!("layer base must exceed 2^n, got {a}")));
    }
    let lam = a.powi(k);
    let mut cubes = Vec::new();
    let k_min = *box_levels(g).start();
    let mut stack: Vec<(Cube, CellRange, bool, bool)> = family_roots(g, grid)
        .into_iter()
        .map(|(q, r)| (q, r, false, false))
        .collect();
    while let Some((q, range, v_hit, g_hit)) = stack.pop() {
        let v_hit = v_hit || v.mean(&range) > lam;
        let g_hit = g_hit || cache.get(&range)? > lam;
        if v_hit && g_hit {
            let mut c = payload(q, range, cache.get(&range)?, Some(v), Some(u), Some(vr));
            c.in_gamma = v.min_over(&range) <= a.powi(k + 1);
            cubes.push(c);
        } else if q.k > k_min {
            for child in q.children()? {
                if let Some(cr) = g.snap_cube(&child) {
                    stack.push((child, cr, v_hit, g_hit));
                }
            }
        }
    }
    cubes.sort_by_key(|c| c.range.lo[0]);
    Ok(DecompositionForest {
        lambda: lam,
        k: Some(k),
        cubes,
    })
}

/// Recompute the `Gamma` flags of a forest against a weight: a cube is
/// flagged when it contains at least one cell with `v <= a^{k+1}`.
pub fn gamma_filter(forest: &mut DecompositionForest, v: &SampledField, a: f64, k: i32) {
    for c in &mut forest.cubes {
        c.in_gamma = v.min_over(&c.range) <= a.powi(k + 1);
    }
}

/// One `Gamma_N` entry inside a principal forest.
#[derive(Debug, Clone, Serialize)]
pub struct PrincipalEntry {
    pub k: i32,
    pub cube: LayerCube,
    /// Modified average `mu(Q) = a^{-beta k} avg_Q u`.
    pub mu: f64,
    /// Generation index in the principal set, if principal.
    pub generation: Option<u32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PrincipalForest {
    pub a: f64,
    pub beta: f64,
    /// Truncation level: layers `k >= n_trunc` participate.
    pub n_trunc: i32,
    pub entries: Vec<PrincipalEntry>,
    /// Indices into `entries`, per generation.
    pub generations: Vec<Vec<usize>>,
    /// Union of the generations.
    pub principal: Vec<usize>,
}

/// Builds the principal cubes of the layers `Omega_k`, `k >= n_trunc`,
/// restricted to `Gamma` members. Generation 0 holds the maximal cubes;
/// a pair enters generation `n+1` when some generation-`n` ancestor
/// satisfies the strict modified-average growth condition and every
/// intermediate cube satisfies the complementary `<=` bound.
pub fn principal_cubes(
    layers: &[DecompositionForest],
    a: f64,
    beta: f64,
    eta: f64,
) -> Result<PrincipalForest> {
    if !(beta > 0.0 && beta < eta) {
        return Err(Error::Domain(format!(
            "exponent beta must lie in (0, eta) = (0, {eta}), got {beta}"
        )));
    }
    let mut entries: Vec<PrincipalEntry> = Vec::new();
    let mut n_trunc = i32::MAX;
    for forest in layers {
        let k = forest
            .k
            .ok_or_else(|| Error::Structural("principal cubes need Omega_k layers".into()))?;
        n_trunc = n_trunc.min(k);
        for c in &forest.cubes {
            if c.in_gamma {
                entries.push(PrincipalEntry {
                    k,
                    mu: a.powf(-beta * k as f64) * c.avg_u,
                    cube: c.clone(),
                    generation: None,
                });
            }
        }
    }
    if entries.is_empty() {
        return Ok(PrincipalForest {
            a,
            beta,
            n_trunc: if n_trunc == i32::MAX { 0 } else { n_trunc },
            entries,
            generations: Vec::new(),
            principal: Vec::new(),
        });
    }
    fn contains(e: &[PrincipalEntry], outer: usize, inner: usize) -> bool {
        e[outer].cube.cube.contains(&e[inner].cube.cube)
    }
    fn strictly_contains(e: &[PrincipalEntry], outer: usize, inner: usize) -> bool {
        contains(e, outer, inner) && e[outer].cube.cube != e[inner].cube.cube
    }
    let n = entries.len();
    // generation 0: maximal cubes of the family
    let g0: Vec<usize> = (0..n)
        .filter(|&i| (0..n).all(|j| j == i || !strictly_contains(&entries, j, i)))
        .collect();
    for &i in &g0 {
        entries[i].generation = Some(0);
    }
    let mut generations = vec![g0];
    loop {
        let prev = generations.last().unwrap().clone();
        let mut next = Vec::new();
        for i in 0..n {
            if entries[i].generation.is_some() {
                continue;
            }
            let ku = entries[i].k as f64;
            let qualified = prev.iter().any(|&p| {
                if !strictly_contains(&entries, p, i) {
                    return false;
                }
                let tp = entries[p].k as f64;
                // strict growth of the modified average against the ancestor
                if !(entries[i].cube.avg_u > a.powf((ku - tp) * beta) * entries[p].cube.avg_u) {
                    return false;
                }
                // every intermediate obeys the complementary bound
                (0..n).all(|m| {
                    if m == i || m == p || !strictly_contains(&entries, m, i) || !contains(&entries, p, m) {
                        return true;
                    }
                    let lm = entries[m].k as f64;
                    entries[m].cube.avg_u <= a.powf((lm - tp) * beta) * entries[p].cube.avg_u
                })
            });
            if qualified {
                next.push(i);
            }
        }
        if next.is_empty() {
            break;
        }
        let gen = generations.len() as u32;
        for &i in &next {
            entries[i].generation = Some(gen);
        }
        generations.push(next);
    }
    let principal: Vec<usize> = (0..n).filter(|&i| entries[i].generation.is_some()).collect();
    Ok(PrincipalForest {
        a,
        beta,
        n_trunc,
        entries,
        generations,
        principal,
    })
}

/// Post-hoc soundness pass over a principal forest: every non-root
/// principal member must have its strict-growth witness, with all
/// intermediates verifying the complementary bound, re-read from raw data.
pub fn verify_principal_forest(pf: &PrincipalForest) -> Result<()> {
    let e = &pf.entries;
    for (gen_idx, gen) in pf.generations.iter().enumerate().skip(1) {
        let prev = &pf.generations[gen_idx - 1];
        for &i in gen {
            let ok = prev.iter().any(|&p| {
                if !e[p].cube.cube.contains(&e[i].cube.cube) || e[p].cube.cube == e[i].cube.cube {
                    return false;
                }
                let growth = e[i].cube.avg_u
                    > pf.a.powf((e[i].k - e[p].k) as f64 * pf.beta) * e[p].cube.avg_u;
                let intermediates = (0..e.len()).all(|m| {
                    if m == i || m == p {
                        return true;
                    }
                    let between = e[m].cube.cube.contains(&e[i].cube.cube)
                        && e[m].cube.cube != e[i].cube.cube
                        && e[p].cube.cube.contains(&e[m].cube.cube);
                    if !between {
                        return true;
                    }
                    e[m].cube.avg_u <= pf.a.powf((e[m].k - e[p].k) as f64 * pf.beta) * e[p].cube.avg_u
                });
                growth && intermediates
            });
            if !ok {
                return Err(Error::Structural(format!(
                    "principal entry {i} in generation {gen_idx} lost its witness"
                )));
            }
        }
    }
    Ok(())
}

/// Per-cube diagnostics of the second claim.
#[derive(Debug, Clone, Serialize)]
pub struct Claim2Cube {
    pub cube: Cube,
    /// 1 when the small-values part carried the norm, 2 otherwise.
    pub branch: u8,
    pub i_norm: f64,
    pub ii_norm: f64,
    /// `a^{kr}` against the cube average of `Phi(f/t) v^r`.
    pub lhs: f64,
    pub avg_phi_vr: f64,
    pub constant: f64,
    /// Max over inner cubes of the Hölder-estimated remainder bound
    /// `(delta0 s' gamma' (|Q|/v^r(Q)) (avg_Q v/a^k)^{1/s'}
    /// (avg_Q v^{rs})^{1/s})^{1/gamma'}`. On cubes meeting
    /// `{v <= a^{k+1}}` this is at most `(gamma' gamma')^{1/gamma'}`
    /// by the choice of `eps0`, hence at most `e^{2/e}`.
    pub wk_term: f64,
    /// Max over inner cubes of the directly measured average
    /// `((1/v^r(Q)) int_{Q cap B} log(v/a^k)^{delta gamma'} v^r)^{1/gamma'}`.
    /// Reported for diagnosis only: as `gamma'` grows it approaches the sup
    /// of `log(v/a^k)^delta` on the cube, which grows without bound under
    /// refinement near a singularity of `v`, so no resolution-uniform cap
    /// exists for it.
    pub wk_raw: f64,
    /// `avg v^r / ((1 + a^r [v]^r [v^r]) a^{kr})`, at most 1. Only set when
    /// the cube meets `{v <= a^{k+1}}`, the case the display covers.
    pub large_avg_ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub enum ClaimDetails {
    Claim1 {
        gamma_n_terms: usize,
        principal_terms: usize,
    },
    Claim2 {
        k: i32,
        t0: f64,
        epsilon0: f64,
        delta0: f64,
        gamma: f64,
        s: f64,
        cubes: Vec<Claim2Cube>,
    },
    Claim3 {
        cell: usize,
        k_sequence: Vec<i32>,
        per_m_sums: Vec<f64>,
        h_over_u: f64,
    },
}

/// Common claim-check report: both sides of the claimed inequality and the
/// empirical constant, plus claim-specific witnesses.
#[derive(Debug, Clone, Serialize)]
pub struct ClaimReport {
    pub claim: u8,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub details: ClaimDetails,
}

/// First claim: the `Gamma_N` sum of `u(Q) v^r(Q)/|Q|` is controlled by the
/// same sum over principal cubes.
pub fn claim1_check(pf: &PrincipalForest) -> Result<ClaimReport> {
    let term = |e: &PrincipalEntry| e.cube.avg_vr * e.cube.u_mass;
    let lhs: f64 = pf.entries.iter().map(term).sum();
    let rhs: f64 = pf.principal.iter().map(|&i| term(&pf.entries[i])).sum();
    if pf.principal.is_empty() && !pf.entries.is_empty() {
        return Err(Error::Structural(
            "nonempty index family with empty principal set".into(),
        ));
    }
    Ok(ClaimReport {
        claim: 1,
        lhs,
        rhs,
        constant: if rhs > 0.0 { lhs / rhs } else { 0.0 },
        details: ClaimDetails::Claim1 {
            gamma_n_terms: pf.entries.len(),
            principal_terms: pf.principal.len(),
        },
    })
}

/// Scanned constants consumed by the second claim.
#[derive(Debug, Clone, Serialize)]
pub struct ClaimConstants {
    pub r: f64,
    pub v_a1: f64,
    pub vr_a1: f64,
    /// Reverse Hölder exponent of `v^r` and its constant.
    pub s: f64,
    pub vr_rhs: f64,
    /// Growth-bound witnesses of `Phi`.
    pub t0: f64,
    pub delta: f64,
}

/// Second claim: on each maximal cube of `{M_{Phi,D} g > a^k}` (with
/// `g = f v / t`), the level `a^{kr}` is dominated by the cube average of
/// `Phi(f/t) v^r`. Also evaluates the in-proof split, the Hölder remainder
/// bound and the large-cube average display.
#[allow(clippy::too_many_arguments)]
pub fn claim2_check(
    tilde_forest: &DecompositionForest,
    omega: &DecompositionForest,
    f: &SampledField,
    v: &SampledField,
    phi: &YoungFunction,
    consts: &ClaimConstants,
    t: f64,
    a: f64,
    k: i32,
) -> Result<ClaimReport> {
    let r = consts.r;
    let ak = a.powi(k);
    let akr = ak.powf(r);
    let vr = v.map(crate::field::FieldKind::Weight, |x| x.powf(r))?;
    let vrs = v.map(crate::field::FieldKind::Weight, |x| x.powf(r * consts.s))?;
    let phi_f_t_vr = f.zip_map(v, crate::field::FieldKind::Function, |fv, vv| {
        phi.eval_raw((fv / t).abs()) * vv.powf(r)
    })?;
    let g = f.zip_map(v, crate::field::FieldKind::Function, |fv, vv| fv * vv / t)?;
    let delta0 = consts.delta.max(1.0);
    let sp = consts.s / (consts.s - 1.0);
    let eps0 = (1.0 / (sp * consts.v_a1.powf(1.0 / sp) * a.powf(1.0 / sp) * consts.vr_rhs * delta0 - 1.0)).min(1.0);
    if !(eps0 > 0.0) {
        return Err(Error::Domain(format!("Hölder exponent collapsed: eps0 = {eps0}")));
    }
    let gamma = 1.0 + eps0;
    let gamma_p = 1.0 + 1.0 / eps0;
    let large_cap = (1.0 + a.powf(r) * consts.v_a1.powf(r) * consts.vr_a1) * akr;

    let mut cubes = Vec::new();
    let mut worst = 0.0f64;
    for lc in &tilde_forest.cubes {
        let range = lc.range;
        if vr.integrate(&range) <= 0.0 {
            return Err(Error::NotAWeight("cube with zero v^r-mass".into()));
        }
        // split at v <= t0 a^k and the two partial Luxemburg norms of g/a^k
        let cells: Vec<usize> = g.iter_range(&range).collect();
        let masked = |small: bool| -> SampledField {
            let mut vals = vec![0.0; g.cells()];
            for &i in &cells {
                let is_small = v.values()[i] <= consts.t0 * ak;
                if is_small == small {
                    vals[i] = g.values()[i] / ak;
                }
            }
            SampledField::new(1, g.half_width(), g.cells(), crate::field::FieldKind::Function, vals).unwrap()
        };
        let i_norm = luxemburg_average(&masked(true), &range, phi)?.value;
        let ii_norm = luxemburg_average(&masked(false), &range, phi)?.value;
        let branch = if i_norm > 0.5 { 1 } else { 2 };
        if i_norm <= 0.5 && ii_norm <= 0.5 {
            return Err(Error::Property(format!(
                "split norms {i_norm} + {ii_norm} cannot cover the unit lower bound"
            )));
        }

        let avg_phi_vr = phi_f_t_vr.mean(&range);
        let constant = if avg_phi_vr > 0.0 { akr / avg_phi_vr } else { f64::INFINITY };
        worst = worst.max(constant);

        // Hölder remainder over the Omega_k cubes inside this cube. Only
        // cubes meeting {v <= a^{k+1}} qualify: the average bound
        // avg_Q v <= [v] a^{k+1} needs a point with small v, and those are
        // the only cubes the final summation visits.
        let mut wk_term = 0.0f64;
        let mut wk_raw = 0.0f64;
        for oc in &omega.cubes {
            if !oc.in_gamma || !lc.cube.contains(&oc.cube) {
                continue;
            }
            let denom = vr.integrate(&oc.range);
            if denom <= 0.0 {
                continue;
            }
            let mut acc = 0.0;
            for i in vr.iter_range(&oc.range) {
                let vv = v.values()[i];
                if vv > consts.t0 * ak {
                    acc += (vv / ak).ln().max(0.0).powf(consts.delta * gamma_p) * vr.values()[i];
                }
            }
            let num = acc * vr.cell_volume();
            wk_raw = wk_raw.max((num / denom).powf(1.0 / gamma_p));
            // the chained estimate: pointwise log bound, then Hölder with
            // exponents s and s' against the plain Lebesgue average
            let x_q = delta0
                * sp
                * gamma_p
                * (v.mean(&oc.range) / ak).powf(1.0 / sp)
                * vrs.mean(&oc.range).powf(1.0 / consts.s)
                / vr.mean(&oc.range);
            wk_term = wk_term.max(x_q.powf(1.0 / gamma_p));
        }

        cubes.push(Claim2Cube {
            cube: lc.cube,
            branch,
            i_norm,
            ii_norm,
            lhs: akr,
            avg_phi_vr,
            constant,
            wk_term,
            wk_raw,
            large_avg_ratio: (v.min_over(&range) <= a.powi(k + 1))
                .then(|| vr.mean(&range) / large_cap),
        });
    }
    let lhs = akr * tilde_forest.cubes.len() as f64;
    let rhs: f64 = cubes.iter().map(|c| c.avg_phi_vr).sum();
    Ok(ClaimReport {
        claim: 2,
        lhs,
        rhs,
        constant: worst,
        details: ClaimDetails::Claim2 {
            k,
            t0: consts.t0,
            epsilon0: eps0,
            delta0,
            gamma,
            s: consts.s,
            cubes,
        },
    })
}

/// Third claim: at one point `x`, the per-block sums
/// `sum_{l in F_m} sum_{j in P_l} u(Q_j^l)/u(tilde Q^l)` stay bounded, and
/// consequently `h(x) <= C u(x)`.
pub fn claim3_check(
    pf: &PrincipalForest,
    tilde_layers: &[(i32, DecompositionForest)],
    u: &SampledField,
    cell: usize,
) -> Result<ClaimReport> {
    let ux = u.values()[cell];
    // tilde cube containing the cell, per k
    let tilde_at = |k: i32| -> Option<&LayerCube> {
        tilde_layers
            .iter()
            .find(|&&(tk, _)| tk == k)
            .and_then(|(_, f)| f.cubes.iter().find(|c| c.range.lo[0] <= cell && cell < c.range.hi[0]))
    };
    // P_k: principal cubes of layer k inside the tilde cube
    let p_k = |k: i32, tq: &LayerCube| -> Vec<usize> {
        pf.principal
            .iter()
            .copied()
            .filter(|&i| pf.entries[i].k == k && tq.cube.contains(&pf.entries[i].cube.cube))
            .collect()
    };
    let mut g_levels: Vec<(i32, Vec<usize>)> = Vec::new();
    let ks: Vec<i32> = {
        let mut v: Vec<i32> = tilde_layers.iter().map(|&(k, _)| k).collect();
        v.sort_unstable();
        v
    };
    for k in ks {
        if let Some(tq) = tilde_at(k) {
            let p = p_k(k, tq);
            if !p.is_empty() {
                g_levels.push((k, p));
            }
        }
    }
    if g_levels.is_empty() {
        return Ok(ClaimReport {
            claim: 3,
            lhs: 0.0,
            rhs: ux,
            constant: 0.0,
            details: ClaimDetails::Claim3 {
                cell,
                k_sequence: Vec::new(),
                per_m_sums: Vec::new(),
                h_over_u: 0.0,
            },
        });
    }
    // the doubling sequence k_m on the tilde-cube u-averages
    // level-set forests carry no weight payload; read u from the range
    let avg_u_tilde = |k: i32| tilde_at(k).map(|t| u.mean(&t.range)).unwrap();
    let mut k_sequence = vec![g_levels[0].0];
    loop {
        let last = *k_sequence.last().unwrap();
        let next = g_levels
            .iter()
            .map(|&(k, _)| k)
            .find(|&k| k > last && avg_u_tilde(k) > 2.0 * avg_u_tilde(last));
        match next {
            Some(k) => k_sequence.push(k),
            None => break,
        }
    }
    // block partition F_m and the double sums
    let mut per_m_sums = Vec::new();
    let mut h = 0.0f64;
    for (m, &km) in k_sequence.iter().enumerate() {
        let upper = k_sequence.get(m + 1).copied().unwrap_or(i32::MAX);
        let mut sum = 0.0;
        for &(k, ref p) in &g_levels {
            if k < km || k >= upper {
                continue;
            }
            let tq = tilde_at(k).unwrap();
            let u_tilde = u.integrate(&tq.range);
            let inner: f64 = p.iter().map(|&i| pf.entries[i].cube.u_mass).sum();
            sum += inner / u_tilde;
            // h(x) contribution: u(Q_j^k)/|tilde Q^k|
            let vol = (tq.range.hi[0] - tq.range.lo[0]) as f64 * u.cell_width();
            h += inner / vol;
        }
        per_m_sums.push(sum);
    }
    let worst = per_m_sums.iter().copied().fold(0.0f64, f64::max);
    Ok(ClaimReport {
        claim: 3,
        lhs: h,
        rhs: ux,
        constant: worst,
        details: ClaimDetails::Claim3 {
            cell,
            k_sequence,
            per_m_sums,
            h_over_u: h / ux,
        },
    })
}

/// Full stopping-time battery on one instance: layers, principal cubes and
/// the three summation claims, with every constant scanned from the data.
#[derive(Debug, Clone, Serialize)]
pub struct ClaimsBattery {
    /// Surplus exponent of `u` from the A-infinity fit.
    pub eta: f64,
    /// Principal exponent actually used (must lie in `(0, eta)`).
    pub beta: f64,
    pub constants: ClaimConstants,
    /// Layer range actually populated, `n_trunc ..= top`.
    pub k_range: (i32, i32),
    pub claim1: ClaimReport,
    /// One report per populated layer.
    pub claim2: Vec<ClaimReport>,
    /// One report per sample cell.
    pub claim3: Vec<ClaimReport>,
}

/// Reverse Hölder exponent fit for `v^r`: the largest ladder exponent whose
/// constant stays stable between the field and its downsampling. The
/// `s`-power mean is not preserved by downsampling, so instability is a
/// usable out-of-class signal here.
fn fit_rh_exponent(vr: &SampledField, seed: u64) -> Result<(f64, f64)> {
    let coarse = vr.coarsen()?;
    let fam_fine = crate::weights::cube_family(vr, 100, seed)?;
    let fam_coarse = crate::weights::cube_family(&coarse, 100, seed)?;
    for &s in &[2.0, 1.75, 1.5, 1.25, 1.1] {
        let fine = crate::weights::rh_constant(vr, s, &fam_fine)?.constant;
        let c = crate::weights::rh_constant(&coarse, s, &fam_coarse)?.constant;
        if fine.is_finite() && fine <= 1.1 * c {
            return Ok((s, fine));
        }
    }
    Err(Error::Hypothesis(
        "no reverse Hölder exponent of v^r was stable under refinement".into(),
    ))
}

/// Runs the whole battery. `t` is the fixed threshold defining
/// `g = f v / t`; layers run upward from `n_trunc` until empty.
#[allow(clippy::too_many_arguments)]
pub fn claims_battery(
    u: &SampledField,
    v: &SampledField,
    f: &SampledField,
    r: f64,
    phi: &YoungFunction,
    t: f64,
    a: f64,
    beta: Option<f64>,
    n_trunc: i32,
    grid: &DyadicGrid,
    sample_cells: &[usize],
    seed: u64,
) -> Result<ClaimsBattery> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("threshold t must be positive, got {t}")));
    }
    let vr = v.map(crate::field::FieldKind::Weight, |x| x.powf(r))?;
    let fam = crate::weights::cube_family(v, 200, seed)?;
    let v_a1 = crate::weights::ap_constant(v, 1.0, &fam)?.constant;
    let vr_a1 = crate::weights::ap_constant(&vr, 1.0, &fam)?.constant;
    let (_, eta) = crate::weights::ainfty_fit(u, &fam, 8, seed)?;
    let beta = beta.unwrap_or(eta / 2.0);
    let (s, vr_rhs) = fit_rh_exponent(&vr, seed)?;
    let fr = crate::young::check_fr(phi, r)?;
    if !fr.member {
        return Err(Error::Hypothesis(format!(
            "profile rejected by the growth-class scan for r = {r}: {:?}",
            fr.failures
        )));
    }
    let consts = ClaimConstants {
        r,
        v_a1,
        vr_a1,
        s,
        vr_rhs,
        t0: fr.t0,
        delta: fr.delta_fit,
    };

    let g = f.zip_map(v, crate::field::FieldKind::Function, |a, b| a * b / t)?;
    let cache = LuxCache::new(&g, phi);
    let mut layers = Vec::new();
    let mut k_top = n_trunc - 1;
    for k in n_trunc..=n_trunc + 80 {
        let layer = omega_layer_with_cache(&cache, v, u, &vr, grid, a, k)?;
        if layer.cubes.is_empty() {
            break; // layers are nested: the first empty one ends the scan
        }
        k_top = k;
        layers.push(layer);
    }
    if layers.is_empty() {
        return Err(Error::Structural(format!(
            "no populated layer at or above k = {n_trunc}; nothing to check"
        )));
    }
    let pf = principal_cubes(&layers, a, beta, eta)?;
    verify_principal_forest(&pf)?;
    let claim1 = claim1_check(&pf)?;

    let mut claim2 = Vec::new();
    let mut tilde_layers = Vec::new();
    for layer in &layers {
        let k = layer.k.unwrap();
        let tilde = level_set_with_cache(&cache, grid, a.powi(k))?;
        if !tilde.cubes.is_empty() {
            claim2.push(claim2_check(&tilde, layer, f, v, phi, &consts, t, a, k)?);
        }
        tilde_layers.push((k, tilde));
    }

    let mut claim3 = Vec::new();
    for &cell in sample_cells {
        if cell >= g.cells() {
            return Err(Error::Domain(format!("sample cell {cell} out of range")));
        }
        claim3.push(claim3_check(&pf, &tilde_layers, u, cell)?);
    }

    Ok(ClaimsBattery {
        eta,
        beta,
        constants: consts,
        k_range: (n_trunc, k_top),
        claim1,
        claim2,
        claim3,
    })
}
