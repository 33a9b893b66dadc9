//! End-to-end acceptance battery. Each numbered criterion prints one
//! `PASS`/`FAIL` line; the test fails if any criterion fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // negated form also rejects NaN

use mixedweak::config::{ExperimentConfig, FieldSpec, ModeSpec, WeightSpec, YoungSpec};
use mixedweak::czdecomp::{claims_battery, level_set_decomposition, ClaimDetails};
use mixedweak::field::{FieldKind, SampledField};
use mixedweak::grid::{find_cover, DyadicGrid};
use mixedweak::maximal::{luxemburg_average, maximal_orlicz_dyadic_field};
use mixedweak::quad::log_grid;
use mixedweak::verify::{lp_boundedness_check, sawyer_special_case};
use mixedweak::weights::refinement_diverges;
use mixedweak::young::{
    bp_integral, conjugate_of, epsilon_bound_argmax, epsilon_bound_function,
    inverse_product_check, prec_n_check, BpVerdict, YoungFunction,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

/// The reference instance: box `[-4, 4]`, `u = 1`, `v = |x|^{-1/4}`,
/// `r = 2`, log-power profile `(2, 1)`, `f` the indicator of
/// `[-1/8, 1/8]`, 40 thresholds.
fn instance_i1(cells: usize) -> ExperimentConfig {
    ExperimentConfig {
        half_width: 4.0,
        cells,
        dim: 1,
        u: WeightSpec::Constant { value: 1.0 },
        v: WeightSpec::Power { alpha: -0.25 },
        r: 2.0,
        phi: YoungSpec::LogPower { r: 2.0, delta: 1.0 },
        f: FieldSpec::Indicator {
            low: vec![-0.125],
            side: 0.25,
        },
        t_points: 40,
        t_range: None,
        a: 4.0,
        beta: None,
        seed: 0,
        mode: ModeSpec::Auto,
    }
}

fn criterion_1() -> Result<String, String> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| e.to_string())?;
    let started = Instant::now();
    let base = pool
        .install(|| instance_i1(1 << 14).run())
        .map_err(|e| e.to_string())?;
    let elapsed = started.elapsed().as_secs_f64();
    if !(base.c_emp.is_finite() && base.c_emp > 0.0) {
        return Err(format!("constant not finite: {}", base.c_emp));
    }
    for row in &base.rows {
        if row.rhs == 0.0 && row.lhs > 0.0 {
            return Err(format!("zero right side with positive left side at t = {}", row.t));
        }
    }
    if elapsed > 60.0 {
        return Err(format!("base sweep took {elapsed:.1} s (budget 60 s single-threaded)"));
    }
    let fine = instance_i1(1 << 15).run().map_err(|e| e.to_string())?;
    let drift = (fine.c_emp - base.c_emp).abs() / base.c_emp;
    if drift > 0.10 {
        return Err(format!(
            "constant drifts {:.1}% under resolution doubling ({} -> {})",
            100.0 * drift,
            base.c_emp,
            fine.c_emp
        ));
    }
    Ok(format!(
        "c = {:.6}, drift {:.2}% under doubling, {:.1} s single-threaded",
        base.c_emp,
        100.0 * drift,
        elapsed
    ))
}

fn criterion_2() -> Result<String, String> {
    let n = 512;
    let ones = SampledField::constant(1, 4.0, n, FieldKind::Weight, 1.0).unwrap();
    let f = SampledField::indicator(1, 4.0, n, &[0.0], 1.0).unwrap();
    let report = sawyer_special_case(&ones, &ones, &f, &[0.5], 7).map_err(|e| e.to_string())?;
    let row = &report.rows[0];
    let h = 8.0 / n as f64;
    if (row.lhs - 3.0).abs() > 2.0 * h {
        return Err(format!("left side {} not within 2 cells of 3", row.lhs));
    }
    if (row.rhs - 2.0).abs() > 1e-12 {
        return Err(format!("right side {} is not exactly 2", row.rhs));
    }
    Ok(format!("lhs = {:.6} (3 +- {:.4}), rhs = {}", row.lhs, 2.0 * h, row.rhs))
}

fn criterion_3() -> Result<String, String> {
    let started = Instant::now();
    let mut worst = 0.0f64;
    for n in 1u8..=2 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + n as u64);
        for i in 0..10_000 {
            let side = 10f64.powf(rng.gen_range(-3.0..1.0));
            let low: Vec<f64> = (0..n).map(|_| rng.gen_range(-100.0..100.0)).collect();
            let (_, cube) = find_cover(n, &low, side)
                .map_err(|e| format!("no cover for trial {i} in dimension {n}: {e}"))?;
            let ratio = cube.side() / side;
            if ratio > 3.0 * (1.0 + 1e-12) {
                return Err(format!("cover ratio {ratio} exceeds 3 (dimension {n})"));
            }
            worst = worst.max(ratio);
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    if elapsed > 5.0 {
        return Err(format!("covering scan took {elapsed:.2} s (budget 5 s)"));
    }
    Ok(format!("20000 cubes covered, worst ratio {worst:.4}, {elapsed:.2} s"))
}

fn criterion_4() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut worst = 0.0f64;
    for &p in &[1.0, 1.5, 2.0, 4.0] {
        let phi = YoungFunction::power(p).unwrap();
        for _ in 0..200 {
            let n = 128;
            let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..5.0)).collect();
            let f = SampledField::new(1, 4.0, n, FieldKind::Function, values).unwrap();
            let lo = rng.gen_range(0..n - 1);
            let hi = rng.gen_range(lo + 1..=n);
            let r = mixedweak::field::CellRange {
                lo: [lo, 0, 0],
                hi: [hi, 1, 1],
                n: 1,
            };
            let lux = luxemburg_average(&f, &r, &phi).unwrap().value;
            let exact = f.integrate_map(&r, |x| x.abs().powf(p));
            let vol = (hi - lo) as f64 * f.cell_volume();
            let exact = (exact / vol).powf(1.0 / p);
            let err = (lux - exact).abs() / exact.max(1e-300);
            if err > 1e-9 {
                return Err(format!("p = {p}: relative error {err}"));
            }
            worst = worst.max(err);
        }
    }
    Ok(format!("800 power-profile averages exact, worst error {worst:.2e}"))
}

fn criterion_5() -> Result<String, String> {
    let profiles = [
        YoungFunction::power(2.0).unwrap(),
        YoungFunction::power(3.0).unwrap(),
        YoungFunction::log_power(1.0, 1.0).unwrap(),
    ];
    let grid50 = log_grid(1e-3, 1e3, 50);
    for phi in &profiles {
        let conj = |t: f64| conjugate_of(&|s| phi.eval_raw(s), t);
        for &s in &grid50 {
            let phis = phi.eval_raw(s);
            for &t in &grid50 {
                let bound = phis + conj(t);
                if s * t > bound * (1.0 + 1e-9) + 1e-12 {
                    return Err(format!(
                        "product {s} * {t} exceeds the conjugate bound {bound}"
                    ));
                }
            }
        }
        let product = inverse_product_check(phi, &log_grid(1e-6, 1e6, 200))
            .map_err(|e| e.to_string())?;
        if product.min_ratio < 1.0 - 1e-6 || product.max_ratio > 2.0 + 1e-6 {
            return Err(format!(
                "inverse product ratio [{}, {}] leaves [1, 2]",
                product.min_ratio, product.max_ratio
            ));
        }
    }
    Ok("3 profiles: conjugate bound and inverse product law hold on the scan grids".into())
}

fn criterion_6() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for _ in 0..100_000 {
        let x = rng.gen_range(0.0..1e3);
        let y = epsilon_bound_function(x);
        lo = lo.min(y);
        hi = hi.max(y);
    }
    let cap = (1.0f64 / std::f64::consts::E).exp();
    if lo < 1.0 - 1e-9 || hi > cap + 1e-9 {
        return Err(format!("range [{lo}, {hi}] leaves [1, e^(1/e)]"));
    }
    let argmax = epsilon_bound_argmax();
    let expected = 1.0 / (std::f64::consts::E - 1.0);
    if (argmax - expected).abs() > 1e-6 {
        return Err(format!("argmax {argmax} not within 1e-6 of {expected}"));
    }
    Ok(format!(
        "range [{lo:.9}, {hi:.9}] inside [1, e^(1/e)], argmax {argmax:.7}"
    ))
}

fn criterion_7() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for trial in 0..100 {
        let n = 64usize;
        let values: Vec<f64> = (0..n)
            .map(|_| {
                if rng.gen::<f64>() < 0.4 {
                    rng.gen_range(0.0..4.0)
                } else {
                    0.0
                }
            })
            .collect();
        let g = SampledField::new(1, 2.0, n, FieldKind::Function, values).unwrap();
        let phi = match trial % 3 {
            0 => YoungFunction::identity(),
            1 => YoungFunction::power(rng.gen_range(1.0..3.0)).unwrap(),
            _ => YoungFunction::log_power(rng.gen_range(1.0..2.0), 1.0).unwrap(),
        };
        let grid = DyadicGrid::new(1, (trial % 3) as u16 + 1).unwrap();
        let lambda = rng.gen_range(0.05..1.5);
        let forest =
            level_set_decomposition(&g, &phi, &grid, lambda).map_err(|e| e.to_string())?;
        let md = maximal_orlicz_dyadic_field(&g, &phi, &grid).map_err(|e| e.to_string())?;
        let mut covered = vec![false; n];
        for lc in &forest.cubes {
            let range = g.snap_cube(&lc.cube).ok_or("emitted cube leaves the box")?;
            for i in g.iter_range(&range) {
                if covered[i] {
                    return Err(format!("trial {trial}: cubes overlap at cell {i}"));
                }
                covered[i] = true;
            }
            if !(lc.lux_g > lambda) {
                return Err(format!("trial {trial}: emitted cube average {} <= {lambda}", lc.lux_g));
            }
            if let Ok(parent) = lc.cube.parent() {
                // Root cubes have no admissible parent: the geometric parent
                // sticks out of the box and clipping would test a different
                // region.
                let l = g.half_width();
                let fits = parent.low(0) >= -l - 1e-9 && parent.high(0) <= l + 1e-9;
                if !fits {
                    continue;
                }
                if let Some(pr) = g.snap_cube(&parent) {
                    let plux = luxemburg_average(&g, &pr, &phi).unwrap().value;
                    if plux > lambda {
                        return Err(format!(
                            "trial {trial}: parent average {plux} exceeds {lambda}"
                        ));
                    }
                }
            }
        }
        for i in 0..n {
            if covered[i] != (md[i] > lambda) {
                return Err(format!(
                    "trial {trial}: cell {i} cover mismatch (maximal value {}, threshold {lambda})",
                    md[i]
                ));
            }
        }
    }
    Ok("100 random decompositions match the discrete level set cell-for-cell".into())
}

fn criterion_8() -> Result<String, String> {
    let cfg = instance_i1(1 << 14);
    let (u, v, f, phi) = cfg.build_fields(cfg.cells).map_err(|e| e.to_string())?;
    let grid = DyadicGrid::new(1, 1).unwrap();
    let total = f.values().len();
    let cells: Vec<usize> = (0..5).map(|i| total * (2 * i + 1) / 10).collect();
    let battery = claims_battery(
        &u, &v, &f, cfg.r, &phi, 0.5, 4.0, None, -8, &grid, &cells, cfg.seed,
    )
    .map_err(|e| e.to_string())?;
    if !battery.claim1.constant.is_finite() {
        return Err("first claim constant not finite".into());
    }
    let wk_cap = (2.0f64 / std::f64::consts::E).exp() + 1e-6;
    let mut worst_wk = 0.0f64;
    let mut cube_count = 0usize;
    for report in &battery.claim2 {
        if !report.constant.is_finite() {
            return Err("second claim constant not finite".into());
        }
        if let ClaimDetails::Claim2 { cubes, k, .. } = &report.details {
            for c in cubes {
                cube_count += 1;
                worst_wk = worst_wk.max(c.wk_term);
                if c.wk_term > wk_cap {
                    return Err(format!(
                        "layer k = {k}: remainder average {} exceeds e^(2/e) + 1e-6",
                        c.wk_term
                    ));
                }
            }
        }
    }
    for report in &battery.claim3 {
        if !report.constant.is_finite() || !report.lhs.is_finite() {
            return Err("third claim produced a non-finite value".into());
        }
    }
    Ok(format!(
        "layers {}..={}, {} cubes, worst remainder {:.6} <= e^(2/e), beta = {:.4}",
        battery.k_range.0, battery.k_range.1, cube_count, worst_wk, battery.beta
    ))
}

fn criterion_9() -> Result<String, String> {
    let r = 2.0;
    let phi = YoungFunction::log_power(r, 1.0).unwrap();
    let alpha_grid = log_grid(1e-2, 1e2, 12);
    let x_grid = log_grid(1e-3, 1e3, 40);
    for &p in &[r + 0.5, 2.0 * r] {
        let psi_prime = move |t: f64| p * t.powf(p - 1.0);
        let order = prec_n_check(&phi, &psi_prime, &alpha_grid, &x_grid)
            .map_err(|e| e.to_string())?;
        if !order.established || !order.constant.is_finite() {
            return Err(format!(
                "order relation not established for p = {p} (constant {})",
                order.constant
            ));
        }
    }
    let p = 2.0 * r;
    let mut ratios = Vec::new();
    let mut reports = Vec::new();
    for &cells in &[512usize, 1024, 2048] {
        let u = SampledField::constant(1, 4.0, cells, FieldKind::Weight, 1.0).unwrap();
        let v = mixedweak::field::power_weight(-0.25, 1, 4.0, cells).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let samples: Vec<SampledField> = (0..10)
            .map(|_| {
                let values: Vec<f64> = (0..cells)
                    .map(|_| {
                        if rng.gen::<f64>() < 0.2 {
                            rng.gen_range(0.0..3.0)
                        } else {
                            0.0
                        }
                    })
                    .collect();
                SampledField::new(1, 4.0, cells, FieldKind::Function, values).unwrap()
            })
            .collect();
        let report =
            lp_boundedness_check(&u, &v, r, p, &phi, &samples, 3).map_err(|e| e.to_string())?;
        if report.identity_rel_err > 1e-9 {
            return Err(format!(
                "change-of-variables identity off by {} at {} cells",
                report.identity_rel_err, cells
            ));
        }
        if !report.operator_ratio.is_finite() {
            return Err(format!("operator ratio not finite at {cells} cells"));
        }
        ratios.push(report.operator_ratio);
        reports.push(report);
    }
    if refinement_diverges(&ratios) {
        return Err(format!("operator ratio keeps growing under refinement: {ratios:?}"));
    }
    Ok(format!(
        "order relation stable for both exponents; identity error {:.2e}; ratios {:?}",
        reports.last().unwrap().identity_rel_err,
        ratios
    ))
}

fn criterion_10() -> Result<String, String> {
    let phi = YoungFunction::log_power(1.0, 1.0).unwrap();
    let report = bp_integral(&phi, 2.0, 1.0).map_err(|e| e.to_string())?;
    if report.verdict != BpVerdict::Converges || (report.value - 2.0).abs() > 1e-6 {
        return Err(format!(
            "integral probe gave {:?} with value {} (expected 2)",
            report.verdict, report.value
        ));
    }
    let edge = bp_integral(&phi, 1.0, 1.0).map_err(|e| e.to_string())?;
    if edge.verdict != BpVerdict::Diverges {
        return Err("divergence verdict did not fire at the critical exponent".into());
    }
    Ok(format!("value {:.9} = 2 within 1e-6; critical probe diverges", report.value))
}

#[test]
fn acceptance() {
    type Criterion = fn() -> Result<String, String>;
    let criteria: Vec<(&str, Criterion)> = vec![
        ("1 main sweep on the reference instance", criterion_1),
        ("2 classical special case", criterion_2),
        ("3 shifted dyadic covering", criterion_3),
        ("4 power-profile average exactness", criterion_4),
        ("5 conjugate and inverse laws", criterion_5),
        ("6 epsilon bound extrema", criterion_6),
        ("7 level-set decomposition soundness", criterion_7),
        ("8 stopping-time claims battery", criterion_8),
        ("9 strong-type chain", criterion_9),
        ("10 integral growth law", criterion_10),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("criterion {name}: PASS ({detail})"),
            Err(detail) => {
                failed += 1;
                println!("criterion {name}: FAIL ({detail})");
            }
        }
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
