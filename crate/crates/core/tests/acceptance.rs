//! Acceptance suite: one test per criterion, each printing a pass line with
//! the measured quantities. Desk scale: d = 2, grids up to 128^2.
//!
//! The companion criterion on CLI replay determinism lives in the CLI
//! crate's own acceptance test.

mod common;

use common::{pick, random_field_config, random_spec};
use homlab_core::cell::{
    estimate_ghom, estimate_ghom_shifted, mu_process, triangle_audit, EstimateParams,
};
use homlab_core::geometry::{IntervalBox, JumpDatum, OrientedCube, UnitDirection};
use homlab_core::hash::Mix64;
use homlab_core::lattice::{BcMode, CellProblemSpec, Region, SolverChoice, Stencil};
use homlab_core::media::{make_field, FamilyConfig, FieldConfig};
use homlab_core::solver::{solve, DiscreteProblem};
use homlab_core::stats;
use std::time::Instant;

fn pass(n: u32, name: &str, detail: impl AsRef<str>) {
    println!("acceptance {n:2} ({name}): PASS — {}", detail.as_ref());
}

fn free_cells(spec: &CellProblemSpec) -> usize {
    DiscreteProblem::build(
        &spec.field,
        &Region::Cube(spec.cube.clone()),
        &spec.datum,
        spec.bc,
        spec.collar_width,
        &spec.stencil,
        spec.label_count,
    )
    .unwrap()
    .free_count()
}

fn iid_config(seed: u64) -> FieldConfig {
    FieldConfig {
        family: FamilyConfig::IidUniform { lo: 1.0, hi: 2.0 },
        seed,
        c: None,
        label_table: None,
    }
}

#[test]
fn criterion_01_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = Mix64::new(0xAC01);
    let mut done = 0;
    while done < 100 {
        let mut spec = random_spec(&mut rng, &[4.0, 5.0, 6.0], SolverChoice::Mincut);
        if free_cells(&spec) > 16 {
            continue;
        }
        let cut = solve(&spec).unwrap();
        spec.solver = SolverChoice::Brute;
        let brute = solve(&spec).unwrap();
        assert_eq!(
            cut.value_int, brute.value_int,
            "min-cut and enumeration disagree on spec {done}"
        );
        done += 1;
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "oracle comparison took {elapsed:.1} s");
    pass(1, "oracle equivalence", format!("100 specs bit-exact in {elapsed:.1} s"));
}

#[test]
fn criterion_02_multi_label_quality() {
    let mut rng = Mix64::new(0xAC02);
    let mut done = 0;
    let mut worst_ratio = 1.0f64;
    while done < 20 {
        let mut spec = random_spec(&mut rng, &[5.0], SolverChoice::Brute);
        spec.label_count = 3;
        if free_cells(&spec) != 9 {
            continue;
        }
        let brute = solve(&spec).unwrap();
        spec.solver = SolverChoice::Alpha;
        let alpha = solve(&spec).unwrap();
        let ratio = if brute.value_int == 0 {
            assert_eq!(alpha.value_int, 0);
            1.0
        } else {
            alpha.value_int as f64 / brute.value_int as f64
        };
        assert!(ratio <= 1.05, "expansion/enumeration ratio {ratio} on spec {done}");
        worst_ratio = worst_ratio.max(ratio);
        let mut prev = u64::MAX;
        for &v in &alpha.stats.sweep_values {
            assert!(v <= prev, "sweep energy increased");
            prev = v;
        }
        done += 1;
    }
    pass(2, "multi-label quality", format!("worst expansion ratio {worst_ratio:.4} <= 1.05"));
}

#[test]
fn criterion_03_constant_field_exactness() {
    for value in [1.0f64, 1.7] {
        let mut params = EstimateParams::new(
            FieldConfig {
                family: FamilyConfig::Constant { value },
                seed: 0,
                c: None,
                label_table: None,
            },
            2,
            UnitDirection::axis(2, 1),
            vec![8.0, 16.0, 32.0, 64.0],
            Stencil::facet(2),
            SolverChoice::Mincut,
        );
        params.collar_width = Some(1);
        let (_, records) = estimate_ghom(&params).unwrap();
        for r in &records {
            assert_eq!(
                r.normalized, value,
                "t = {}: normalized {} != {}",
                r.t, r.normalized, value
            );
        }
    }
    pass(3, "constant-field exactness", "normalized == lambda0 exactly at t in {8,16,32,64}");
}

#[test]
fn criterion_04_stripe_field() {
    let mut params = EstimateParams::new(
        FieldConfig {
            family: FamilyConfig::Stripes { values: vec![1.0, 2.0], axis: 0 },
            seed: 0,
            c: None,
            label_table: None,
        },
        2,
        UnitDirection::axis(2, 1),
        vec![4.0, 8.0, 16.0, 32.0],
        Stencil::facet(2),
        SolverChoice::Mincut,
    );
    params.collar_width = Some(1);
    let (report, records) = estimate_ghom(&params).unwrap();
    for r in &records {
        assert!(
            (r.normalized - 1.5).abs() <= 1e-9,
            "t = {}: normalized {} deviates from 1.5",
            r.t,
            r.normalized
        );
    }
    // Independent confirmation by enumeration at the smallest side.
    let (spec4, _) = params.spec_for(0, 4.0).unwrap();
    let mut brute_spec = spec4.clone();
    brute_spec.solver = SolverChoice::Brute;
    let brute = solve(&brute_spec).unwrap();
    let cut = solve(&spec4).unwrap();
    assert_eq!(brute.value_int, cut.value_int);
    pass(4, "stripe field", format!("estimate {} with max deviation <= 1e-9", report.estimate));
}

#[test]
fn criterion_05_staircase_anisotropy() {
    let diag = UnitDirection::from_ints(2, [1, 1, 0]).unwrap();
    let mut params = EstimateParams::new(
        FieldConfig {
            family: FamilyConfig::Constant { value: 1.0 },
            seed: 0,
            c: None,
            label_table: None,
        },
        2,
        diag,
        vec![128.0],
        Stencil::facet(2),
        SolverChoice::Mincut,
    );
    params.collar_width = Some(1);
    let (report, _) = estimate_ghom(&params).unwrap();
    let target = 2f64.sqrt();
    let rel = (report.estimate - target).abs() / target;
    assert!(rel <= 0.02, "staircase estimate {} deviates {rel:.4} from sqrt(2)", report.estimate);
    pass(
        5,
        "staircase anisotropy",
        format!("normalized {:.6} within {:.2}% of sqrt(2)", report.estimate, rel * 100.0),
    );
}

#[test]
fn criterion_06_anisotropic_bc_gap() {
    let diag = UnitDirection::from_ints(2, [1, 1, 0]).unwrap();
    let stencil = Stencil::crofton(2, 2).unwrap();
    let mut params = EstimateParams::new(
        FieldConfig {
            family: FamilyConfig::AnisotropicPsi { lambda: 1.0, coeff: 8.0 },
            seed: 0,
            c: None,
            label_table: None,
        },
        2,
        diag,
        vec![128.0],
        stencil,
        SolverChoice::Mincut,
    );
    let (full, _) = estimate_ghom(&params).unwrap();
    params.bc = BcMode::TopBottom;
    let (tb, _) = estimate_ghom(&params).unwrap();
    assert!(full.estimate >= 2.1, "full-boundary estimate {} below 2.1", full.estimate);
    assert!(tb.estimate <= 2.05, "top-bottom estimate {} above 2.05", tb.estimate);
    pass(
        6,
        "anisotropic BC gap",
        format!("full {:.4} >= 2.1, top-bottom {:.4} <= 2.05", full.estimate, tb.estimate),
    );
}

#[test]
fn criterion_07_isotropy_corollary() {
    let stencil = Stencil::crofton(2, 2).unwrap();
    let mut worst = 0.0f64;
    for ints in [[0i64, 1, 0], [1, 1, 0], [1, 2, 0]] {
        let nu = UnitDirection::from_ints(2, ints).unwrap();
        let mut params = EstimateParams::new(
            FieldConfig {
                family: FamilyConfig::Constant { value: 1.0 },
                seed: 0,
                c: None,
                label_table: None,
            },
            2,
            nu,
            vec![128.0],
            stencil.clone(),
            SolverChoice::Mincut,
        );
        let (full, _) = estimate_ghom(&params).unwrap();
        params.bc = BcMode::TopBottom;
        let (tb, _) = estimate_ghom(&params).unwrap();
        let rel = (full.estimate - tb.estimate).abs() / full.estimate;
        assert!(rel <= 0.05, "direction {ints:?}: relative gap {rel:.4} above 5%");
        worst = worst.max(rel);
    }
    pass(7, "isotropy corollary", format!("worst relative gap {:.3}% <= 5%", worst * 100.0));
}

#[test]
fn criterion_08_subadditivity_audit() {
    let mut rng = Mix64::new(0xAC08);
    let dirs: Vec<UnitDirection> = [[0i64, 1, 0], [1, 0, 0], [3, 4, 0], [-3, 4, 0], [0, -1, 0]]
        .iter()
        .map(|&k| UnitDirection::from_ints(2, k).unwrap())
        .collect();
    for case in 0..50 {
        let nu = pick(&mut rng, &dirs).clone();
        let m = homlab_core::geometry::rational_direction_scale(&nu).unwrap();
        let max_len = if m > 1 { 12 } else { 20 };
        let pieces: i64 = if rng.next_below(2) == 0 { 2 } else { 4 };
        let mut lens = Vec::new();
        for _ in 0..pieces {
            lens.push(rng.next_range_i64(3, (max_len / pieces).max(4)));
        }
        let start = rng.next_range_i64(-10, 10);
        let total: i64 = lens.iter().sum();
        let whole = IntervalBox::new(2, &[(start as f64, (start + total) as f64)]).unwrap();
        let field = make_field(&random_field_config(&mut rng), 2).unwrap();
        let stencil = Stencil::facet(2);
        let mu_whole =
            mu_process(&whole, &nu, 0, 1, 2, &field, &stencil, SolverChoice::Mincut).unwrap();
        let mut sum = 0u64;
        let mut at = start;
        for len in lens {
            let part = IntervalBox::new(2, &[(at as f64, (at + len) as f64)]).unwrap();
            sum += mu_process(&part, &nu, 0, 1, 2, &field, &stencil, SolverChoice::Mincut)
                .unwrap()
                .raw_int;
            at += len;
        }
        assert!(
            mu_whole.raw_int <= sum,
            "case {case}: mu = {} exceeds partition sum {sum}",
            mu_whole.raw_int
        );
    }
    pass(8, "subadditivity audit", "mu(I) <= sum mu(I_i) exactly on 50 random partitions");
}

#[test]
fn criterion_09_stationarity_audit() {
    let mut rng = Mix64::new(0xAC09);
    let families = [
        FamilyConfig::Constant { value: 1.3 },
        FamilyConfig::Stripes { values: vec![1.0, 2.0], axis: 0 },
        FamilyConfig::Checkerboard { values: [1.0, 2.0] },
        FamilyConfig::IidUniform { lo: 1.0, hi: 2.0 },
        FamilyConfig::Product {
            base: Box::new(FamilyConfig::IidUniform { lo: 1.0, hi: 2.0 }),
            coeff: 8.0,
        },
    ];
    let dirs = common::direction_pool(true);
    for family in families {
        for _ in 0..100 {
            let cfg = FieldConfig {
                family: family.clone(),
                seed: rng.next_u64(),
                c: None,
                label_table: None,
            };
            let field = make_field(&cfg, 2).unwrap();
            let nu = pick(&mut rng, &dirs).clone();
            let z = [rng.next_range_i64(-64, 65), rng.next_range_i64(-64, 65), 0];
            let t = 8.0;
            let center = [z[0] as f64, z[1] as f64, 0.0];
            let shifted_spec = CellProblemSpec {
                field: field.clone(),
                cube: OrientedCube::new(center, nu.clone(), t).unwrap(),
                datum: JumpDatum::new(0, 1, nu.clone(), center).unwrap(),
                bc: BcMode::Full,
                collar_width: 1,
                stencil: Stencil::facet(2),
                label_count: 2,
                solver: SolverChoice::Mincut,
                max_sweeps: 4,
                metric_override: false,
            };
            let centered_spec = CellProblemSpec {
                field: field.shift(z),
                cube: OrientedCube::new([0.0; 3], nu.clone(), t).unwrap(),
                datum: JumpDatum::new(0, 1, nu.clone(), [0.0; 3]).unwrap(),
                ..shifted_spec.clone()
            };
            let a = solve(&shifted_spec).unwrap();
            let b = solve(&centered_spec).unwrap();
            assert_eq!(a.value_int, b.value_int, "family {} z {z:?}", cfg.family.name());
        }
    }
    pass(9, "stationarity audit", "bit-exact under 100 shifts per field family");
}

#[test]
fn criterion_10_symmetry_audit() {
    let mut rng = Mix64::new(0xAC10);
    for case in 0..50 {
        let spec = random_spec(&mut rng, &[4.0, 6.0, 8.0], SolverChoice::Mincut);
        let forward = solve(&spec).unwrap();
        let mut reversed = spec.clone();
        reversed.datum = spec.datum.reversed();
        reversed.cube =
            OrientedCube::new(spec.cube.center(), spec.datum.dir().neg(), spec.cube.side())
                .unwrap();
        let backward = solve(&reversed).unwrap();
        assert_eq!(forward.value_int, backward.value_int, "case {case}");
    }
    pass(10, "symmetry audit", "values identical under (a,b,nu) -> (b,a,-nu) on 50 specs");
}

#[test]
fn criterion_11_shifted_cell_consistency() {
    let mut params = EstimateParams::new(
        iid_config(0),
        2,
        UnitDirection::axis(2, 1),
        vec![128.0],
        Stencil::facet(2),
        SolverChoice::Mincut,
    );
    params.collar_width = Some(1);
    params.seeds = (1..=32).collect();
    let (_, centered) = estimate_ghom(&params).unwrap();
    let (_, shifted) = estimate_ghom_shifted([1.0, 0.0, 0.0], &params).unwrap();
    let cv: Vec<f64> = centered.iter().map(|r| r.normalized).collect();
    let sv: Vec<f64> = shifted.iter().map(|r| r.normalized).collect();
    let gap = stats::gap_in_pooled_se(&cv, &sv);
    assert!(gap <= 2.0, "shifted/centered means differ by {gap:.2} pooled standard errors");
    pass(
        11,
        "shifted-cell consistency",
        format!(
            "means {:.5} vs {:.5}, gap {:.2} pooled SE <= 2",
            stats::mean(&cv),
            stats::mean(&sv),
            gap
        ),
    );
}

#[test]
fn criterion_12_ergodicity_proxy() {
    let mut params = EstimateParams::new(
        iid_config(0),
        2,
        UnitDirection::axis(2, 1),
        vec![16.0, 128.0],
        Stencil::facet(2),
        SolverChoice::Mincut,
    );
    params.collar_width = Some(1);
    params.seeds = (1..=32).collect();
    let (report, _) = estimate_ghom(&params).unwrap();
    let var16 = report.per_t[0].variance;
    let var128 = report.per_t[1].variance;
    assert!(
        var128 < var16,
        "seed variance did not decay: var(16) = {var16:.3e}, var(128) = {var128:.3e}"
    );
    pass(
        12,
        "ergodicity proxy",
        format!("variance {var16:.3e} at t=16 down to {var128:.3e} at t=128"),
    );
}

#[test]
fn criterion_13_triangle_audit() {
    let (report, _) = triangle_audit(
        &iid_config(0),
        2,
        &(1..=16).collect::<Vec<u64>>(),
        3,
        &UnitDirection::axis(2, 1),
        64.0,
        &Stencil::facet(2),
        true,
    )
    .unwrap();
    for check in &report.checks {
        assert!(
            check.pass,
            "triangle check failed: g({},{}) = {:.5} > {:.5} + {:.2e} via {}",
            check.a, check.b, check.lhs, check.rhs, check.tolerance, check.via
        );
    }
    assert!(report.passed);
    pass(
        13,
        "triangle audit",
        format!(
            "all {} ordered triples within 3 pooled SE (small-t expansion gap {:.2e})",
            report.checks.len(),
            report.small_t_gap.unwrap_or(0.0)
        ),
    );
}
