//! Shared generators for randomized solver and process tests.

use homlab_core::cell::standard_center;
use homlab_core::geometry::{JumpDatum, OrientedCube, UnitDirection};
use homlab_core::hash::Mix64;
use homlab_core::lattice::{BcMode, CellProblemSpec, SolverChoice, Stencil};
use homlab_core::media::{make_field, FamilyConfig, FieldConfig, SurfaceTensionField};

/// Snapped directions in the plane. The `tie_free` pool has odd coordinate
/// sums, so no half-integer cell center ever lies exactly on the jump
/// hyperplane of an integer-anchored datum and exact-value symmetries hold
/// without tie effects.
pub fn direction_pool(tie_free: bool) -> Vec<UnitDirection> {
    let ints: &[[i64; 3]] = if tie_free {
        &[
            [0, 1, 0],
            [1, 0, 0],
            [1, 2, 0],
            [2, 1, 0],
            [-1, 2, 0],
            [2, -1, 0],
            [1, -2, 0],
            [3, 4, 0],
            [-3, 4, 0],
            [0, -1, 0],
        ]
    } else {
        &[
            [0, 1, 0],
            [1, 0, 0],
            [1, 1, 0],
            [1, -1, 0],
            [1, 2, 0],
            [2, 1, 0],
            [3, 4, 0],
            [-1, 1, 0],
            [0, -1, 0],
            [-1, -2, 0],
        ]
    };
    ints.iter()
        .map(|&k| UnitDirection::from_ints(2, k).unwrap())
        .collect()
}

pub fn pick<'a, T>(rng: &mut Mix64, items: &'a [T]) -> &'a T {
    &items[rng.next_below(items.len() as u64) as usize]
}

pub fn random_field_config(rng: &mut Mix64) -> FieldConfig {
    let seed = rng.next_u64();
    let family = match rng.next_below(5) {
        0 => FamilyConfig::Constant { value: 1.0 + rng.next_f64() },
        1 => FamilyConfig::Stripes {
            values: vec![1.0 + rng.next_f64(), 1.0 + rng.next_f64()],
            axis: 0,
        },
        2 => FamilyConfig::Checkerboard {
            values: [1.0 + rng.next_f64(), 1.0 + rng.next_f64()],
        },
        3 => FamilyConfig::IidUniform { lo: 1.0, hi: 2.0 },
        _ => FamilyConfig::Product {
            base: Box::new(FamilyConfig::IidUniform { lo: 1.0, hi: 2.0 }),
            coeff: 8.0,
        },
    };
    FieldConfig { family, seed, c: None, label_table: None }
}

pub fn random_field(rng: &mut Mix64) -> SurfaceTensionField {
    make_field(&random_field_config(rng), 2).unwrap()
}

/// Random two-label cube spec over the tie-free direction pool, with even
/// sides and integer-centered cubes.
pub fn random_spec(rng: &mut Mix64, sides: &[f64], solver: SolverChoice) -> CellProblemSpec {
    let dirs = direction_pool(true);
    let nu = pick(rng, &dirs).clone();
    let t = *pick(rng, sides);
    let (center, _) = standard_center(t, [0.0; 3], 2);
    let cube = OrientedCube::new(center, nu.clone(), t).unwrap();
    let datum = JumpDatum::new(0, 1, nu, center).unwrap();
    CellProblemSpec {
        field: random_field(rng),
        cube,
        datum,
        bc: BcMode::Full,
        collar_width: 1,
        stencil: Stencil::facet(2),
        label_count: 2,
        solver,
        max_sweeps: 8,
        metric_override: false,
    }
}
