//! Property tests for the geometric and stochastic primitives.

use homlab_core::geometry::{orientation_matrix, UnitDirection};
use homlab_core::media::{make_field, FamilyConfig, FieldConfig};
use homlab_core::sum::exact_sum;
use proptest::prelude::*;

proptest! {
    #[test]
    fn orientation_matrix_is_orthogonal(vx in -1.0f64..1.0, vy in -1.0f64..1.0, vz in -1.0f64..1.0) {
        prop_assume!(vx.abs() + vy.abs() + vz.abs() > 1e-3);
        for dim in [2usize, 3] {
            let v = if dim == 2 { vec![vx, vy] } else { vec![vx, vy, vz] };
            prop_assume!(v.iter().any(|c| c.abs() > 1e-3));
            let nu = UnitDirection::snap(dim, &v).unwrap();
            let m = orientation_matrix(&nu);
            let u = nu.unit();
            for i in 0..dim {
                prop_assert!((m[i][dim - 1] - u[i]).abs() < 1e-10);
            }
            for a in 0..dim {
                for b in 0..dim {
                    let dot: f64 = (0..dim).map(|i| m[i][a] * m[i][b]).sum();
                    let want = if a == b { 1.0 } else { 0.0 };
                    prop_assert!((dot - want).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn field_symmetry_and_stationarity(
        seed in any::<u64>(),
        x in -100.0f64..100.0,
        y in -100.0f64..100.0,
        zx in -40i64..40,
        zy in -40i64..40,
        kx in -5i64..=5,
        ky in -5i64..=5,
    ) {
        prop_assume!(kx != 0 || ky != 0);
        let field = make_field(
            &FieldConfig {
                family: FamilyConfig::IidUniform { lo: 1.0, hi: 2.0 },
                seed,
                c: None,
                label_table: None,
            },
            2,
        )
        .unwrap();
        let nu = UnitDirection::from_ints(2, [kx, ky, 0]).unwrap();
        let p = [x, y, 0.0];
        let v = field.evaluate(p, 0, 1, &nu).unwrap();
        prop_assert!((0.5..=2.0).contains(&v));
        // Pair/normal reversal is exact.
        prop_assert_eq!(v.to_bits(), field.evaluate(p, 1, 0, &nu.neg()).unwrap().to_bits());
        // Integer shifts are exact.
        let shifted = field.shift([zx, zy, 0]);
        let q = [x + zx as f64, y + zy as f64, 0.0];
        prop_assert_eq!(
            shifted.evaluate(p, 0, 1, &nu).unwrap().to_bits(),
            field.evaluate(q, 0, 1, &nu).unwrap().to_bits()
        );
    }

    #[test]
    fn exact_sum_is_permutation_invariant(values in prop::collection::vec(-1e12f64..1e12, 0..40)) {
        let forward = exact_sum(values.iter().copied());
        let mut reversed = values.clone();
        reversed.reverse();
        prop_assert_eq!(forward.to_bits(), exact_sum(reversed).to_bits());
        let mut interleaved: Vec<f64> = Vec::new();
        let mid = values.len() / 2;
        for i in 0..mid {
            interleaved.push(values[values.len() - 1 - i]);
            interleaved.push(values[i]);
        }
        if values.len() % 2 == 1 {
            interleaved.push(values[mid]);
        }
        prop_assert_eq!(forward.to_bits(), exact_sum(interleaved).to_bits());
    }
}
