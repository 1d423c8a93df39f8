use proptest::prelude::*;

use paracorp::eval::{alignment_type_distribution, harmonic_mean, prf1, Prf};
use paracorp::model::{AlignmentSet, Bead, BeadType, GoldAlignment};

/// A valid, fully covering alignment from a list of bead shapes.
fn from_shapes(shapes: &[BeadType]) -> AlignmentSet {
    let (mut i, mut j) = (0, 0);
    let mut beads = Vec::new();
    for ty in shapes {
        beads.push(Bead::new((i..i + ty.src).collect(), (j..j + ty.tgt).collect(), Some(0.0), "t"));
        i += ty.src;
        j += ty.tgt;
    }
    AlignmentSet::with_beads(beads, i, j)
}

fn shapes() -> impl Strategy<Value = Vec<BeadType>> {
    prop::collection::vec(prop::sample::select(BeadType::ALLOWED.to_vec()), 1..40)
}

proptest! {
    #[test]
    fn prf_algebra(matched in 0usize..50, extra_pred in 0usize..50, extra_gold in 0usize..50) {
        let p = Prf::from_counts(matched, matched + extra_pred, matched + extra_gold);
        for v in [p.precision, p.recall, p.f1] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        prop_assert_eq!(p.f1 == 0.0, p.precision * p.recall == 0.0);
        if p.precision * p.recall > 0.0 {
            let want = 2.0 * p.precision * p.recall / (p.precision + p.recall);
            prop_assert!((p.f1 - want).abs() < 1e-15);
        }
    }

    #[test]
    fn harmonic_mean_lies_between_its_inputs(p in 0.0f64..=1.0, r in 0.0f64..=1.0) {
        let f = harmonic_mean(p, r);
        prop_assert!(f <= p.max(r) + 1e-15);
        prop_assert!(p.min(r) == 0.0 || f >= p.min(r) - 1e-15);
    }

    #[test]
    fn swapping_roles_swaps_precision_and_recall(a in shapes(), b in shapes(), all_types in any::<bool>()) {
        // pad the shorter alignment with unaligned sentences so both cover the same text
        let (sa, sb) = (from_shapes(&a), from_shapes(&b));
        let pad = |mut s: AlignmentSet, n: usize, m: usize| {
            for i in s.src_len..n {
                s.beads.push(Bead::new(vec![i], vec![], Some(0.0), "t"));
            }
            for j in s.tgt_len..m {
                s.beads.push(Bead::new(vec![], vec![j], Some(0.0), "t"));
            }
            AlignmentSet { src_len: n, tgt_len: m, ..s }
        };
        let n = sa.src_len.max(sb.src_len);
        let m = sa.tgt_len.max(sb.tgt_len);
        let (sa, sb) = (pad(sa, n, m), pad(sb, n, m));
        let forward = prf1(&sa, &GoldAlignment::new(sb.clone()), !all_types).unwrap();
        let backward = prf1(&sb, &GoldAlignment::new(sa), !all_types).unwrap();
        prop_assert_eq!(forward.precision, backward.recall);
        prop_assert_eq!(forward.recall, backward.precision);
    }

    #[test]
    fn distribution_percents_recompute_from_counts(s in shapes()) {
        let gold = GoldAlignment::new(from_shapes(&s));
        let rows = alignment_type_distribution(&gold);
        let total: usize = rows.iter().map(|r| r.count).sum();
        prop_assert_eq!(total, s.len());
        for r in &rows {
            // tenths of a percent, rounded half up in exact integer arithmetic
            let tenths = (2000 * r.count + total) / (2 * total);
            prop_assert_eq!(format!("{:.1}", r.percent), format!("{}.{}", tenths / 10, tenths % 10));
        }
        let sum: f64 = rows.iter().map(|r| r.percent).sum();
        // each row is off by at most half a tenth
        prop_assert!((sum - 100.0).abs() <= 0.05 * rows.len() as f64 + 1e-9, "percents sum to {}", sum);
    }
}
