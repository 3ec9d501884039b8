use proptest::prelude::*;
use sperner_core::reduction::{duplicate, element_classes, reduce};
use sperner_core::{
    down_up, is_k_sperner, is_strongly_saturating, is_weakly_saturating, longest_chain,
    parse_family, serialize_family, SetFamily, SetMask,
};

fn family(max_n: usize) -> impl Strategy<Value = SetFamily> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(0u64..1 << n, 0..24)
            .prop_map(move |ws| SetFamily::from_words_dedup(n, ws).unwrap())
    })
}

fn complemented(f: &SetFamily) -> SetFamily {
    SetFamily::new(f.n(), f.iter().map(SetMask::complement)).unwrap()
}

proptest! {
    #[test]
    fn complement_swaps_down_and_up(f in family(10), w in any::<u64>()) {
        let s = SetMask::new(f.n(), w & ((1u64 << f.n()) - 1)).unwrap();
        let (d, u) = down_up(s, &f);
        prop_assert_eq!(down_up(s.complement(), &complemented(&f)), (u, d));
    }

    #[test]
    fn complement_preserves_saturation(f in family(7), k in 1usize..6) {
        let g = complemented(&f);
        prop_assert_eq!(longest_chain(&f).0, longest_chain(&g).0);
        prop_assert_eq!(is_k_sperner(&f, k).unwrap().is_valid(), is_k_sperner(&g, k).unwrap().is_valid());
        prop_assert_eq!(
            is_weakly_saturating(&f, k).unwrap().is_valid(),
            is_weakly_saturating(&g, k).unwrap().is_valid()
        );
        prop_assert_eq!(
            is_strongly_saturating(&f, k).unwrap().is_valid(),
            is_strongly_saturating(&g, k).unwrap().is_valid()
        );
    }

    #[test]
    fn format_round_trips(f in family(12)) {
        let text = serialize_family(&f);
        prop_assert_eq!(parse_family(&text).unwrap(), f);
    }

    #[test]
    fn duplicate_then_reduce_matches_reduce(f in family(9), x in 1usize..10) {
        prop_assume!(x <= f.n());
        let d = duplicate(&f, x).unwrap();
        prop_assert_eq!(d.len(), f.len());
        prop_assert_eq!(reduce(&d), reduce(&f));
        prop_assert_eq!(element_classes(&d).len(), element_classes(&f).len());
        prop_assert_eq!(longest_chain(&d).0, longest_chain(&f).0);
    }

    #[test]
    fn reduce_is_separating_and_idempotent(f in family(10)) {
        let r = reduce(&f);
        prop_assert!(element_classes(&r).iter().all(|c| c.len() == 1));
        prop_assert_eq!(reduce(&r), r.clone());
        prop_assert_eq!(r.len(), f.len());
    }
}
