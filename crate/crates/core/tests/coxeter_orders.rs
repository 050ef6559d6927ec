use covol::coxeter::{members, CoxeterMatrix, WordSolver};
use num_bigint::BigUint;

fn systems() -> Vec<(CoxeterMatrix, u64)> {
    vec![
        (CoxeterMatrix::path(&[3]), 6),
        (CoxeterMatrix::path(&[5]), 10),
        (CoxeterMatrix::path(&[3, 3]), 24),
        (CoxeterMatrix::path(&[4, 3]), 48),
        (CoxeterMatrix::path(&[5, 3]), 120),
        (CoxeterMatrix::path(&[3, 3, 3]), 120),
        (CoxeterMatrix::path(&[4, 3, 3]), 384),
        (CoxeterMatrix::triangle(2, 2, 3), 12),
        (CoxeterMatrix::direct_sum(&[CoxeterMatrix::path(&[3]), CoxeterMatrix::path(&[4])]), 48),
        (CoxeterMatrix::from_type_name("D4").unwrap(), 192),
    ]
}

#[test]
fn enumeration_matches_orders() {
    for (m, full) in systems() {
        let all = (1u64 << m.rank()) - 1;
        assert_eq!(m.spherical_order_mask(all), Some(BigUint::from(full)), "{m:?}");
        let mut solver = WordSolver::new(&m, 1 << 28);
        for mask in 0..=all {
            let words = solver.enumerate(mask, 5000).unwrap_or_else(|e| panic!("{m:?} mask {mask}: {e}"));
            assert_eq!(m.spherical_order_mask(mask), Some(BigUint::from(words.len())), "mask {mask}");
            let longest = words.iter().map(Vec::len).max().unwrap();
            assert!(words.iter().all(|w| w.iter().all(|g| members(mask).contains(g))));
            assert!(longest <= members(mask).len() * 15);
        }
    }
}

#[test]
fn infinite_subsets_exceed_budget() {
    for m in [CoxeterMatrix::triangle(3, 3, 3), CoxeterMatrix::free(2), CoxeterMatrix::triangle(2, 3, 6)] {
        let all = (1u64 << m.rank()) - 1;
        assert_eq!(m.spherical_order_mask(all), None);
        let mut solver = WordSolver::new(&m, 1 << 20);
        assert!(solver.enumerate(all, 2000).is_err());
    }
}

#[test]
fn spherical_masks_are_closed_downward() {
    for (m, _) in systems().into_iter().chain([(CoxeterMatrix::triangle(3, 3, 3), 0)]) {
        let masks = m.spherical_masks();
        for &s in &masks {
            for i in members(s) {
                let sub = s & !(1 << i);
                assert!(sub == 0 || masks.contains(&sub));
            }
        }
    }
}
