use covol::cog::ComplexOfGroups;
use covol::covolume::{closed_form, serre_covolume, ExactRational};
use covol::families::{generate, FamilySpec};
use covol::groups::StructuredGroup;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn ga_oracle(n: u64, k: usize) -> BigRational {
    let r = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
    let mut x = r(1, 2);
    let mut pow = BigInt::from(1);
    for _ in 1..=k {
        pow *= BigInt::from(n - 1);
        x += BigRational::new(BigInt::from(2), pow.clone());
    }
    x + BigRational::new(BigInt::from(1), BigInt::from(n) * pow)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rational_text_round_trip(a in -10_000i64..10_000, b in 1i64..10_000) {
        let x = ExactRational::new(a, b);
        let back: ExactRational = x.to_string().parse().unwrap();
        prop_assert_eq!(&back, &x);
        let json = serde_json::to_string(&x).unwrap();
        prop_assert_eq!(serde_json::from_str::<ExactRational>(&json).unwrap(), x);
    }

    #[test]
    fn rational_arithmetic(a in -500i64..500, b in 1i64..500, c in -500i64..500, d in 1i64..500) {
        let (x, y) = (ExactRational::new(a, b), ExactRational::new(c, d));
        let (p, q) = (BigRational::new(a.into(), b.into()), BigRational::new(c.into(), d.into()));
        prop_assert_eq!((&x + &y).inner().clone(), &p + &q);
        prop_assert_eq!((&x - &y).inner().clone(), &p - &q);
        prop_assert_eq!((&x * &y).inner().clone(), &p * &q);
        if c != 0 {
            prop_assert_eq!((&x / &y).inner().clone(), &p / &q);
        }
    }

    #[test]
    fn tree_covolume_matches_oracle(n in 3u64..12, k in 0usize..9) {
        let s = FamilySpec::parse("GA", &format!("n={n},k={k}")).unwrap();
        let x = serre_covolume(&generate(&s).unwrap()).unwrap();
        prop_assert_eq!(x.inner(), &ga_oracle(n, k));
        prop_assert_eq!(closed_form(&s, k).unwrap(), x);
    }

    #[test]
    fn product_scales_covolume(n in 3u64..7, k in 0usize..4, b in 1u64..7) {
        let s = FamilySpec::parse("GA", &format!("n={n},k={k}")).unwrap();
        let c = generate(&s).unwrap();
        let scaled = serre_covolume(&c.product_with(&StructuredGroup::cyclic(b))).unwrap();
        prop_assert_eq!(scaled * ExactRational::integer(b), serre_covolume(&c).unwrap());
    }

    #[test]
    fn documents_round_trip(m in 2u64..4, x in 2u64..4, k in 0usize..3) {
        for (name, params) in [
            ("X0", format!("m={m},x={x},k={k}")),
            ("A", format!("p1={},k={k}", m + 1)),
            ("GpA", format!("n={},p=2,k={k}", x + 2)),
        ] {
            let c = generate(&FamilySpec::parse(name, &params).unwrap()).unwrap();
            let back = ComplexOfGroups::from_json(&c.to_json()).unwrap();
            prop_assert_eq!(back.to_json(), c.to_json());
            prop_assert_eq!(serre_covolume(&back).unwrap(), serre_covolume(&c).unwrap());
            prop_assert!(back.validate().is_valid());
        }
    }
}
