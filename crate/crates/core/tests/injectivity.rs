use covol::groups::{Element, Embedding, Factor, FactorRule, StructuredGroup};

fn single(f: Factor) -> StructuredGroup {
    StructuredGroup::new(vec![f]).unwrap()
}

fn factors() -> Vec<Factor> {
    let mut v: Vec<Factor> = (1..=6).map(Factor::Cyclic).collect();
    v.extend((2..=5).map(Factor::Dihedral));
    v
}

fn candidate_rules(src: Factor, dst: Factor) -> Vec<FactorRule> {
    let mut out = vec![FactorRule::Trivial];
    match (src, dst) {
        (Factor::Cyclic(_), Factor::Cyclic(d)) => {
            out.extend((0..d).map(|mult| FactorRule::Cyclic { target: 0, mult }));
        }
        (Factor::Cyclic(_), Factor::Dihedral(m)) => {
            out.extend((0..m).map(|mult| FactorRule::Rotation { target: 0, mult }));
            out.extend((0..m).map(|index| FactorRule::Reflection { target: 0, index }));
        }
        (Factor::Dihedral(_), Factor::Dihedral(m)) => {
            for twist in 0..m {
                out.extend((0..m).map(|offset| FactorRule::Dihedral { target: 0, twist, offset }));
            }
        }
        _ => {}
    }
    out
}

fn images(e: &Embedding, elems: &[Element]) -> Vec<Element> {
    elems.iter().map(|x| e.apply(x).unwrap()).collect()
}

#[test]
fn injectivity_matches_brute_force() {
    let mut accepted = 0;
    for src in factors() {
        for dst in factors() {
            let (s, t) = (single(src), single(dst));
            let elems = s.elements(1000).unwrap();
            for rule in candidate_rules(src, dst) {
                let Ok(e) = Embedding::new(s.clone(), t.clone(), vec![rule]) else { continue };
                accepted += 1;
                let img = images(&e, &elems);
                for (i, x) in elems.iter().enumerate() {
                    for (j, y) in elems.iter().enumerate() {
                        let xy = e.apply(&s.multiply(x, y)).unwrap();
                        assert_eq!(xy, t.multiply(&img[i], &img[j]), "{src} -> {dst} via {rule:?}");
                    }
                }
                let mut distinct = img.clone();
                distinct.sort_by_key(|x| x.to_string());
                distinct.dedup();
                assert_eq!(e.is_injective(), distinct.len() == elems.len(), "{src} -> {dst} via {rule:?}");
                assert_eq!(
                    Embedding::monomorphism(s.clone(), t.clone(), vec![rule]).is_ok(),
                    e.is_injective()
                );
            }
        }
    }
    assert!(accepted > 100);
}

#[test]
fn two_factor_maps() {
    let s = StructuredGroup::new(vec![Factor::Cyclic(2), Factor::Cyclic(3)]).unwrap();
    let t = StructuredGroup::new(vec![Factor::Dihedral(3), Factor::Cyclic(6)]).unwrap();
    let elems = s.elements(1000).unwrap();
    for a in candidate_rules(Factor::Cyclic(2), Factor::Dihedral(3)) {
        for b in candidate_rules(Factor::Cyclic(3), Factor::Cyclic(6)) {
            let b = match b {
                FactorRule::Cyclic { mult, .. } => FactorRule::Cyclic { target: 1, mult },
                other => other,
            };
            let Ok(e) = Embedding::new(s.clone(), t.clone(), vec![a, b]) else { continue };
            let mut img: Vec<String> = images(&e, &elems).iter().map(|x| x.to_string()).collect();
            img.sort();
            img.dedup();
            assert_eq!(e.is_injective(), img.len() == elems.len(), "{a:?} {b:?}");
        }
    }
}

#[test]
fn composition_agrees_pointwise() {
    let c2 = single(Factor::Cyclic(2));
    let d2 = single(Factor::Dihedral(2));
    let d4 = single(Factor::Dihedral(4));
    let f = Embedding::monomorphism(c2.clone(), d2.clone(), vec![FactorRule::Reflection { target: 0, index: 1 }]).unwrap();
    let g = Embedding::monomorphism(d2, d4, vec![FactorRule::Dihedral { target: 0, twist: 2, offset: 1 }]).unwrap();
    let h = f.then(&g).unwrap();
    for x in c2.elements(100).unwrap() {
        assert_eq!(h.apply(&x).unwrap(), g.apply(&f.apply(&x).unwrap()).unwrap());
    }
}
