//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use covol::cli::{execute, verify_paper};
use covol::cog::{Color, ComplexBuilder, ComplexOfGroups};
use covol::cover::{bass_serre_ball, building_ball, davis_ball, panel_graph, quotient_check, CheckStatus, ColorScheme, DavisExtent};
use covol::covolume::{omega, serre_covolume};
use covol::coxeter::{CoxeterMatrix, EndsCount};
use covol::families::{catalog_for, chamber_hat_kprime, generate, FamilySpec, KPrime};
use covol::groups::{Factor, FactorRule, StructuredGroup};
use covol::links::{applicable_case, aut_order, building_coset_check, catalog_check, graph_iso, link_fast, local_development, LinkCase};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn r(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn pow_r(base: i64, e: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(base).pow(e as u32))
}

fn spec(name: &str, params: &str) -> FamilySpec {
    FamilySpec::parse(name, params).unwrap()
}

fn cov(name: &str, params: &str) -> Result<BigRational, String> {
    let c = generate(&spec(name, params)).map_err(|e| format!("{name}({params}): {e}"))?;
    serre_covolume(&c).map(|x| x.inner().clone()).map_err(|e| e.to_string())
}

fn valuation(x: &BigRational, p: u64) -> u64 {
    let mut d = x.denom().clone();
    let p = BigInt::from(p);
    let mut v = 0;
    while !d.is_zero() && (&d % &p).is_zero() {
        d /= &p;
        v += 1;
    }
    v
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ratios(xs: &[BigRational]) -> Vec<BigRational> {
    let d: Vec<BigRational> = xs.windows(2).map(|w| &w[1] - &w[0]).collect();
    d.windows(2).map(|w| &w[1] / &w[0]).collect()
}

fn ga_oracle(n: i64, k: usize) -> BigRational {
    let mut x = r(1, 2);
    for i in 1..=k {
        x += r(2, 1) / pow_r(n - 1, i);
    }
    x + r(1, n) / pow_r(n - 1, k)
}

fn criterion_1() -> Outcome {
    for n in [3i64, 4, 5, 6, 10] {
        let mut xs = Vec::new();
        for k in 0..=20 {
            let x = cov("GA", &format!("n={n},k={k}"))?;
            ensure(x == ga_oracle(n, k), || format!("GA n={n} k={k}: {x}"))?;
            xs.push(x);
        }
        let lim = r(1, 2) + r(2, n - 2);
        ensure(cov("GA_limit", &format!("n={n}"))? == lim, || format!("GA_limit n={n}"))?;
        let lv = covol::covolume::limit_value(&spec("GA", &format!("n={n}"))).map_err(|e| e.to_string())?;
        ensure(lv.inner() == &lim, || format!("limit n={n}: {lv}"))?;
        ensure(ratios(&xs).iter().all(|q| *q == r(1, n - 1)), || format!("ratios n={n}"))?;
    }
    Ok("n in {3,4,5,6,10}, k <= 20".into())
}

fn criterion_2() -> Outcome {
    let mut worst = 0;
    for (n, p) in [(5u64, 2u64), (5, 3), (4, 3)] {
        let mut best = 0;
        let mut k = 0;
        while best < 8 && k <= 20 {
            best = best.max(valuation(&cov("GpA", &format!("n={n},p={p},k={k}"))?, p));
            k += 1;
        }
        ensure(best >= 8, || format!("(n,p)=({n},{p}) stops at v_p = {best}"))?;
        worst = worst.max(k - 1);
    }
    let g = covol::families::family_gpa_k(5, 2, 2).map_err(|e| e.to_string())?;
    let c = g.complex();
    let mut orders: BTreeMap<Color, Vec<u64>> = BTreeMap::new();
    for &v in g.sinks() {
        orders.entry(c.color(v)).or_default().push(c.group(v).order_u64().unwrap());
    }
    for o in orders.values_mut() {
        o.sort_unstable();
    }
    let reds = [vec![2; 4], vec![4; 9]].concat();
    let blues = [vec![2], vec![4; 3], vec![20; 9]].concat();
    ensure(orders.get(&Color::Red) == Some(&reds) && orders.get(&Color::Blue) == Some(&blues), || format!("{orders:?}"))?;
    let x = serre_covolume(c).map_err(|e| e.to_string())?;
    ensure(x.inner() == &r(119, 20), || format!("(5,2,2) covolume {x}"))?;
    Ok(format!("alpha <= 8 reached by k = {worst}; (5,2,2) covolume 119/20"))
}

fn x0_oracle(m: i64, x: i64, k: usize) -> BigRational {
    let geo: BigRational = (0..=k).map(|i| r(1, 1) / pow_r(2, i)).sum();
    (r(1, 1) + r(x, 1) + r(2 * x, m)) * geo + r(x, m) - r(x, m) / pow_r(2, k + 1)
}

fn criterion_3() -> Outcome {
    for (m, x) in [(2i64, 2i64), (2, 3), (3, 2), (4, 2)] {
        let mut xs = Vec::new();
        for k in 0..=12 {
            let c = cov("X0", &format!("m={m},x={x},k={k}"))?;
            ensure(c == x0_oracle(m, x, k), || format!("X0 ({m},{x}) k={k}: {c}"))?;
            xs.push(c);
        }
        let lim = r(2 + 2 * x, 1) + r(5 * x, m);
        ensure(cov("X0_limit", &format!("m={m},x={x}"))? == lim, || format!("X0_limit ({m},{x})"))?;
        ensure(ratios(&xs).iter().all(|q| *q == r(1, 2)), || format!("X0 ratios ({m},{x})"))?;
    }
    for p in [2u64, 3, 5] {
        for (m, x) in [(2u64, 2u64), (3, 2)] {
            let xs: Vec<BigRational> = (0..=10)
                .map(|k| cov("Xprime", &format!("m={m},x={x},p={p},k={k}")))
                .collect::<Result<_, _>>()?;
            ensure(ratios(&xs).iter().all(|q| *q == r(1, p as i64)), || format!("X' ratios p={p}"))?;
            let vals: Vec<u64> = xs.iter().map(|x| valuation(x, p)).collect();
            for alpha in 1..=8 {
                ensure(vals.iter().any(|&v| v >= alpha), || format!("X' p={p} alpha={alpha}: {vals:?}"))?;
            }
        }
    }
    Ok("X0 grid k <= 12, X' p in {2,3,5} k <= 10".into())
}

fn criterion_4() -> Outcome {
    let mut omegas = Vec::new();
    for kp in ["", "2x3", "2*3"] {
        let om = omega(&chamber_hat_kprime(&KPrime::parse(kp).unwrap()).map_err(|e| e.to_string())?).inner().clone();
        omegas.push(om.clone());
        for p1 in [3i64, 4, 5] {
            let g = r(2, p1 - 2);
            let expected = (r(1, 1) + &g) * &om + r(1, 2) + &g;
            let params = format!("p1={p1},kprime={kp}");
            ensure(cov("A_limit", &params)? == expected, || format!("A_limit {params}"))?;
        }
        for p2 in [3i64, 4] {
            for p1 in p2..=p2 + 3 {
                let expected = (r(p1 * p2, 1) * &om + r(p1 + p2, 1)) / r(p2 * (p2 - 2), 1);
                let params = format!("p1={p1},p2={p2},kprime={kp}");
                ensure(cov("B_limit", &params)? == expected, || format!("B_limit {params}"))?;
            }
        }
    }
    ensure(omegas == [r(1, 1), r(2, 1), r(11, 6)], || format!("omega values {omegas:?}"))?;
    for (name, params, p) in [("H", "p=2,p1=3,p2=3", 2u64), ("H", "p=3,p1=4,p2=3", 3), ("Ap", "p=2,p1=3,p2=4,kprime=2x3", 2)] {
        let vals: Vec<u64> = (0..=12)
            .map(|k| cov(name, &format!("{params},k={k}")).map(|x| valuation(&x, p)))
            .collect::<Result<_, _>>()?;
        for alpha in 1..=6 {
            ensure(vals.iter().any(|&v| v >= alpha), || format!("{name}({params}) alpha={alpha}: {vals:?}"))?;
        }
    }
    Ok("omega in {1, 2, 11/6}".into())
}

const FACTORS: [Factor; 6] = [
    Factor::Cyclic(2),
    Factor::Cyclic(3),
    Factor::Cyclic(4),
    Factor::Cyclic(6),
    Factor::Dihedral(2),
    Factor::Dihedral(3),
];

fn random_color(rng: &mut ChaCha8Rng) -> Color {
    [Color::Red, Color::Blue, Color::Green, Color::Purple][rng.gen_range(0..4)]
}

/// Random subgroup of one factor with its rule into that factor.
fn random_subfactor(rng: &mut ChaCha8Rng, f: Factor, target: usize) -> Option<(Factor, FactorRule)> {
    match (f, rng.gen_range(0..4)) {
        (_, 0) => None,
        (Factor::Cyclic(n), 1) => {
            let divisors: Vec<u64> = (1..=n).filter(|d| n % d == 0 && *d > 1).collect();
            let d = divisors[rng.gen_range(0..divisors.len())];
            Some((Factor::Cyclic(d), FactorRule::Cyclic { target, mult: n / d }))
        }
        (Factor::Dihedral(m), 1) => Some((Factor::Cyclic(2), FactorRule::Reflection { target, index: rng.gen_range(0..m) })),
        (Factor::Dihedral(m), 2) => Some((Factor::Cyclic(m), FactorRule::Rotation { target, mult: 1 })),
        (f, _) => Some((f, FactorRule::identity(target, f))),
    }
}

/// Star around vertex 0; `ins` may form chains when there are no outs.
fn random_complex(rng: &mut ChaCha8Rng) -> ComplexOfGroups {
    let mode = rng.gen_range(0..4);
    let mut b = ComplexBuilder::new();
    let trivial_centre = mode == 0;
    let centre_factors: Vec<Factor> = if trivial_centre {
        Vec::new()
    } else {
        (0..rng.gen_range(1..=2)).map(|_| FACTORS[rng.gen_range(0..FACTORS.len())]).collect()
    };
    let g = StructuredGroup::new(centre_factors.clone()).unwrap();
    let v = b.add_vertex("v", random_color(rng), "centre", g.clone(), true).unwrap();
    let with_ins = mode != 1;
    let with_outs = mode == 0 || mode == 1;
    if with_ins {
        for i in 0..rng.gen_range(1..=4) {
            let mut factors = Vec::new();
            let mut rules = Vec::new();
            for (t, &f) in centre_factors.iter().enumerate() {
                if let Some((sf, rule)) = random_subfactor(rng, f, t) {
                    factors.push(sf);
                    rules.push(rule);
                }
            }
            let h = StructuredGroup::new(factors.clone()).unwrap();
            let u = b.add_vertex(format!("u{i}"), random_color(rng), "in", h, true).unwrap();
            b.add_rules(u, v, rules).unwrap();
            if !with_outs && !factors.is_empty() && rng.gen_bool(0.5) {
                let keep: Vec<usize> = (0..factors.len()).filter(|_| rng.gen_bool(0.5)).collect();
                let sub = StructuredGroup::new(keep.iter().map(|&j| factors[j]).collect()).unwrap();
                let w = b.add_vertex(format!("u{i}'"), random_color(rng), "in2", sub, true).unwrap();
                b.add_inclusion(w, u, &keep).unwrap();
            }
        }
    }
    if with_outs {
        let mut prev: Option<usize> = None;
        for j in 0..rng.gen_range(1..=3) {
            let extra = FACTORS[rng.gen_range(0..4)];
            let base = match prev {
                Some(p) if j == 1 && !with_ins && rng.gen_bool(0.5) => Some(p),
                _ => None,
            };
            let src = base.unwrap_or(v);
            let grp = b.group(src).product(&StructuredGroup::cyclic(extra.order()));
            let w = b.add_vertex(format!("w{j}"), random_color(rng), "out", grp, true).unwrap();
            b.add_prefix(src, w).unwrap();
            if src != v {
                b.add_prefix(v, w).unwrap();
            }
            prev = Some(w);
        }
    }
    b.build().unwrap()
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c0ff);
    let mut per_case: BTreeMap<String, usize> = BTreeMap::new();
    let mut tried = 0;
    while per_case.values().sum::<usize>() < 200 && tried < 5000 {
        tried += 1;
        let c = random_complex(&mut rng);
        ensure(c.validate().is_valid(), || format!("invalid random complex: {:?}", c.validate().violations))?;
        let Some(case) = applicable_case(&c, 0) else { continue };
        let fast = link_fast(&c, 0, case).map_err(|e| format!("fast {case:?}: {e}"))?;
        let slow = local_development(&c, 0).map_err(|e| format!("development {case:?}: {e}"))?;
        ensure(graph_iso(&fast.unordered(), &slow.unordered()), || format!("case {case:?} differs on {}", c.to_json()))?;
        *per_case.entry(format!("{case:?}")).or_default() += 1;
    }
    let total: usize = per_case.values().sum();
    ensure(total >= 100, || format!("only {total} applicable complexes"))?;
    for case in [LinkCase::I, LinkCase::II, LinkCase::III, LinkCase::IV] {
        ensure(per_case.contains_key(&format!("{case:?}")), || format!("no instance of case {case:?}"))?;
    }
    for m in 2..=4 {
        for x in 2..=4 {
            for k in 0..=3 {
                let s = spec("X0", &format!("m={m},x={x},k={k}"));
                let c = generate(&s).map_err(|e| e.to_string())?;
                let cat = catalog_for(&s).map_err(|e| e.to_string())?.ok_or("X0 catalog")?;
                let rep = catalog_check(&c, &cat);
                ensure(rep.pass(), || format!("X0 ({m},{x},{k}): {:?}", rep.failures().first()))?;
            }
        }
    }
    for (name, params) in [
        ("A", "p1=3,k=2"),
        ("A", "p1=4,k=1,kprime=2x3"),
        ("B", "p1=5,p2=3,k=1"),
        ("B", "p1=4,p2=4,k=1,kprime=2*3"),
        ("B_limit", "p1=6,p2=4"),
        ("Ap", "p=2,p1=3,p2=3,k=2"),
    ] {
        let s = spec(name, params);
        let c = generate(&s).map_err(|e| e.to_string())?;
        let p1 = s.u64("p1").unwrap();
        let p2 = s.u64("p2").unwrap_or(2);
        ensure(building_coset_check(&c, p1, p2).pass(), || format!("cosets {name}({params})"))?;
    }
    Ok(format!("{total} random complexes {per_case:?}"))
}

fn criterion_6() -> Outcome {
    for n in [3u64, 4, 5] {
        for k in [1usize, 2, 3] {
            let g = covol::families::family_ga_k(n, k).map_err(|e| e.to_string())?;
            let base = g.complex().find("b1").ok_or("no base")?;
            let ball = bass_serre_ball(&g, base, 6).map_err(|e| e.to_string())?;
            ensure(ball.is_biregular(n as usize, 2), || format!("GA n={n} k={k} not biregular"))?;
            let q = quotient_check(&ball, &g);
            ensure(q.status == CheckStatus::Pass, || format!("quotient n={n} k={k}: {q:?}"))?;
        }
    }
    let ball = davis_ball(&CoxeterMatrix::triangle(3, 3, 3), DavisExtent::Radius(4), ColorScheme::Davis).map_err(|e| e.to_string())?;
    let kinds = ball.interior_by_kind();
    let mut auts = Vec::new();
    for (kind, len) in [("{}", 6usize), ("{0}", 4), ("{0,1}", 12)] {
        let v = *kinds.get(kind).and_then(|vs| vs.first()).ok_or(format!("no interior {kind}"))?;
        let l = ball.interior_link(v).map_err(|e| e.to_string())?;
        let cycle = l.vertex_count() == len && l.edge_count() == len && l.components().len() == 1 && l.adjacency().iter().all(|a| a.len() == 2);
        ensure(cycle, || format!("link of {kind} is not a {len}-cycle"))?;
        auts.push(aut_order(&l));
    }
    let lcm = auts.iter().fold(1u64, |a, b| a.lcm(b));
    ensure(auts == [12, 8, 24] && lcm == 24, || format!("aut orders {auts:?}"))?;
    let b = building_ball(&CoxeterMatrix::free(2), &[3, 2], 6, ColorScheme::Building).map_err(|e| e.to_string())?;
    ensure(panel_graph(&b).is_biregular(3, 2), || "building not (3,2)-biregular".into())?;
    Ok("aut orders [12, 8, 24], lcm 24".into())
}

fn criterion_7() -> Outcome {
    let w0 = CoxeterMatrix::triangle(3, 3, 3);
    ensure(w0.count_ends() == EndsCount::One, || "W0 ends".into())?;
    ensure(CoxeterMatrix::free(2).count_ends() == EndsCount::Two, || "free(2) ends".into())?;
    let mut instances = 0;
    for m in [2u64, 3, 4, 5] {
        for x in [2usize, 3] {
            for j in [3usize, 4, 5] {
                let w = CoxeterMatrix::free_product(&[CoxeterMatrix::cycle(2 * x, m), CoxeterMatrix::free(j)]);
                ensure(w.count_ends() == EndsCount::Infinity, || format!("ends m={m} x={x} j={j}"))?;
                instances += 1;
            }
        }
    }
    for n in 3..=8 {
        ensure(CoxeterMatrix::free(n).is_flexible().map_err(|e| e.to_string())?, || format!("free({n}) not flexible"))?;
    }
    ensure(!w0.is_flexible().map_err(|e| e.to_string())?, || "W0 flexible".into())?;
    Ok(format!("{instances} infinitely-ended instances"))
}

fn criterion_8() -> Outcome {
    let argv: Vec<String> = ["covol", "verify", "--suite", "paper"].map(String::from).to_vec();
    let a = execute(&argv).map_err(|e| e.to_string())?;
    let b = execute(&argv).map_err(|e| e.to_string())?;
    ensure(a.report.pass, || format!("verify failed: {:?}", a.report.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>()))?;
    ensure(a.rendered() == b.rendered(), || "json differs".into())?;
    let ta = covol::cli::Outcome { format: covol::cli::Format::Text, ..a.clone() };
    let tb = covol::cli::Outcome { format: covol::cli::Format::Text, ..b };
    ensure(ta.rendered() == tb.rendered(), || "text differs".into())?;
    let (checks, _, _) = verify_paper();
    ensure(checks == a.report.checks, || "suite checks differ".into())?;
    Ok(format!("{} bytes", a.rendered().len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 8] = [
        ("1 tree-family exactness", criterion_1, Some(Duration::from_secs(1))),
        ("2 denominator divisibility", criterion_2, Some(Duration::from_secs(1))),
        ("3 platform-tower exactness", criterion_3, Some(Duration::from_secs(2))),
        ("4 building families", criterion_4, Some(Duration::from_secs(2))),
        ("5 link calculus", criterion_5, Some(Duration::from_secs(5))),
        ("6 covers", criterion_6, Some(Duration::from_secs(10))),
        ("7 coxeter diagnostics", criterion_7, Some(Duration::from_secs(1))),
        ("8 determinism", criterion_8, None),
    ];
    let mut failed = 0;
    for (name, f, limit) in criteria {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let slow = limit.is_some_and(|l| elapsed > l);
        let limit_text = limit.map(|l| format!(" (limit {} s)", l.as_secs())).unwrap_or_default();
        let (status, detail) = match (&outcome, slow) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("too slow; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} criterion {name}: {:.3} s{limit_text}  {detail}", elapsed.as_secs_f64());
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
