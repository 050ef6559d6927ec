//! Exact covolumes, closed forms, limits and convergence data.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::cog::ComplexOfGroups;
use crate::coxeter::CoxeterMatrix;
use crate::families::{b_division, chamber_hat_kprime, finite_davis_op, generate, is_prime, FamilyError, FamilySpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CovolumeError {
    #[error("complex has no measured vertices")]
    NoMeasuredVertices,
    #[error("family {0:?} has no closed form")]
    NoClosedForm(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("series needs k_max >= 2, got {0}")]
    KMax(usize),
    #[error("cannot parse rational {0:?}")]
    Parse(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

type Result<T> = std::result::Result<T, CovolumeError>;

/// Reduced fraction with positive denominator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(numerator: impl Into<BigInt>, denominator: impl Into<BigInt>) -> Self {
        ExactRational(BigRational::new(numerator.into(), denominator.into()))
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        ExactRational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    pub fn one() -> Self {
        Self::integer(1)
    }

    /// `1 / n`.
    pub fn recip_of(n: &BigUint) -> Self {
        ExactRational(BigRational::new(BigInt::one(), BigInt::from(n.clone())))
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn abs(&self) -> Self {
        ExactRational(self.0.abs())
    }

    pub fn pow(&self, e: u32) -> Self {
        ExactRational(num_traits::pow(self.0.clone(), e as usize))
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for ExactRational {
    type Err = CovolumeError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || CovolumeError::Parse(s.to_string());
        let (n, d) = s.trim().split_once('/').unwrap_or((s.trim(), "1"));
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(ExactRational::new(n, d))
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<u64> for ExactRational {
    fn from(n: u64) -> Self {
        Self::integer(n)
    }
}

macro_rules! arith {
    ($tr:ident, $f:ident) => {
        impl $tr for ExactRational {
            type Output = ExactRational;
            fn $f(self, o: ExactRational) -> ExactRational {
                ExactRational(self.0.$f(o.0))
            }
        }
        impl $tr<&ExactRational> for &ExactRational {
            type Output = ExactRational;
            fn $f(self, o: &ExactRational) -> ExactRational {
                ExactRational((&self.0).$f(&o.0))
            }
        }
    };
}
arith!(Add, add);
arith!(Sub, sub);
arith!(Mul, mul);
arith!(Div, div);

impl std::iter::Sum for ExactRational {
    fn sum<I: Iterator<Item = ExactRational>>(it: I) -> Self {
        it.fold(ExactRational::zero(), |a, b| a + b)
    }
}

fn q(n: u64, d: u64) -> ExactRational {
    ExactRational::new(n, d)
}

fn int(n: u64) -> ExactRational {
    ExactRational::integer(n)
}

/// Σ 1/|A_v| over measured vertices.
pub fn serre_covolume(a: &ComplexOfGroups) -> Result<ExactRational> {
    let measured: Vec<usize> = (0..a.vertex_count()).filter(|&v| a.is_measured(v)).collect();
    if measured.is_empty() {
        return Err(CovolumeError::NoMeasuredVertices);
    }
    Ok(measured.iter().map(|&v| ExactRational::recip_of(&a.group(v).order())).sum())
}

/// Σ 1/|A_v| over the vertices of a chamber complex K'-hat.
pub fn omega(kprime_hat: &ComplexOfGroups) -> ExactRational {
    (0..kprime_hat.vertex_count())
        .map(|v| ExactRational::recip_of(&kprime_hat.group(v).order()))
        .sum()
}

/// Exponent of `p` in the reduced denominator of `x`.
pub fn p_adic_valuation(x: &ExactRational, p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(CovolumeError::NotPrime(p));
    }
    let mut d = x.denominator().clone();
    let p = BigInt::from(p);
    let mut v = 0;
    while !d.is_zero() && (&d % &p).is_zero() {
        d /= &p;
        v += 1;
    }
    Ok(v)
}

fn spec_omega(spec: &FamilySpec) -> Result<ExactRational> {
    Ok(omega(&chamber_hat_kprime(&spec.kprime()?)?))
}

fn geometric(r: &ExactRational, from: u32, to: u32) -> ExactRational {
    (from..=to).map(|i| r.pow(i)).sum()
}

/// Chain sum for the B family: c_Ω Ω + 1/p2 + Σ s_e/d^e + q/(p1 d^E) + (q-1)/(p2 d^E).
pub fn b_chain_sum(p1: u64, p2: u64, om: &ExactRational, k: usize) -> ExactRational {
    let d = p2 - 1;
    let (qq, r) = b_division(p1, p2);
    let top = 2 * k as u32 + 2;
    let inv = q(1, d);
    let c_omega = int(qq) + &int(qq + r) * &geometric(&inv, 1, top);
    let reds_greens: ExactRational = (1..=top)
        .map(|e| {
            let s = if e % 2 == 1 { qq } else { r + 2 };
            &int(s) * &inv.pow(e)
        })
        .sum();
    let dt = inv.pow(top);
    &c_omega * om + q(1, p2) + reds_greens + &q(qq, p1) * &dt + &q(qq - 1, p2) * &dt
}

/// The displayed sum for the B family, kept for comparison with the chain.
pub fn b_displayed_sum(p1: u64, p2: u64, om: &ExactRational, k: usize) -> ExactRational {
    let d = p2 - 1;
    let (qq, r) = b_division(p1, p2);
    let block = &(int(qq) + q(r + qq, d) + q(r, d * d)) * om + int(1) + q(qq, d) + q(r + 1, d * d);
    let sum = geometric(&q(1, d * d), 0, k as u32);
    let tail = ExactRational::new(BigInt::one(), BigInt::from(p2) * BigInt::from(d).pow(2 * k as u32 + 1));
    &block * &sum + q(1, p2) - int(1) - tail
}

/// The closed form of a family at `k`.
pub fn closed_form(spec: &FamilySpec, k: usize) -> Result<ExactRational> {
    let s = spec;
    let ku = k as u32;
    match s.name.as_str() {
        "GA" => {
            let n = s.u64("n")?;
            let inv = q(1, n - 1);
            Ok(q(1, 2) + &int(2) * &geometric(&inv, 1, ku) + &q(1, n) * &inv.pow(ku))
        }
        "GpA" => {
            let (n, p) = (s.u64("n")?, s.u64("p")?);
            let c = int(n - p);
            let inv = q(1, p);
            let levels: ExactRational = (1..=ku).map(|i| &(c.pow(i - 1) + c.pow(i)) * &inv.pow(i)).sum();
            Ok(q(1, 2) + levels + &(&c.pow(ku) * &inv.pow(ku)) * &q(1, n))
        }
        "X0" => {
            let (m, x) = (s.u64("m")?, s.u64("x")?);
            let half = q(1, 2);
            let sum = geometric(&half, 0, ku);
            Ok(&(int(1) + int(x) + q(2 * x, m)) * &sum + q(x, m) - &q(x, m) * &half.pow(ku + 1))
        }
        "A" => {
            let p1 = s.u64("p1")?;
            let om = spec_omega(s)?;
            let g = &int(2) * &geometric(&q(1, p1 - 1), 1, ku);
            Ok(&(int(1) + g.clone()) * &om + q(1, 2) + g + &q(1, p1) * &q(1, p1 - 1).pow(ku))
        }
        "B" => Ok(b_chain_sum(s.u64("p1")?, s.u64("p2")?, &spec_omega(s)?, k)),
        other => Err(CovolumeError::NoClosedForm(other.to_string())),
    }
}

/// Limit of the covolume sequence, for the families that have one in closed form.
pub fn limit_value(spec: &FamilySpec) -> Result<ExactRational> {
    let s = spec;
    match s.name.as_str() {
        "GA" | "GA_limit" => Ok(q(1, 2) + q(2, s.u64("n")? - 2)),
        "X0" | "X0_limit" => {
            let (m, x) = (s.u64("m")?, s.u64("x")?);
            Ok(int(2) + int(2 * x) + q(5 * x, m))
        }
        "A" | "A_limit" => {
            let c = q(2, s.u64("p1")? - 2);
            Ok(&(int(1) + c.clone()) * &spec_omega(s)? + q(1, 2) + c)
        }
        "B" | "B_limit" => {
            let (p1, p2) = (s.u64("p1")?, s.u64("p2")?);
            let num = &(&int(p1 * p2) * &spec_omega(s)?) + &int(p1 + p2);
            Ok(&num / &int(p2 * (p2 - 2)))
        }
        "Y0" | "Y0_limit" => {
            let w: CoxeterMatrix = s.coxeter("w")?;
            let davis = finite_davis_op(&w)?;
            let order = davis.chambers.len() as u64;
            Ok(int(davis.complex.vertex_count() as u64) + q(3 * order, 2))
        }
        other => Err(CovolumeError::NoClosedForm(other.to_string())),
    }
}

/// The limit complex of a family, when one is generated.
pub fn limit_spec(spec: &FamilySpec) -> Option<FamilySpec> {
    let name = match spec.name.as_str() {
        "GA" => "GA_limit",
        "X0" => "X0_limit",
        "A" => "A_limit",
        "B" => "B_limit",
        "Y0" => "Y0_limit",
        _ => return None,
    };
    let mut params = spec.params.clone();
    params.remove("k");
    Some(FamilySpec { name: name.to_string(), params })
}

/// How the ratio column of a series is defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioKind {
    /// (x_{k+1} - x_∞) / (x_k - x_∞).
    ToLimit,
    /// (x_{k+1} - x_k) / (x_k - x_{k-1}).
    Difference,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub k: usize,
    pub covolume: ExactRational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<ExactRational>,
    pub ratio: Option<ExactRational>,
    pub valuations: BTreeMap<u64, u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub family: String,
    pub params: BTreeMap<String, String>,
    pub limit: Option<ExactRational>,
    pub ratio_kind: RatioKind,
    pub rows: Vec<SeriesRow>,
}

impl SeriesReport {
    pub fn covolumes(&self) -> Vec<&ExactRational> {
        self.rows.iter().map(|r| &r.covolume).collect()
    }

    /// Ratios that are defined.
    pub fn ratios(&self) -> Vec<&ExactRational> {
        self.rows.iter().filter_map(|r| r.ratio.as_ref()).collect()
    }

    /// Whether every defined ratio is equal to `r`, with at least one defined.
    pub fn ratios_equal(&self, r: &ExactRational) -> bool {
        let rs = self.ratios();
        !rs.is_empty() && rs.iter().all(|x| *x == r)
    }

    /// Whether every generated covolume matches its closed form.
    pub fn closed_forms_match(&self) -> bool {
        self.rows.iter().all(|r| r.closed_form.as_ref().is_none_or(|c| *c == r.covolume))
    }
}

/// Covolume sequence for k = 0..=k_max with ratios and valuations.
pub fn series(spec: &FamilySpec, k_max: usize, primes: &[u64]) -> Result<SeriesReport> {
    if k_max < 2 {
        return Err(CovolumeError::KMax(k_max));
    }
    if let Some(&p) = primes.iter().find(|&&p| !is_prime(p)) {
        return Err(CovolumeError::NotPrime(p));
    }
    let limit = match limit_value(spec) {
        Ok(l) => Some(l),
        Err(CovolumeError::NoClosedForm(_)) => None,
        Err(e) => return Err(e),
    };
    let mut values = Vec::with_capacity(k_max + 1);
    let mut rows = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let kspec = spec.at_k(k);
        let x = serre_covolume(&generate(&kspec)?)?;
        let cf = match closed_form(&kspec, k) {
            Ok(c) => Some(c),
            Err(CovolumeError::NoClosedForm(_)) => None,
            Err(e) => return Err(e),
        };
        let valuations = primes.iter().map(|&p| Ok((p, p_adic_valuation(&x, p)?))).collect::<Result<_>>()?;
        values.push(x.clone());
        rows.push(SeriesRow { k, covolume: x, closed_form: cf, ratio: None, valuations });
    }
    let ratio_kind = if limit.is_some() { RatioKind::ToLimit } else { RatioKind::Difference };
    for k in 1..=k_max {
        let (num, den) = match &limit {
            Some(l) => (&values[k] - l, &values[k - 1] - l),
            None if k >= 2 => (&values[k] - &values[k - 1], &values[k - 1] - &values[k - 2]),
            None => continue,
        };
        if !den.is_zero() {
            rows[k].ratio = Some(&num / &den);
        }
    }
    Ok(SeriesReport { family: spec.name.clone(), params: spec.params.clone(), limit, ratio_kind, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(name: &str, params: &str) -> FamilySpec {
        FamilySpec::parse(name, params).unwrap()
    }

    fn cov(name: &str, params: &str) -> ExactRational {
        serre_covolume(&generate(&spec(name, params)).unwrap()).unwrap()
    }

    #[test]
    fn display_and_parse() {
        assert_eq!(q(10, 4).to_string(), "5/2");
        assert_eq!(int(7).to_string(), "7");
        assert_eq!("6/4".parse::<ExactRational>().unwrap(), q(3, 2));
        assert!("1/0".parse::<ExactRational>().is_err());
        assert_eq!(serde_json::to_string(&q(119, 20)).unwrap(), "\"119/20\"");
    }

    #[test]
    fn covolume_examples() {
        assert_eq!(cov("GA", "n=3,k=1"), q(5, 3));
        assert_eq!(cov("GA", "n=3,k=2"), q(25, 12));
        assert_eq!(cov("GA_limit", "n=4"), q(3, 2));
        assert_eq!(cov("GpA", "n=5,p=2,k=2"), q(119, 20));
        assert_eq!(cov("polygon", "alpha=2,beta=2"), int(4));
        assert_eq!(cov("X0", "m=3,x=2,k=1"), int(7));
        assert_eq!(cov("A", "p1=3,k=0"), q(11, 6));
        assert_eq!(cov("B_limit", "p1=3,p2=3"), int(5));
        let empty = crate::cog::ComplexBuilder::new().build().unwrap();
        assert_eq!(serre_covolume(&empty), Err(CovolumeError::NoMeasuredVertices));
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(closed_form(&spec("GA", "n=4"), 2).unwrap(), q(17, 12));
        assert_eq!(closed_form(&spec("X0", "m=3,x=2"), 1).unwrap(), int(7));
        assert_eq!(limit_value(&spec("B", "p1=4,p2=3")).unwrap(), q(19, 3));
        assert!(matches!(closed_form(&spec("H", "p=2,p1=3,p2=3"), 1), Err(CovolumeError::NoClosedForm(_))));
    }

    #[test]
    fn omega_values() {
        let om = |s: &str| omega(&chamber_hat_kprime(&crate::families::KPrime::parse(s).unwrap()).unwrap());
        assert_eq!(om(""), int(1));
        assert_eq!(om("2x3"), int(2));
        assert_eq!(om("2*3"), q(11, 6));
    }

    #[test]
    fn valuations() {
        assert_eq!(p_adic_valuation(&q(5, 12), 2).unwrap(), 2);
        assert_eq!(p_adic_valuation(&q(5, 12), 3).unwrap(), 1);
        assert_eq!(p_adic_valuation(&q(5, 12), 4), Err(CovolumeError::NotPrime(4)));
    }

    #[test]
    fn series_ratios() {
        let r = series(&spec("GA", "n=4"), 6, &[3]).unwrap();
        assert_eq!(r.limit, Some(q(3, 2)));
        assert!(r.ratios_equal(&q(1, 3)));
        assert!(r.closed_forms_match());
        let r = series(&spec("GpA", "n=5,p=2"), 3, &[2]).unwrap();
        assert_eq!(r.rows[2].valuations[&2], 2);
        assert!(series(&spec("GA", "n=4"), 1, &[]).is_err());
    }

    #[test]
    fn b_chain_properties() {
        for (p1, p2) in [(3, 3), (4, 3), (5, 3), (5, 4), (7, 4)] {
            let s = spec("B", &format!("p1={p1},p2={p2}"));
            let r = series(&s, 3, &[]).unwrap();
            assert!(r.closed_forms_match());
            assert!(r.ratios_equal(&q(1, (p2 - 1) * (p2 - 1))));
            let lim = cov("B_limit", &format!("p1={p1},p2={p2}"));
            assert_eq!(Some(lim), r.limit);
        }
        // constant part of any realisable sum is c_Ω (1/p1 + 1/p2)
        let (p1, p2) = (3, 3);
        let shown = b_displayed_sum(p1, p2, &int(0), 0);
        let c_omega = &(&b_displayed_sum(p1, p2, &int(1), 0) - &shown);
        assert_ne!(shown, c_omega * &(q(1, p1) + q(1, p2)));
    }
}
