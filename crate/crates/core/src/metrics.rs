//! Connectivity and resiliency of a [`Kps`].
//!
//! Every quantity is a rational function of the association tables, so the
//! formulas are generic over [`Scalar`]: evaluate in [`BigRational`] for
//! exact values, in `f64` for speed.

use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kps::{AssocTuple, Kps};
use crate::scalar::{render_f64, render_rational, Scalar};

/// How the two-hop probability `beta` treats the neighbourhood sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BetaMode {
    /// Hypergeometric: `eta` distinct nodes drawn from the other `n - 2`.
    Exact,
    /// Binomial approximation `1 - (1 - mu/(n-2))^eta`.
    #[default]
    Approx,
}

/// How `fail(s)` evaluates the probability that compromised nodes avoid a
/// set of blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FailMode {
    /// `(sigma / (n - 2))^s`, the closed form with the `xi` products.
    #[default]
    Approx,
    /// `C(sigma, s) / C(n - 2, s)` inside the inclusion-exclusion sum.
    Exact,
}

impl fmt::Display for BetaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BetaMode::Exact => "exact",
            BetaMode::Approx => "approx",
        })
    }
}

impl fmt::Display for FailMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailMode::Exact => "exact",
            FailMode::Approx => "approx",
        })
    }
}

fn sum_n(kps: &Kps, tuples: &[AssocTuple]) -> u128 {
    tuples.iter().map(|t| kps.n_count(t).expect("tuple from I") as u128).sum()
}

/// Probability that two random nodes share at least `q` keys.
pub fn pr1<S: Scalar>(kps: &Kps) -> S {
    S::from_ratio(sum_n(kps, kps.delta()), kps.n() as u128 - 1)
}

/// Probability that at least one of `eta` neighbours is among the `mu`
/// common neighbours, out of `n - 2` candidates.
pub fn beta<S: Scalar>(n: u64, mu: u64, eta: u32, mode: BetaMode) -> Result<S> {
    let m = n.saturating_sub(2);
    if mu > m {
        return Err(Error::MuOutOfRange { mu, limit: m });
    }
    if mu == 0 || eta == 0 {
        return Ok(S::zero());
    }
    Ok(match mode {
        BetaMode::Approx => S::one() - S::from_ratio((m - mu) as u128, m as u128).powu(eta),
        BetaMode::Exact => {
            let mut miss = S::one();
            for i in 0..eta as u64 {
                if m - mu <= i {
                    return Ok(S::one());
                }
                miss = miss * S::from_ratio((m - mu - i) as u128, (m - i) as u128);
            }
            S::one() - miss
        }
    })
}

/// Probability that two random nodes without a direct link have a common
/// directly linked neighbour among `eta` shared neighbours.
pub fn pr2<S: Scalar>(kps: &Kps, eta: u32, mode: BetaMode) -> S {
    let n = kps.n();
    kps.mu_table().into_iter().fold(S::zero(), |acc, (t, mu)| {
        let weight = S::from_ratio(kps.n_count(&t).expect("tuple from I") as u128, n as u128 - 1);
        acc + weight * beta::<S>(n, mu, eta, mode).expect("mu bounded by n - 2")
    })
}

/// `Pr_1 + Pr_2`.
pub fn pr<S: Scalar>(kps: &Kps, eta: u32, mode: BetaMode) -> S {
    pr1::<S>(kps) + pr2::<S>(kps, eta, mode)
}

/// `(1 - Pr_1) beta*` with `beta*` at the smallest `mu` outside `Delta`.
pub fn pr2_lower_bound<S: Scalar>(kps: &Kps, eta: u32, mode: BetaMode) -> Result<S> {
    let mu_min = kps.mu_table().into_iter().map(|(_, mu)| mu).min().ok_or(Error::EmptyDeltaBar)?;
    Ok((S::one() - pr1::<S>(kps)) * beta::<S>(kps.n(), mu_min, eta, mode)?)
}

fn one_minus_pow<S: Scalar>(num: u128, den: u128, s: u32) -> S {
    S::one() - S::from_ratio(num, den).powu(s)
}

/// `xi_{j_1...j_t}` for `s` compromised nodes.
pub fn xi<S: Scalar>(kps: &Kps, t: &AssocTuple, s: u32) -> S {
    t.0.iter().zip(kps.duals()).fold(S::one(), |acc, (&j, d)| {
        let b = d.b() as u128;
        let factor = match j {
            0 => one_minus_pow(b - 1, b, s),
            1 => S::one(),
            _ => one_minus_pow(b - d.r() as u128, b, s),
        };
        acc * factor
    })
}

/// A `fail(s)` value with the precondition status it was computed under.
#[derive(Debug, Clone, PartialEq)]
pub struct Fail<S> {
    pub value: S,
    pub warning: Option<String>,
}

fn fail_warning(kps: &Kps, s: u32) -> Option<String> {
    let min_k = kps.duals().iter().map(|d| d.k()).min().unwrap_or(0);
    (kps.t() > 1 && s as usize >= min_k)
        .then(|| format!("s = {s} is not below min k_i = {min_k}; the closed form is not guaranteed"))
}

/// Probability that a direct link is broken when `s` random other nodes are
/// compromised (all shared keys exposed).
pub fn fail_s<S: Scalar>(kps: &Kps, s: u32, mode: FailMode) -> Result<Fail<S>> {
    let n = kps.n();
    if s as u64 > n - 2 {
        return Err(Error::param("s", format!("at most n - 2 = {} nodes can be compromised", n - 2)));
    }
    let warning = fail_warning(kps, s);
    if s == 0 {
        return Ok(Fail { value: S::zero(), warning });
    }
    let total = S::from_count(sum_n(kps, kps.delta()));
    let value = match mode {
        FailMode::Approx => {
            let c = S::from_ratio(n as u128, n as u128 - 2).powu(s);
            let weighted = kps.delta().iter().fold(S::zero(), |acc, t| {
                acc + S::from_count(kps.n_count(t).expect("tuple from I") as u128) * xi::<S>(kps, t, s)
            });
            S::one() - c.clone() + c * weighted / total
        }
        FailMode::Exact => {
            let weighted = kps.delta().iter().fold(S::zero(), |acc, t| {
                acc + S::from_count(kps.n_count(t).expect("tuple from I") as u128) * fail_given(kps, t, s)
            });
            weighted / total
        }
    };
    Ok(Fail { value, warning })
}

/// `P(F | E(t))` by inclusion-exclusion over the designs sharing keys.
fn fail_given<S: Scalar>(kps: &Kps, t: &AssocTuple, s: u32) -> S {
    let n = kps.n() as u128;
    let omega: Vec<usize> = (0..kps.t()).filter(|&i| t.0[i] != 1).collect();
    let mut value = S::one();
    for mask in 1u32..(1 << omega.len()) {
        let mut sigma = n;
        for (bit, &i) in omega.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                let d = &kps.duals()[i];
                let delta = if t.0[i] == 0 { 1 } else { d.r() as u128 };
                sigma = sigma / d.b() as u128 * (d.b() as u128 - delta);
            }
        }
        let mut avoid = S::one();
        for l in 0..s as u128 {
            if sigma <= l {
                avoid = S::zero();
                break;
            }
            avoid = avoid * S::from_ratio(sigma - l, n - 2 - l);
        }
        if mask.count_ones() % 2 == 1 {
            value = value - avoid;
        } else {
            value = value + avoid;
        }
    }
    value
}

/// Exponents above this are evaluated in `f64` rather than exactly.
pub const EXACT_EXPONENT_LIMIT: u32 = 64;

/// A probability carried exactly when feasible, always with an `f64` view.
#[derive(Debug, Clone, PartialEq)]
pub struct Value {
    pub exact: Option<BigRational>,
    pub float: f64,
}

impl Value {
    pub fn exact(q: BigRational) -> Self {
        Value { float: Scalar::to_f64(&q), exact: Some(q) }
    }

    pub fn float(x: f64) -> Self {
        Value { exact: None, float: x }
    }

    /// Decimal rendering, rounding half to even when exact.
    pub fn render(&self, places: u32) -> String {
        match &self.exact {
            Some(q) => render_rational(q, places),
            None => render_f64(self.float, places),
        }
    }
}

fn eval(exponent: u32, exact: impl FnOnce() -> BigRational, float: impl FnOnce() -> f64) -> Value {
    if exponent <= EXACT_EXPONENT_LIMIT {
        Value::exact(exact())
    } else {
        Value::float(float())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityReport {
    pub mode: BetaMode,
    pub pr1: Value,
    pub pr2_by_eta: Vec<(u32, Value)>,
    pub pr_by_eta: Vec<(u32, Value)>,
    pub mu_table: Vec<(AssocTuple, u64)>,
    pub n_table: Vec<(AssocTuple, u64)>,
}

impl ConnectivityReport {
    pub fn compute(kps: &Kps, etas: &[u32], mode: BetaMode) -> Self {
        let pr1 = Value::exact(pr1::<BigRational>(kps));
        let pr2_by_eta: Vec<(u32, Value)> = etas
            .iter()
            .map(|&eta| (eta, eval(eta, || pr2::<BigRational>(kps, eta, mode), || pr2::<f64>(kps, eta, mode))))
            .collect();
        let pr_by_eta = pr2_by_eta
            .iter()
            .map(|(eta, p2)| {
                let sum = match (&pr1.exact, &p2.exact) {
                    (Some(a), Some(b)) => Value::exact(a + b),
                    _ => Value::float(pr1.float + p2.float),
                };
                (*eta, sum)
            })
            .collect();
        ConnectivityReport { mode, pr1, pr2_by_eta, pr_by_eta, mu_table: kps.mu_table(), n_table: kps.n_table() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResiliencyReport {
    pub mode: FailMode,
    pub fail_by_s: Vec<(u32, Value)>,
    /// `xi` per `Delta` tuple, aligned with `fail_by_s`.
    pub xi_table: Vec<(AssocTuple, Vec<Value>)>,
    pub warnings: Vec<String>,
}

impl ResiliencyReport {
    pub fn compute(kps: &Kps, ss: &[u32], mode: FailMode) -> Result<Self> {
        let mut fail_by_s = Vec::with_capacity(ss.len());
        let mut warnings = Vec::new();
        for &s in ss {
            let value = if s <= EXACT_EXPONENT_LIMIT {
                let f = fail_s::<BigRational>(kps, s, mode)?;
                warnings.extend(f.warning);
                Value::exact(f.value)
            } else {
                let f = fail_s::<f64>(kps, s, mode)?;
                warnings.extend(f.warning);
                Value::float(f.value)
            };
            fail_by_s.push((s, value));
        }
        let xi_table = kps
            .delta()
            .iter()
            .map(|t| {
                let row = ss
                    .iter()
                    .map(|&s| eval(s, || xi::<BigRational>(kps, t, s), || xi::<f64>(kps, t, s)))
                    .collect();
                (t.clone(), row)
            })
            .collect();
        Ok(ResiliencyReport { mode, fail_by_s, xi_table, warnings })
    }
}

/// Engine output against the closed forms for the single-design
/// Latin-square scheme (a transversal design of `k` groups of `p` keys on
/// `p^2` nodes).
#[derive(Debug, Clone, PartialEq)]
pub struct LeeStinsonReport {
    pub p: usize,
    pub k: usize,
    /// `(quantity, engine, closed form)`.
    pub rows: Vec<(String, f64, f64)>,
}

impl LeeStinsonReport {
    pub fn max_abs_diff(&self) -> f64 {
        self.rows.iter().map(|(_, a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn is_pass(&self, tol: f64) -> bool {
        self.max_abs_diff() <= tol
    }
}

pub fn lee_stinson_check(p: usize, k: usize, etas: &[u32], ss: &[u32]) -> Result<LeeStinsonReport> {
    use crate::design::latin_square_pbib;
    use crate::scheme::cyclic_mols;

    if k < 2 {
        return Err(Error::param("k", "need at least rows and columns"));
    }
    let squares = cyclic_mols(p, k - 2)?;
    let dual = latin_square_pbib(p, k, &squares)?.dual()?;
    let kps = Kps::build(vec![dual], 1)?;
    let q = |n: u128, d: u128| <BigRational as Scalar>::from_ratio(n, d);
    let one = || q(1, 1);
    let (pu, ku) = (p as u128, k as u128);
    let mut rows = Vec::new();
    let closed_pr1 = q(ku, pu + 1);
    rows.push(("pr1".to_string(), Scalar::to_f64(&pr1::<BigRational>(&kps)), Scalar::to_f64(&closed_pr1)));
    for &eta in etas {
        let closed = (one() - closed_pr1.clone()) * (one() - (one() - q(ku * (ku - 1), pu * pu - 2)).powu(eta));
        let engine = pr2::<BigRational>(&kps, eta, BetaMode::Approx);
        rows.push((format!("pr2(eta={eta})"), Scalar::to_f64(&engine), Scalar::to_f64(&closed)));
    }
    for &s in ss {
        let closed = one() - q(pu * pu - pu, pu * pu - 2).powu(s);
        let engine = fail_s::<BigRational>(&kps, s, FailMode::Approx)?.value;
        rows.push((format!("fail(s={s})"), Scalar::to_f64(&engine), Scalar::to_f64(&closed)));
    }
    Ok(LeeStinsonReport { p, k, rows })
}
