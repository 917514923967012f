//! The published example schemes and their connectivity/resiliency tables.

use crate::error::Result;
use crate::fixtures::{gd_pairing, nine_point_bib};
use crate::metrics::{BetaMode, ConnectivityReport, FailMode, ResiliencyReport};
use crate::report::{connectivity_rows, resiliency_rows, Table};
use crate::spec::{DesignSpec, RunSpec, SchemeSpec};

pub const ETAS: [u32; 8] = [1, 2, 3, 4, 5, 10, 15, 20];
pub const SS: [u32; 8] = [1, 2, 3, 4, 5, 6, 8, 10];

#[derive(Debug, Clone)]
pub struct BenchmarkCase {
    pub id: &'static str,
    pub spec: RunSpec,
}

fn case(id: &'static str, first: DesignSpec, g: usize, with_fail: bool) -> BenchmarkCase {
    BenchmarkCase {
        id,
        spec: RunSpec {
            designs: vec![first, DesignSpec::Sts { g }],
            q: Some(2),
            eta: ETAS.to_vec(),
            s: if with_fail { SS.to_vec() } else { Vec::new() },
            beta_mode: BetaMode::Approx,
            fail_mode: FailMode::Approx,
            oracle: Default::default(),
        },
    }
}

fn gd(a: usize, f: usize) -> DesignSpec {
    DesignSpec::Pbib2 { scheme: SchemeSpec::Gd { a, f } }
}

fn triangular(m: usize) -> DesignSpec {
    DesignSpec::Pbib2 { scheme: SchemeSpec::Triangular { m } }
}

fn latin(p: usize, k: usize) -> DesignSpec {
    DesignSpec::LatinPbib { p, k, squares: None }
}

/// The 54-node toy scheme followed by the six two-design examples.
pub fn benchmark_cases() -> Vec<BenchmarkCase> {
    let mut toy = case("toy", DesignSpec::explicit(&gd_pairing()), 4, false);
    toy.spec.designs[1] = DesignSpec::explicit(&nine_point_bib());
    vec![
        toy,
        case("gd-2-21-sts-25", gd(2, 21), 25, true),
        case("gd-2-23-sts-22", gd(2, 23), 22, true),
        case("tri-9-sts-27", triangular(9), 27, true),
        case("tri-8-sts-31", triangular(8), 31, true),
        case("latin-17-12-sts-28", latin(17, 12), 28, true),
        case("latin-19-13-sts-28", latin(19, 13), 28, true),
    ]
}

/// Size rows, `Pr_1`, `Pr_2` and `Pr_1 + Pr_2` per `eta`, and `fail(s)`.
pub fn compute_table(case: &BenchmarkCase, places: u32) -> Result<Table> {
    let kps = case.spec.build_kps()?;
    let mut t = Table::new(format!("benchmark {}", case.id));
    t.push("v", "", kps.v());
    t.push("n", "", kps.n());
    t.push("k", "", kps.k());
    for (tuple, mu) in kps.mu_table() {
        t.push("mu", &tuple, mu);
    }
    t.extend(connectivity_rows(&ConnectivityReport::compute(&kps, &case.spec.eta, case.spec.beta_mode), places));
    if !case.spec.s.is_empty() {
        let r = ResiliencyReport::compute(&kps, &case.spec.s, case.spec.fail_mode)?;
        t.extend(resiliency_rows(&r, places));
    }
    Ok(t)
}
