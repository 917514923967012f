//! One test per acceptance criterion; each prints a `PASS`/`FAIL` line.

use std::time::{Duration, Instant};

use kps_core::design::{
    latin_square_pbib, pbib_second_associates, steiner_triple_bose, steiner_triple_skolem, verify_bib,
    verify_pbib, BlockDesign,
};
use kps_core::fixtures::toy_kps;
use kps_core::metrics::{self, fail_s, lee_stinson_check, pr1, pr2, BetaMode, FailMode};
use kps_core::oracle::{exact_fail, exact_mu, exact_pr1, mc_fail, mc_two_hop, McConfig, DEFAULT_CAP};
use kps_core::scalar::render_rational;
use kps_core::scheme::{cyclic_mols, AssociationScheme};
use kps_core::sharedkey::{GdStsFamily, KeyLabel, NodeLabel};
use kps_core::tables::{compute_table, benchmark_cases, ETAS, SS};
use kps_core::{AssocTuple, Exact, Kps, Scalar};

fn report(criterion: u32, pass: bool, detail: &str) {
    println!("criterion {criterion}: {} - {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn t(s: &str) -> AssocTuple {
    AssocTuple::parse(s).unwrap()
}

fn ratio(n: u128, d: u128) -> Exact {
    <Exact as Scalar>::from_ratio(n, d)
}

fn one() -> Exact {
    ratio(1, 1)
}

#[test]
fn criterion_1_toy_example() {
    let start = Instant::now();
    let kps = toy_kps();
    let n_table: Vec<u64> = kps.n_table().into_iter().map(|(_, c)| c).collect();
    let mu = kps.mu(&t("12")).unwrap();
    let pr1_text = render_rational(&pr1::<Exact>(&kps), 4);
    let expected = ["0.8665", "0.9409", "0.9739", "0.9884", "0.9949", "0.9999", "1.0000", "1.0000"];
    let row_ok = ETAS.iter().zip(expected).all(|(&eta, want)| {
        let got = metrics::pr::<f64>(&kps, eta, BetaMode::Approx);
        (got - want.parse::<f64>().unwrap()).abs() <= 0.0001 + 1e-9
    });
    let elapsed = start.elapsed();
    let pass = (kps.n(), kps.k()) == (54, 7)
        && n_table == [8, 2, 16, 3, 24]
        && mu == 29
        && pr1_text == "0.6981"
        && row_ok
        && elapsed < Duration::from_secs(1);
    report(
        1,
        pass,
        &format!("n={} k={} n-table={n_table:?} mu12={mu} Pr1={pr1_text} row_ok={row_ok} in {elapsed:?}", kps.n(), kps.k()),
    );
}

struct Golden {
    id: &'static str,
    vnk: (usize, u64, usize),
    pr1: &'static str,
    pr2: [&'static str; 8],
    pr: [&'static str; 8],
    fail: [&'static str; 8],
}

const GOLDEN: [Golden; 6] = [
    Golden {
        id: "gd-2-21-sts-25",
        vnk: (866, 2142, 46),
        pr1: "0.5329",
        pr2: [".2342", ".3510", ".4092", ".4382", ".4527", ".4667", ".4671", ".4671"],
        pr: [".7671", ".8839", ".9421", ".9711", ".9856", ".9996", "1", "1"],
        fail: [".0021", ".0089", ".0198", ".0340", ".0510", ".0703", ".1141", ".1624"],
    },
    Golden {
        id: "gd-2-23-sts-22",
        vnk: (859, 2070, 45),
        pr1: "0.5321",
        pr2: [".2346", ".3516", ".4099", ".4390", ".4535", ".4675", ".4679", ".4679"],
        pr: [".7667", ".8837", ".9420", ".9711", ".9856", ".9996", "1", "1"],
        fail: [".0022", ".0093", ".0206", ".0352", ".0527", ".0724", ".1169", ".1658"],
    },
    Golden {
        id: "tri-9-sts-27",
        vnk: (873, 1980, 48),
        pr1: "0.6180",
        pr2: [".1620", ".2553", ".3091", ".3400", ".3578", ".3805", ".3819", ".3820"],
        pr: [".7800", ".8733", ".9271", ".9580", ".9758", ".9985", ".9999", "1"],
        fail: [".0021", ".0094", ".0210", ".0362", ".0544", ".0750", ".1216", ".1728"],
    },
    Golden {
        id: "tri-8-sts-31",
        vnk: (861, 1764, 46),
        pr1: "0.5780",
        pr2: [".1538", ".2515", ".3136", ".3531", ".3782", ".4175", ".4215", ".4220"],
        pr: [".7318", ".8295", ".8916", ".9311", ".9562", ".9955", ".9995", "1"],
        fail: [".0023", ".0103", ".0230", ".0396", ".0593", ".0815", ".1312", ".1853"],
    },
    Golden {
        id: "latin-17-12-sts-28",
        vnk: (736, 16473, 40),
        pr1: "0.6736",
        pr2: [".1515", ".2327", ".2762", ".2995", ".3120", ".3258", ".3264", ".3264"],
        pr: [".8251", ".9063", ".9498", ".9731", ".9856", ".9994", "1", "1"],
        fail: [".0030", ".0115", ".0244", ".0410", ".0606", ".0826", ".1320", ".1857"],
    },
    Golden {
        id: "latin-19-13-sts-28",
        vnk: (779, 20577, 41),
        pr1: "0.6571",
        pr2: [".1508", ".2353", ".2826", ".3091", ".3240", ".3419", ".3428", ".3429"],
        pr: [".8079", ".8924", ".9397", ".9662", ".9811", ".9990", ".9999", "1"],
        fail: [".0028", ".0104", ".0221", ".0372", ".0551", ".0753", ".1209", ".1710"],
    },
];

fn close(got: &str, want: &str) -> bool {
    let g: f64 = got.parse().unwrap();
    let w: f64 = want.parse().unwrap();
    (g - w).abs() <= 0.0001 + 1e-9
}

#[test]
fn criterion_2_golden_tables() {
    let start = Instant::now();
    let cases = benchmark_cases();
    let mut failures = Vec::new();
    let mut cells = 0;
    for golden in &GOLDEN {
        let case = cases.iter().find(|c| c.id == golden.id).unwrap();
        let table = compute_table(case, 4).unwrap();
        let get = |m: &str, p: &str| table.get(m, p).unwrap().to_string();
        let vnk = (get("v", "").parse().unwrap(), get("n", "").parse().unwrap(), get("k", "").parse().unwrap());
        if vnk != golden.vnk {
            failures.push(format!("{} v/n/k {vnk:?}", golden.id));
        }
        let mut check = |metric: &str, param: String, want: &str| {
            cells += 1;
            let got = get(metric, &param);
            if !close(&got, want) {
                failures.push(format!("{} {metric}({param}) = {got}, published {want}", golden.id));
            }
        };
        check("pr1", String::new(), golden.pr1);
        for (i, eta) in ETAS.iter().enumerate() {
            check("pr2", eta.to_string(), golden.pr2[i]);
            check("pr", eta.to_string(), golden.pr[i]);
        }
        for (i, s) in SS.iter().enumerate() {
            check("fail", s.to_string(), golden.fail[i]);
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && elapsed < Duration::from_secs(5);
    report(2, pass, &format!("{cells} cells over 6 tables, mismatches {failures:?}, in {elapsed:?}"));
}

#[test]
fn criterion_3_oracle_equivalence() {
    let start = Instant::now();
    let fam = GdStsFamily::new(2, 3, 4).unwrap();
    let kps = fam.kps();
    let pr1_ok = exact_pr1(kps, DEFAULT_CAP).unwrap() == pr1::<Exact>(kps);
    let mut pairs = 0;
    let mut lambda_bad = 0;
    let mut mu_checked = 0;
    let mut mu_bad = 0;
    for i in 0..kps.n() {
        for j in i + 1..kps.n() {
            let (a, b) = (kps.node_at(i), kps.node_at(j));
            let ka = kps.node_keys(&a).unwrap();
            let shared = kps.node_keys(&b).unwrap().iter().filter(|k| ka.contains(k)).count() as u64;
            let tuple = kps.assoc_tuple(&a, &b).unwrap();
            pairs += 1;
            lambda_bad += u64::from(shared != kps.lambda_count(&tuple).unwrap());
            if !kps.in_delta(&tuple) {
                mu_checked += 1;
                mu_bad += u64::from(exact_mu(kps, &a, &b, DEFAULT_CAP).unwrap() != kps.mu(&tuple).unwrap());
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = pr1_ok && pairs == 1431 && lambda_bad == 0 && mu_bad == 0 && elapsed < Duration::from_secs(10);
    report(
        3,
        pass,
        &format!(
            "exact Pr1 equal: {pr1_ok}; {pairs} pairs, {lambda_bad} lambda mismatches; {mu_checked} non-linked pairs, {mu_bad} mu mismatches; in {elapsed:?}"
        ),
    );
}

#[test]
fn criterion_4_lee_stinson() {
    let mut worst: f64 = 0.0;
    let mut pr1s = Vec::new();
    for (p, k) in [(7, 4), (17, 12)] {
        let r = lee_stinson_check(p, k, &ETAS, &SS).unwrap();
        worst = worst.max(r.max_abs_diff());
        pr1s.push(r.rows[0].1);
    }
    let pass = worst <= 1e-12 && pr1s[0] == 0.5;
    report(4, pass, &format!("(7,4) and (17,12): max |engine - closed form| = {worst:e}, Pr1 = {pr1s:?}"));
}

fn two_design(first: BlockDesign, g: usize) -> Kps {
    let sts = steiner_triple_bose(g).unwrap();
    Kps::build(vec![first.dual().unwrap(), sts.dual().unwrap()], 2).unwrap()
}

#[test]
fn criterion_5_closed_forms() {
    let mut worst: f64 = 0.0;
    let mut checks = 0;
    let mut record = |engine: &Exact, closed: &Exact| {
        checks += 1;
        worst = worst.max((Scalar::to_f64(engine) - Scalar::to_f64(closed)).abs());
    };

    // single PBIB dual, q = 1
    for scheme in [
        AssociationScheme::group_divisible(3, 4).unwrap(),
        AssociationScheme::triangular(7).unwrap(),
        AssociationScheme::latin_square(5, 3, &cyclic_mols(5, 1).unwrap()).unwrap(),
    ] {
        let d = pbib_second_associates(&scheme).unwrap().dual().unwrap();
        let (th, b) = (d.theta(), d.b() as u128);
        let phi = d.phi().get(1, 2, 2) as u128;
        let kps = Kps::build(vec![d], 1).unwrap();
        record(&pr1(&kps), &ratio(th[2] as u128, b - 1));
        for eta in [1, 5] {
            let closed = ratio(th[1] as u128, b - 1) * (one() - (one() - ratio(phi, b - 2)).powu(eta));
            record(&pr2(&kps, eta, BetaMode::Approx), &closed);
        }
    }

    // PBIB x BIB, q = 2, in the three families with their closed-form parameters
    let general = |kps: &Kps, record: &mut dyn FnMut(&Exact, &Exact)| {
        let (d1, d2) = (&kps.duals()[0], &kps.duals()[1]);
        let (b1, b2) = (d1.b() as u128, d2.b() as u128);
        let (t1, t2) = (d1.theta(), d2.theta());
        let n = b1 * b2;
        let pr1_closed = ratio(b1 + b2 - 2 + (t1[2] * t2[2]) as u128, n - 1);
        record(&pr1(kps), &pr1_closed);
        let (p12, p22, q22) = (d1.phi().get(1, 1, 2), d1.phi().get(1, 2, 2), d2.phi().get(2, 2, 2));
        let mu = 2 + 2 * p12 + 2 * p22 + p22 * q22;
        record(&ratio(kps.mu(&t("12")).unwrap() as u128, 1), &ratio(mu as u128, 1));
        for eta in [1, 3, 10] {
            let closed = ratio((t1[1] * t2[2]) as u128, n - 1) * (one() - (one() - ratio(mu as u128, n - 2)).powu(eta));
            record(&pr2(kps, eta, BetaMode::Approx), &closed);
        }
        mu
    };
    for (a, f, g) in [(2, 3, 4), (3, 4, 7), (2, 21, 25)] {
        let kps = two_design(pbib_second_associates(&AssociationScheme::group_divisible(a, f).unwrap()).unwrap(), g);
        let mu = general(&kps, &mut record);
        record(&ratio(mu as u128, 1), &ratio((2 + (a - 1) * f * (2 * g + 1)) as u128, 1));
    }
    for (m, g) in [(5, 4), (6, 10), (9, 13)] {
        let kps = two_design(pbib_second_associates(&AssociationScheme::triangular(m).unwrap()).unwrap(), g);
        let mu = general(&kps, &mut record);
        let c = (m - 3) * (m - 4) / 2;
        record(&ratio(mu as u128, 1), &ratio((2 * (m - 2) + c * (2 * g + 1)) as u128, 1));
    }
    for (p, k, g) in [(5, 3, 4), (7, 5, 7), (17, 12, 28)] {
        let kps = two_design(latin_square_pbib(p, k, &cyclic_mols(p, k - 2).unwrap()).unwrap(), g);
        let mu = general(&kps, &mut record);
        record(&ratio(mu as u128, 1), &ratio((2 + 2 * k * (p - k) + k * (k - 1) * (2 * g + 1)) as u128, 1));
    }

    // single dual: fail(s) = 1 - ((b - r)/(b - 2))^s
    for d in [
        steiner_triple_bose(7).unwrap(),
        pbib_second_associates(&AssociationScheme::triangular(6).unwrap()).unwrap(),
        latin_square_pbib(7, 4, &cyclic_mols(7, 2).unwrap()).unwrap(),
    ] {
        let dd = d.dual().unwrap();
        let (b, r) = (dd.b() as u128, dd.r() as u128);
        let kps = Kps::build(vec![dd], 1).unwrap();
        for s in [1, 4, 10] {
            let closed = one() - ratio(b - r, b - 2).powu(s);
            record(&fail_s(&kps, s, FailMode::Approx).unwrap().value, &closed);
        }
    }

    report(5, worst <= 1e-12, &format!("{checks} closed-form evaluations, max |diff| = {worst:e}"));
}

const SEEDS: [u64; 20] = [
    11, 23, 37, 41, 53, 67, 79, 83, 97, 101, 113, 127, 131, 149, 151, 163, 179, 181, 191, 199,
];

fn mc_fail_criterion(s: u32) {
    let start = Instant::now();
    let kps = toy_kps();
    let target = Scalar::to_f64(&fail_s::<Exact>(&kps, s, FailMode::Exact).unwrap().value);
    let approx = fail_s::<f64>(&kps, s, FailMode::Approx).unwrap();
    let truth = Scalar::to_f64(&exact_fail(&kps, s, 1 << 40).unwrap());
    let mut within = 0;
    let mut within_approx = 0;
    let mut within_truth = 0;
    let mut mean = 0.0;
    for seed in SEEDS {
        let est = mc_fail(&kps, s, &McConfig { trials: 100_000, seed, shards: 8 }).unwrap();
        within += u32::from(est.within(target, 3.0));
        within_approx += u32::from(est.within(approx.value, 3.0));
        within_truth += u32::from(est.within(truth, 3.0));
        mean += est.estimate / SEEDS.len() as f64;
    }
    let elapsed = start.elapsed();
    let note = approx.warning.map(|w| format!(" [{w}]")).unwrap_or_default();
    report(
        6,
        within >= 19 && elapsed < Duration::from_secs(60),
        &format!(
            "mc_fail s={s}: {within}/20 seeds within 3 se of {target:.6} (binomial form); \
             {within_approx}/20 of {:.6} (power form); {within_truth}/20 of {truth:.6} (enumerated); \
             mean estimate {mean:.6}; {elapsed:?}{note}",
            approx.value
        ),
    );
}

#[test]
fn criterion_6_mc_fail_s1() {
    mc_fail_criterion(1);
}

#[test]
fn criterion_6_mc_fail_s2() {
    mc_fail_criterion(2);
}

#[test]
fn criterion_6_mc_fail_s3() {
    mc_fail_criterion(3);
}

#[test]
fn criterion_6_mc_two_hop() {
    let start = Instant::now();
    let kps = toy_kps();
    let mut lines = Vec::new();
    let mut pass = true;
    for eta in [1, 3] {
        let target = metrics::pr::<f64>(&kps, eta, BetaMode::Exact);
        let within = SEEDS
            .iter()
            .filter(|&&seed| {
                mc_two_hop(&kps, eta, &McConfig { trials: 100_000, seed, shards: 8 }).unwrap().within(target, 3.0)
            })
            .count();
        pass &= within >= 19;
        lines.push(format!("eta={eta}: {within}/20 within 3 se of {target:.6}"));
    }
    let elapsed = start.elapsed();
    report(6, pass && elapsed < Duration::from_secs(60), &format!("mc_two_hop {}; {elapsed:?}", lines.join(", ")));
}

fn involution_holds(d: &BlockDesign) -> bool {
    let dual = d.transpose();
    let incidence = (0..dual.b_star()).all(|i| {
        dual.blocks()[i]
            .iter()
            .all(|&j| d.blocks()[j as usize].contains(&(i as u32)))
    }) && dual.blocks().iter().map(Vec::len).sum::<usize>() == d.blocks().iter().map(Vec::len).sum::<usize>();
    incidence && dual.transpose().canonical_blocks() == d.canonical_blocks() && d.dual().is_ok()
}

#[test]
fn criterion_7_constructions() {
    let mut bad = Vec::new();
    let mut designs = Vec::new();
    for g in [4, 7, 10, 13, 16, 19, 22, 25, 28, 31] {
        let d = steiner_triple_bose(g).unwrap();
        if !verify_bib(&d, 1).is_pass() || d.b_star() != (2 * g + 1) * g / 3 {
            bad.push(format!("bose g={g}"));
        }
        designs.push(d);
    }
    for g in [3, 6, 9] {
        let d = steiner_triple_skolem(g).unwrap();
        if !verify_bib(&d, 1).is_pass() {
            bad.push(format!("skolem g={g}"));
        }
        designs.push(d);
    }
    let schemes = [
        AssociationScheme::group_divisible(2, 3).unwrap(),
        AssociationScheme::group_divisible(3, 4).unwrap(),
        AssociationScheme::group_divisible(2, 21).unwrap(),
        AssociationScheme::triangular(5).unwrap(),
        AssociationScheme::triangular(8).unwrap(),
        AssociationScheme::triangular(9).unwrap(),
    ];
    for s in &schemes {
        let d = pbib_second_associates(s).unwrap();
        if !verify_pbib(&d, s, 0, 1).is_pass() {
            bad.push(format!("pairing {:?}", s.kind()));
        }
        designs.push(d);
    }
    for (p, k) in [(4, 3), (5, 4), (17, 12)] {
        let squares = cyclic_mols(p, k - 2).unwrap();
        let d = latin_square_pbib(p, k, &squares).unwrap();
        let s = AssociationScheme::latin_square(p, k, &squares).unwrap();
        if !verify_pbib(&d, &s, 0, 1).is_pass() {
            bad.push(format!("latin ({p},{k})"));
        }
        designs.push(d);
    }
    let involution_failures = designs.iter().filter(|d| !involution_holds(d)).count();
    report(
        7,
        bad.is_empty() && involution_failures == 0,
        &format!(
            "{} designs built; verification failures {bad:?}; involution failures {involution_failures}",
            designs.len()
        ),
    );
}

#[test]
fn criterion_8_shared_key_discovery() {
    let fam = GdStsFamily::new(2, 3, 4).unwrap();
    let kps = fam.kps();
    let mut pairs = 0;
    let mut mismatches = 0;
    for i in 0..kps.n() {
        for j in i + 1..kps.n() {
            let (a, b) = (kps.node_at(i), kps.node_at(j));
            let (la, lb) = (fam.node_label(&a), fam.node_label(&b));
            let mut raw: Vec<KeyLabel> = {
                let kb = kps.node_keys(&b).unwrap();
                kps.node_keys(&a).unwrap().into_iter().filter(|k| kb.contains(k)).map(|k| fam.key_label(k)).collect()
            };
            raw.sort_unstable();
            let found = fam.discover(la, lb).unwrap();
            let symmetric = fam.discover(lb, la).unwrap() == found;
            let sized = found.len() as u64 == kps.lambda_count(&kps.assoc_tuple(&a, &b).unwrap()).unwrap();
            pairs += 1;
            mismatches += u32::from(found != raw || !symmetric || !sized);
        }
    }

    let big = GdStsFamily::new(2, 23, 22).unwrap();
    let label = |beta, gamma, zeta, u| NodeLabel { beta, gamma, zeta, u };
    let first = big.discover(label(1, 6, 4, 0), label(1, 6, 6, 0)).unwrap();
    let mut expected: Vec<KeyLabel> = big.v1((1, 6));
    expected.push(big.l2((4, 0), (6, 0)).unwrap());
    expected.sort_unstable();
    let first_ok = first == expected && big.l2((4, 0), (6, 0)).unwrap().to_string() == "015";
    let second: Vec<String> =
        big.discover(label(2, 2, 5, 1), label(1, 3, 6, 2)).unwrap().iter().map(ToString::to_string).collect();
    let second_ok = second == ["1232", "116"];
    report(
        8,
        pairs == 1431 && mismatches == 0 && first_ok && second_ok,
        &format!(
            "{pairs} pairs, {mismatches} mismatches; (16,4_0)/(16,6_0) -> V1(16)+015: {first_ok}; \
             (22,5_1)/(13,6_2) -> {second:?}"
        ),
    );
}
