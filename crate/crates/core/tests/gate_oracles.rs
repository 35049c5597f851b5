use levyrd_core::gate::{
    check_claim_spectral, check_ex01, check_main, check_stpn, claim_threshold, ex01_rhs1, ex01_rhs2, Relation,
};
use levyrd_core::noise::{classify_partial_sums, spectral_moment_sum};
use levyrd_core::rng::rng_from_seed;
use rand::Rng;

#[test]
fn main_condition_examples() {
    let r = check_main(0.8, 0.5, 0.2, 0.3, 2.0);
    assert!(r.passed);
    let top = r.clauses.last().unwrap();
    // max(0.2 + 0.5, 0.5 - 1 + 0.5, 0.3)
    assert!((top.lhs - 0.7).abs() < 1e-15);
    assert!((top.slack - 0.1).abs() < 1e-15);
    assert_eq!(top.relation, Relation::Less);

    let edge = check_main(top.lhs, 0.5, 0.2, 0.3, 2.0);
    assert!(!edge.passed);
    let dom = check_main(2.0, 0.5, 0.6, 0.3, 2.0);
    assert!(!dom.passed);
    let names: Vec<&str> = dom.domain_violations().iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, ["delta_G < 1/p"]);
    assert!(check_main(0.8, 0.5, 0.2, 0.3, 2.5).domain_violations().len() == 1);
    assert!(!r.notes.is_empty());
}

#[test]
fn spectral_noise_examples() {
    let (d, p, q, r) = (1.0, 2.0, 2.0, 2.0);
    // Substituted form: 1/2 < α/4, i.e. α > 2.
    for alpha in [2.5, 3.0, 7.0] {
        assert!((ex01_rhs1(d, p, q, r, alpha) - alpha / 4.0).abs() < 1e-15);
    }
    let rep = check_ex01(d, p, q, r, 3.0, -0.5);
    assert!(rep.clauses[3].passed);
    assert!((rep.clauses[3].slack - 0.25).abs() < 1e-15);
    // Second clause reduces to δ + 1 < α/4.
    assert!((ex01_rhs2(d, p, 3.0) - 0.75).abs() < 1e-15);
    assert!(rep.passed);

    let at = check_ex01(d, p, q, r, 2.0, -10.0);
    assert!(!at.clauses[3].passed);
    assert!(!at.passed);
    assert!(!check_ex01(d, 2.0, 1.5, r, 3.0, -0.5).domain_violations().is_empty());
}

#[test]
fn large_decay_admits_some_delta() {
    let mut rng = rng_from_seed(41);
    for _ in 0..200 {
        let d = rng.random_range(1..=3) as f64;
        let p = rng.random_range(1.05..2.0);
        let q = rng.random_range(p..4.0);
        let r = rng.random_range(p..4.0);
        let alpha = 1e4;
        let delta = 0.5 * (ex01_rhs2(d, p, alpha) - 2.0 / p);
        let rep = check_ex01(d, p, q, r, alpha, delta);
        assert!(rep.passed, "{rep:?}");
    }
}

#[test]
fn space_time_examples() {
    let r = check_stpn(1.0, 2, 2.0, 2.0, 0.6);
    assert!(r.passed);
    assert_eq!(r.clauses[3].lhs, 1.0);
    assert!((r.clauses[3].rhs - 2.0).abs() < 1e-15);
    assert!((r.clauses[4].lhs - 0.5).abs() < 1e-15);
    assert!(!check_stpn(1.0, 2, 2.0, 2.0, 0.5).passed);
    assert!(!check_stpn(1.0, 2, 2.0, 2.0, 0.5 + 1e-13).passed);
    assert!(check_stpn(1.0, 2, 2.0, 2.0, 0.5 + 1e-9).passed);
    assert!(!check_stpn(1.0, 0, 2.0, 2.0, 0.6).domain_violations().is_empty());
}

#[test]
fn moment_condition_examples() {
    assert_eq!(claim_threshold(0.0, 1.0, 2.0, 2.0), 1.0);
    let ok = check_claim_spectral(1.5, 0.0, 1.0, 2.0, 2.0);
    assert!(ok.passed && ok.cross_checks.iter().all(|c| c.agrees));
    let at = check_claim_spectral(1.0, 0.0, 1.0, 2.0, 2.0);
    assert!(!at.passed && at.cross_checks.iter().all(|c| c.agrees));
    assert!(!check_claim_spectral(3.0, 0.0, 1.0, 2.0, 1.5).passed);
}

#[test]
fn gate_agrees_with_partial_sums_on_random_tuples() {
    let mut rng = rng_from_seed(2024);
    let mut checked = 0;
    let mut verdicts = [0usize; 2];
    while checked < 50 {
        let d = rng.random_range(1..=3) as f64;
        let p = rng.random_range(1.1..2.0);
        let r = rng.random_range(2.0..6.0);
        let gamma = rng.random_range(0.0..1.5);
        let alpha = rng.random_range(0.5..5.0);
        let gap = alpha - claim_threshold(gamma, d, p, r);
        if gap.abs() < 1e-3 {
            continue;
        }
        let rep = check_claim_spectral(alpha, gamma, d, p, r);
        let blocks = classify_partial_sums(alpha, gamma, p, r, d, 2000);
        let sum = spectral_moment_sum(alpha, gamma, p, r, d, Some(2000));
        assert_eq!(rep.passed, blocks, "alpha {alpha} gamma {gamma} d {d} p {p} r {r}");
        assert_eq!(rep.passed, sum.convergent);
        assert_eq!(sum.tail.is_finite(), rep.passed);
        assert!(rep.cross_checks.iter().all(|c| c.agrees));
        verdicts[rep.passed as usize] += 1;
        checked += 1;
    }
    assert!(verdicts[0] > 5 && verdicts[1] > 5, "{verdicts:?}");
}

#[test]
fn more_decay_never_breaks_a_pass() {
    let mut rng = rng_from_seed(77);
    for _ in 0..500 {
        let d = rng.random_range(1..=3) as f64;
        let p: f64 = rng.random_range(1.1..2.0);
        let q = rng.random_range(p..4.0);
        let r = rng.random_range(p.max(2.0)..6.0);
        let gamma = rng.random_range(0.0..1.5);
        let delta = rng.random_range(-1.0..1.0);
        let mut alpha = rng.random_range(0.0..3.0);
        let (mut ex, mut cl) = (false, false);
        for _ in 0..20 {
            let e = check_ex01(d, p, q, r, alpha, delta).passed;
            let c = check_claim_spectral(alpha, gamma, d, p, r).passed;
            assert!(e || !ex);
            assert!(c || !cl);
            ex = e;
            cl = c;
            alpha += rng.random_range(0.0..1.0);
        }
    }
}
