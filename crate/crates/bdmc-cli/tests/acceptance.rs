//! The acceptance gate: ten end-to-end criteria covering the bridge
//! function, the certificates, the sandwich on random channels, the two
//! extremal families, the divergence comparison, the inverses, and the
//! CLI. Each test prints one line; run with `--nocapture` to see them all.

use bdmc::bounds::{bound_report, check_proposition, Distribution};
use bdmc::certify::{certify_lemma1, certify_lemma3};
use bdmc::channel::{
    bec, bhattacharyya, blackwell, bsc, capacity, classify, make_channel, random_channel,
    ChannelClass, MERGE_TOL,
};
use bdmc::scalar::{self, UnitScalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{LN_2, LOG2_E};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

fn us(x: f64) -> UnitScalar {
    UnitScalar::new(x).unwrap()
}

fn grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| k as f64 / (n - 1) as f64)
}

#[test]
fn criterion_01_bridge_identity() {
    let start = Instant::now();
    let mut max_err = 0.0f64;
    for q in grid(2001) {
        let err = (scalar::phi(us(scalar::bh(us(q)))) - scalar::ent(us(q))).abs();
        max_err = max_err.max(err);
    }
    assert!(max_err <= 1e-12, "identity drift {max_err:.3e}");
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!(
        "criterion 01 bridge identity: pass (max |phi(bh(q)) - ent(q)| = {:.2e} on 2001 points, {} ms)",
        max_err,
        elapsed.as_millis()
    );
}

#[test]
fn criterion_02_derivatives() {
    // Frozen anchors first.
    for (u, want) in [(0.6, 1.188721875540867), (0.3, 0.8501646123975821)] {
        let got = scalar::phi_d1(us(u));
        assert!((got - want).abs() <= 1e-12, "phi'({u}) = {got}");
    }
    for (u, want) in [(0.6, 0.8414188828320028), (0.3, 1.528776923556385)] {
        let got = scalar::phi_d2(us(u)).unwrap();
        assert!((got - want).abs() <= 1e-12, "phi''({u}) = {got}");
    }
    assert_eq!(scalar::phi_d1(UnitScalar::ZERO), 0.0);
    assert!((scalar::phi_d1(UnitScalar::ONE) - 1.0 / LN_2).abs() <= 1e-12);
    assert!(
        (scalar::phi_d2(UnitScalar::ONE).unwrap() - 1.0 / (3.0 * LN_2)).abs() <= 1e-12
    );
    assert!(scalar::phi_d2(UnitScalar::ZERO).is_err());

    // Finite differences across [0.05, 0.95].
    let h1 = 1e-5;
    let h2 = 1e-4;
    let mut worst_d1 = 0.0f64;
    let mut worst_d2 = 0.0f64;
    for k in 5..=95 {
        let u = f64::from(k) / 100.0;
        let fd1 = (scalar::phi(us(u + h1)) - scalar::phi(us(u - h1))) / (2.0 * h1);
        let d1 = scalar::phi_d1(us(u));
        worst_d1 = worst_d1.max((fd1 - d1).abs() / d1);
        let fd2 = (scalar::phi(us(u + h2)) - 2.0 * scalar::phi(us(u))
            + scalar::phi(us(u - h2)))
            / (h2 * h2);
        let d2 = scalar::phi_d2(us(u)).unwrap();
        worst_d2 = worst_d2.max((fd2 - d2).abs() / d2);
    }
    assert!(worst_d1 <= 1e-6, "phi' finite-difference drift {worst_d1:.3e}");
    assert!(worst_d2 <= 1e-5, "phi'' finite-difference drift {worst_d2:.3e}");
    println!(
        "criterion 02 derivatives: pass (anchors <= 1e-12; fd rel err {:.2e} / {:.2e})",
        worst_d1, worst_d2
    );
}

#[test]
fn criterion_03_derivative_comparison_certificate() {
    let start = Instant::now();
    let report = certify_lemma1(999, 0.999).unwrap();
    let elapsed = start.elapsed();
    assert!(report.pass, "certificate failed: {report:?}");
    assert!(report.min_slack > 0.0);
    assert_eq!(report.grid, 999);
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    println!(
        "criterion 03 derivative comparison certificate: pass (min slack {:.3e} at v = {:.4}, {} ms)",
        report.min_slack,
        report.argmin,
        elapsed.as_millis()
    );
}

#[test]
fn criterion_04_linear_bounds() {
    // Certificates for all three bounds.
    let reports = certify_lemma3(2001).unwrap();
    for r in &reports {
        assert!(r.pass, "certificate {} failed", r.lemma);
    }

    // Direct numeric slacks on 2001 points with a 1e-12 pad, and the
    // advertised equality points: u - phi(u) and phi(u) - u^2 vanish only
    // at the endpoints, phi(u) - (1 + (u-1)/ln 2) only at u = 1.
    for (k, u) in grid(2001).enumerate() {
        let p = scalar::phi(us(u));
        let a = u - p;
        let b = p - u * u;
        let c = p - (1.0 + (u - 1.0) / LN_2);
        let interior = k != 0 && k != 2000;
        assert!(a >= -1e-12 && b >= -1e-12 && c >= -1e-12, "pad broken at u = {u}");
        if interior {
            assert!(a > 1e-12, "u - phi(u) vanishes at interior u = {u}");
            assert!(b > 1e-12, "phi(u) - u^2 vanishes at interior u = {u}");
        } else {
            assert!(a.abs() <= 1e-12 && b.abs() <= 1e-12);
        }
        if k == 2000 {
            assert!(c.abs() <= 1e-12);
        } else {
            assert!(c > 1e-12, "tangent bound vanishes before u = 1 at {u}");
        }
    }

    // The two lower bounds swap roles exactly once before u = 1.
    let mut changes = 0;
    let mut prev = 0.0f64;
    for u in grid(10_001) {
        let diff = u * u - (1.0 + (u - 1.0) / LN_2);
        if prev != 0.0 && diff != 0.0 && prev.signum() != diff.signum() {
            changes += 1;
        }
        if diff != 0.0 {
            prev = diff;
        }
    }
    assert_eq!(changes, 1, "expected a single crossing of the linear bounds");
    println!("criterion 04 linear bounds: pass (certificates + 2001-point slacks + single crossing)");
}

#[test]
fn criterion_05_random_channel_sandwich() {
    let start = Instant::now();
    let sizes = [2usize, 3, 4, 8, 16];
    let mut worst_left = f64::INFINITY;
    let mut worst_right = f64::INFINITY;
    for seed in 0..10_000u64 {
        let ch = random_channel(sizes[(seed % 5) as usize], seed).unwrap();
        let z = bhattacharyya(&ch);
        let one_minus_i = 1.0 - capacity(&ch);
        let left = z - one_minus_i;
        let right = one_minus_i - scalar::phi(us(z));
        assert!(left >= -1e-12, "left slack {left:.3e} at seed {seed}");
        assert!(right >= -1e-12, "right slack {right:.3e} at seed {seed}");
        worst_left = worst_left.min(left);
        worst_right = worst_right.min(right);
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    println!(
        "criterion 05 random-channel sandwich: pass (10000 channels, min slacks {:.2e} / {:.2e}, {} ms)",
        worst_left,
        worst_right,
        elapsed.as_millis()
    );
}

#[test]
fn criterion_06_extremal_families() {
    for k in 0..=10 {
        let eps = f64::from(k) / 10.0;
        let ch = bec(eps).unwrap();
        let slack = bhattacharyya(&ch) - (1.0 - capacity(&ch));
        assert!(slack.abs() <= 1e-12, "bec({eps}) off the edge: {slack:.3e}");
        match classify(&ch, 1e-9).unwrap() {
            ChannelClass::Bec(p) => assert!((p - eps).abs() <= 1e-12),
            other => panic!("bec({eps}) misread as {other}"),
        }
    }
    for k in 0..=10 {
        let eps = f64::from(k) / 20.0;
        let ch = bsc(eps).unwrap();
        let slack = (1.0 - capacity(&ch)) - scalar::phi(us(bhattacharyya(&ch)));
        assert!(slack.abs() <= 1e-12, "bsc({eps}) off the edge: {slack:.3e}");
        // The corners eps = 0 and eps = 1/2 also fit the erasure family,
        // which wins; interior points must classify as symmetric.
        if k != 0 && k != 10 {
            match classify(&ch, 1e-9).unwrap() {
                ChannelClass::Bsc(p) => assert!((p - eps).abs() <= 1e-12),
                other => panic!("bsc({eps}) misread as {other}"),
            }
        }
    }
    // Splitting outputs and shuffling them changes neither the edge nor
    // the classification.
    for k in 1..=9 {
        let eps = f64::from(k) / 20.0;
        let split = make_channel(
            [
                ("1b", 0.4 * eps, 0.4 * (1.0 - eps)),
                ("0a", 0.25 * (1.0 - eps), 0.25 * eps),
                ("1a", 0.6 * eps, 0.6 * (1.0 - eps)),
                ("0b", 0.75 * (1.0 - eps), 0.75 * eps),
            ],
            true,
        )
        .unwrap();
        let slack = (1.0 - capacity(&split)) - scalar::phi(us(bhattacharyya(&split)));
        assert!(slack.abs() <= 1e-12, "split bsc({eps}) off the edge");
        match classify(&split, 1e-9).unwrap() {
            ChannelClass::Bsc(p) => assert!((p - eps).abs() <= 1e-12),
            other => panic!("split bsc({eps}) misread as {other}"),
        }
    }
    println!("criterion 06 extremal families: pass (11 erasure + 11 symmetric + 9 split grids on their edges)");
}

#[test]
fn criterion_07_capacity_corollaries() {
    let sizes = [2usize, 3, 4, 8, 16];
    for seed in 0..2000u64 {
        let ch = random_channel(sizes[(seed % 5) as usize], seed ^ 0xC0FFEE).unwrap();
        let report = bound_report(&ch, 1e-12).unwrap();
        assert!(
            report.all_satisfied(),
            "corollary violated at seed {seed}: {report:?}"
        );
    }
    // Tightness pattern at the extremes: the quadratic bound is tight for
    // both degenerate channels, the tangent bound only for the useless one.
    let useless = bound_report(&bsc(0.5).unwrap(), 1e-9).unwrap();
    assert!(useless.entry("corollary.3").unwrap().tight);
    assert!(useless.entry("corollary.4").unwrap().tight);
    let noiseless = bound_report(&bsc(0.0).unwrap(), 1e-9).unwrap();
    assert!(noiseless.entry("corollary.3").unwrap().tight);
    assert!(!noiseless.entry("corollary.4").unwrap().tight);
    println!("criterion 07 capacity corollaries: pass (2000 channels satisfied; extreme tightness pattern checked)");
}

#[test]
fn criterion_08_divergence_sandwich() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2718);
    let mut sample = |labels: usize| loop {
        let w: Vec<f64> = (0..labels)
            .map(|_| {
                let x: f64 = rng.random();
                if x < 0.25 {
                    0.0
                } else {
                    x
                }
            })
            .collect();
        let s: f64 = w.iter().sum();
        if s == 0.0 {
            continue;
        }
        return Distribution::new(
            w.into_iter().enumerate().map(|(k, x)| (k.to_string(), x / s)),
        )
        .unwrap();
    };
    for round in 0..10_000 {
        let labels = 2 + (round % 7);
        let p = sample(labels);
        let q = sample(labels);
        let slacks = check_proposition(&p, &q, 1e-9)
            .unwrap_or_else(|e| panic!("round {round}: {e}"));
        assert!(slacks.lower >= -1e-9 && slacks.upper >= -1e-9);
    }
    // Corners: equal pair (lower bound tight), disjoint supports (upper
    // bound tight).
    let p = Distribution::new([("a", 0.4), ("b", 0.6)]).unwrap();
    let equal = check_proposition(&p, &p, 1e-9).unwrap();
    assert_eq!(equal.lower, 0.0);
    let q = Distribution::new([("c", 0.5), ("d", 0.5)]).unwrap();
    let disjoint = check_proposition(&p, &q, 1e-9).unwrap();
    assert!(disjoint.upper.abs() <= 1e-15);
    let elapsed = start.elapsed();
    println!(
        "criterion 08 divergence sandwich: pass (10000 pairs + corners, {} ms)",
        elapsed.as_millis()
    );
}

#[test]
fn criterion_09_inverses() {
    let mut worst_phi = 0.0f64;
    for u in grid(1001) {
        let y = scalar::phi(us(u));
        let back = scalar::phi_inv(y).unwrap().get();
        worst_phi = worst_phi.max((back - u).abs());
    }
    assert!(worst_phi <= 1e-10, "phi_inv round trip drift {worst_phi:.3e}");
    let mut worst_bh = 0.0f64;
    for z in grid(1001) {
        let back = scalar::bh(scalar::bh_inv(us(z)));
        worst_bh = worst_bh.max((back - z).abs());
    }
    assert!(worst_bh <= 1e-12, "bh_inv round trip drift {worst_bh:.3e}");
    println!(
        "criterion 09 inverses: pass (phi_inv drift {:.2e}, bh_inv drift {:.2e} on 1001 points)",
        worst_phi, worst_bh
    );
}

fn run_cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bdmc"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn criterion_10_cli_round_trips() {
    let dir = tempfile::tempdir().unwrap();

    // Construction hits the requested parameter through a full
    // make -> analyze cycle.
    for (family, flag, value) in [
        ("bec", "--eps", "0.37"),
        ("bec", "--capacity", "0.25"),
        ("bsc", "--eps", "0.11"),
        ("bsc", "--z", "0.44"),
        ("bsc", "--capacity", "0.62"),
    ] {
        let path = dir.path().join(format!("{family}-{}.json", &flag[2..]));
        let out = run_cli(&["make", family, flag, value, "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        let out = run_cli(&["analyze", path.to_str().unwrap(), "--format", "json"]);
        assert_eq!(out.status.code(), Some(0));
        let report: serde_json::Value =
            serde_json::from_slice(&out.stdout).expect("analyze emits json");
        let want: f64 = value.parse().unwrap();
        let got = match flag {
            "--eps" => report["class"]["parameter"].as_f64().unwrap(),
            "--z" => report["bhattacharyya"].as_f64().unwrap(),
            _ => report["capacity"].as_f64().unwrap(),
        };
        assert!(
            (got - want).abs() <= 1e-9,
            "{family} {flag} {value} came back as {got}"
        );
        assert!(report["entries"]
            .as_array()
            .unwrap()
            .iter()
            .all(|e| e["satisfied"].as_bool().unwrap()));
    }

    // Region sampling exits cleanly and is byte-deterministic.
    let r1 = dir.path().join("r1.csv");
    let r2 = dir.path().join("r2.csv");
    for path in [&r1, &r2] {
        let out = run_cli(&[
            "region",
            "--samples",
            "5000",
            "--seed",
            "9",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(
        std::fs::read(&r1).unwrap(),
        std::fs::read(&r2).unwrap(),
        "region output must be byte-deterministic under a fixed seed"
    );

    // Corrupted input is an input error, not a crash.
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"outputs\": [{\"y\": \"a\", \"w0\": 2.0, \"w1\": -1.0}]}").unwrap();
    let out = run_cli(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    // Certification through the CLI.
    let out = run_cli(&["certify", "--grid", "200"]);
    assert_eq!(out.status.code(), Some(0));

    println!("criterion 10 cli round trips: pass (make/analyze x5, deterministic region, bad input, certify)");
}

#[test]
fn blackwell_consistency_backstop() {
    // Not one of the ten headline criteria, but the measure-level
    // identities are what make criterion 5 meaningful, so pin them here
    // on a corpus too.
    let mut worst = 0.0f64;
    for seed in 0..500u64 {
        let ch = random_channel(2 + (seed % 15) as usize, seed.wrapping_mul(97)).unwrap();
        let m = blackwell(&ch, MERGE_TOL).unwrap();
        worst = worst.max((m.mean_u() - bhattacharyya(&ch)).abs());
        worst = worst.max((m.mean_ent() - (1.0 - capacity(&ch))).abs());
    }
    assert!(worst <= 1e-12, "measure identities drift {worst:.3e}");
    // log2 e - 1 is where the quadratic and tangent readings of the
    // sandwich swap which is stronger; make sure the constant stays put.
    assert!((LOG2_E - 1.0 - 0.4426950408889634).abs() < 1e-16);
}
