//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits nonzero when any fails.
//!
//! Set `F2LIN_EXTENDED=1` to also run the exact enumeration (minutes) of
//! `N_32` for MT19937.

use std::process::{Command, ExitCode};
use std::time::Instant;

use anyhow::{ensure, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use f2lin::f2poly::{berlekamp_massey, F2Poly};
use f2lin::genkit::{characteristic_poly, GeneratorSpec, Seed};
use f2lin::lattice::{DefectProfile, DualLattice, ReducedBasis};
use f2lin::merit::{enumerate_min_weight, shortest_relations, verify_relation, LinearRelation, Term};
use f2lin::oracle::{random_generators, selftest, MAX_COUNTING_P};
use f2lin::report::{strip_header, Format};
use f2lin::stats::{birthday_spacings, poisson_right_tail, BirthdayParams};

const MT_K: [usize; 32] = [
    19937, 9968, 6240, 4984, 3738, 3115, 2493, 2492, 1869, 1869, 1248, 1246, 1246, 1246, 1246, 1246, 623, 623,
    623, 623, 623, 623, 623, 623, 623, 623, 623, 623, 623, 623, 623, 623,
];

type Check = fn() -> Result<Outcome>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn reduced(spec: &GeneratorSpec, v_max: usize) -> Result<Vec<ReducedBasis>> {
    let poly = characteristic_poly(spec)?;
    Ok(DualLattice::new(&spec.reference_state(), &poly)?.reduce_up_to(v_max)?)
}

fn equidistribution() -> Result<Outcome> {
    let profile = DefectProfile::from_reduced(19937, &reduced(&GeneratorSpec::Mt19937, 32)?);
    let ks: Vec<usize> = profile.rows.iter().map(|r| r.k).collect();
    let ds: Vec<usize> = profile.rows.iter().map(|r| r.d).collect();
    let want_d: Vec<usize> = (1..=32).map(|v| 19937 / v - MT_K[v - 1]).collect();
    let pass = ks == MT_K && ds == want_d && profile.delta() == 6750;
    outcome(pass, format!("k(v) {}, Delta = {}", if ks == MT_K { "matches" } else { "differs" }, profile.delta()))
}

fn successive_minima() -> Result<Outcome> {
    let red = reduced(&GeneratorSpec::Mt19937, 32)?;
    let v3 = red[2].minima().to_vec();
    let mut want32 = vec![623; 31];
    want32.push(624);
    let sums_ok = red.iter().all(|r| r.minima().iter().sum::<usize>() == 19937);
    let pass = v3 == [6240, 6848, 6849] && red[31].minima() == want32.as_slice() && sums_ok;
    outcome(pass, format!("v=3 minima {v3:?}, sum rule holds for all v: {sums_ok}"))
}

fn exact_merit() -> Result<Outcome> {
    let red = reduced(&GeneratorSpec::Mt19937, 32)?;
    let want = [(1, 135), (4, 128), (8, 15), (12, 5), (16, 5), (21, 6)];
    let mut got = Vec::new();
    let mut pass = true;
    for (v, n) in want {
        let m = enumerate_min_weight(&red[v - 1], 1 << 20)?;
        pass &= m.exact && m.n_v == n && m.vprime <= 15;
        got.push(format!("N_{v}={}", m.n_v));
    }
    let mut detail = got.join(" ");
    if std::env::var("F2LIN_EXTENDED").is_ok_and(|s| s == "1") {
        let started = Instant::now();
        let m = enumerate_min_weight(&red[31], u64::MAX)?;
        pass &= m.exact && m.vprime == 31 && m.n_v == 5;
        detail.push_str(&format!(
            "; extended N_32={} (v'={}) in {:.0}s",
            m.n_v,
            m.vprime,
            started.elapsed().as_secs_f64()
        ));
    } else {
        detail.push_str("; extended v=32 not requested");
    }
    outcome(pass, detail)
}

fn term(lag: usize, bit: usize) -> Term {
    Term { lag, bit }
}

fn all_hold(rels: &[LinearRelation], seeds: &[u32]) -> Result<bool> {
    for rel in rels {
        for &s in seeds {
            let gen = GeneratorSpec::Mt19937.make(&Seed::Integer(s))?;
            if !verify_relation(&gen, rel, 10_000)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn relations() -> Result<Outcome> {
    let red = reduced(&GeneratorSpec::Mt19937, 21)?;
    let five = LinearRelation::new(12, vec![term(0, 2), term(792, 4), term(792, 11), term(1246, 4), term(1246, 11)])?;
    let six = LinearRelation::new(
        21,
        vec![term(0, 1), term(0, 16), term(396, 2), term(396, 17), term(623, 2), term(623, 17)],
    )?;
    let within = |r: &LinearRelation, lags: &[usize]| r.lags().iter().all(|l| lags.contains(l));

    let at12 = shortest_relations(&red[11], 1 << 16)?;
    let argmin12 = enumerate_min_weight(&red[11], 1 << 20)?.relations;
    let ok12 = at12.len() == 3
        && argmin12 == [five.clone()]
        && at12.contains(&five)
        && at12.iter().all(|r| within(r, &[0, 396, 623, 792, 1246]));

    let m21 = enumerate_min_weight(&red[20], 1 << 20)?;
    let ok21 = m21.exact
        && m21.relations.len() as u64 == m21.argmin_count
        && m21.relations.contains(&six)
        && m21.relations.iter().all(|r| within(r, &[0, 396, 623]));

    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);
    let seeds: Vec<u32> = (0..5).map(|_| rng.gen()).collect();
    let found: Vec<LinearRelation> = at12.iter().chain(&m21.relations).cloned().collect();
    let verified = all_hold(&found, &seeds)?;
    let weights: Vec<usize> = at12.iter().map(|r| r.weight).collect();
    outcome(
        ok12 && ok21 && verified,
        format!(
            "v=12 relation weights {weights:?}; v=21 has {} argmin relations of weight {}; {} relations verified on 5 seeds",
            m21.argmin_count,
            m21.n_v,
            found.len()
        ),
    )
}

/// Five tests of `N = 5` replications each, on disjoint seed ranges.
fn birthday_series(spec: &GeneratorSpec, n: usize, log2d: u32, lags: &[usize]) -> Result<Vec<f64>> {
    (0..5u32)
        .map(|s| {
            let params = BirthdayParams {
                reps: 5,
                n,
                log2d,
                lags: lags.to_vec(),
                base_seed: 5 * s,
            };
            let started = Instant::now();
            let r = birthday_spacings(|seed| spec.make(&Seed::Integer(seed)), &params)?;
            eprintln!(
                "  {} I={lags:?} seeds {}..={}: Y={} mean={:.1} p={:.3e} ({:.0}s)",
                spec.name(),
                5 * s + 1,
                5 * s + 5,
                r.total,
                r.mean,
                r.p_value,
                started.elapsed().as_secs_f64()
            );
            Ok(r.p_value)
        })
        .collect()
}

fn fmt_ps(ps: &[f64]) -> String {
    ps.iter().map(|p| format!("{p:.1e}")).collect::<Vec<_>>().join(" ")
}

fn birthday_mt() -> Result<Outcome> {
    let spec = GeneratorSpec::Mt19937;
    let a = birthday_series(&spec, 20_000_000, 21, &[0, 396, 623])?;
    let b = birthday_series(&spec, 20_000_000, 21, &[0, 792, 1246])?;
    let pass = a.iter().all(|&p| p < 1e-10) && b.iter().all(|&p| p < 1e-3);
    outcome(pass, format!("I={{0,396,623}}: {}; I={{0,792,1246}}: {}", fmt_ps(&a), fmt_ps(&b)))
}

fn birthday_memt() -> Result<Outcome> {
    let spec = GeneratorSpec::Memt19937II;
    let a = birthday_series(&spec, 20_000_000, 21, &[0, 396, 623])?;
    let b = birthday_series(&spec, 15_000_000, 12, &[0, 396, 623, 792, 1246])?;
    let c = birthday_series(&spec, 20_000_000, 21, &[0, 792, 1246])?;
    let pass = a.iter().chain(&b).chain(&c).all(|&p| (1e-3..=1.0 - 1e-3).contains(&p));
    outcome(
        pass,
        format!(
            "I={{0,396,623}}: {}; I={{0,396,623,792,1246}}: {}; I={{0,792,1246}}: {}",
            fmt_ps(&a),
            fmt_ps(&b),
            fmt_ps(&c)
        ),
    )
}

fn memt_structure() -> Result<Outcome> {
    let red = reduced(&GeneratorSpec::Memt19937II, 32)?;
    let delta = DefectProfile::from_reduced(19937, &red).delta();
    let mut pass = delta == 0;
    let mut min_exact = usize::MAX;
    let mut sampled = Vec::new();
    for r in &red[1..] {
        if r.vprime() <= 24 {
            let m = enumerate_min_weight(r, 1 << 25)?;
            pass &= m.exact && m.n_v > 9000;
            min_exact = min_exact.min(m.n_v);
        } else {
            let m = enumerate_min_weight(r, 1 << 24)?;
            pass &= !m.exact && m.n_v > 9000;
            sampled.push(format!("v={} (v'={}): <= {}", r.v(), r.vprime(), m.n_v));
        }
    }
    outcome(
        pass,
        format!(
            "Delta = {delta}; smallest exact N_v = {min_exact}; sampled upper bounds {}",
            sampled.join(", ")
        ),
    )
}

fn oracle_equivalence() -> Result<Outcome> {
    let specs = random_generators(120, 2..=16, 1..=8, 0x0dd);
    let cases = selftest(&specs)?;
    let counted = cases.iter().filter(|c| c.counted).count();
    let failed: Vec<usize> = cases.iter().filter(|c| !c.passed()).map(|c| c.index).collect();
    let pass = failed.is_empty() && counted > 0 && specs.iter().all(|s| s.p() <= 16 && s.w() <= 8);
    outcome(
        pass,
        format!(
            "{} generators, {counted} also checked by counting (p <= {MAX_COUNTING_P}), failures {failed:?}",
            cases.len()
        ),
    )
}

fn random_poly(rng: &mut ChaCha8Rng) -> F2Poly {
    let words = rng.gen_range(1..=4);
    let bits = rng.gen_range(1..=64 * words);
    let mut p = F2Poly::from_words((0..words).map(|_| rng.gen()).collect());
    p = p.truncate(bits);
    p
}

fn algebra() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xa16e);
    let cases = 10_000;
    for _ in 0..cases {
        let a = random_poly(&mut rng);
        let b = random_poly(&mut rng);
        let c = random_poly(&mut rng);

        ensure!(&(&a + &b) * &c == &(&a * &c) + &(&b * &c), "distributivity");

        if !b.is_zero() {
            let (q, r) = a.divrem(&b)?;
            ensure!(&(&q * &b) + &r == a, "divrem round trip");
            ensure!(r.is_zero() || r.degree() < b.degree(), "remainder degree");
        }

        if !(a.is_zero() && b.is_zero()) {
            let (g, s, t) = F2Poly::extgcd(&a, &b)?;
            ensure!(&(&s * &a) + &(&t * &b) == g, "Bezout identity");
            ensure!(a.rem(&g)?.is_zero() && b.rem(&g)?.is_zero(), "gcd divides");
        }

        if b.degree().is_some_and(|d| d >= 1) {
            let (g, _, _) = F2Poly::extgcd(&a, &b)?;
            if g.is_one() {
                let inv = a.inverse_mod(&b)?;
                ensure!(a.mul_mod(&inv, &b)?.is_one(), "inverse round trip");
            } else {
                ensure!(a.inverse_mod(&b).is_err(), "non-invertible accepted");
            }
        }

        let l = rng.gen_range(1..=96);
        let mut conn: Vec<bool> = (0..l).map(|_| rng.gen()).collect();
        conn[0] = true;
        let mut bits: Vec<bool> = (0..l).map(|_| rng.gen()).collect();
        for i in 0..2 * l {
            let next = (0..l).filter(|&j| conn[j] && bits[i + j]).count() % 2 == 1;
            bits.push(next);
        }
        let mut exps: Vec<usize> = (0..l).filter(|&j| conn[j]).collect();
        exps.push(l);
        let full = F2Poly::from_exponents(&exps);
        let min = berlekamp_massey(&bits[..2 * l]);
        let deg = min.degree().unwrap_or(0);
        ensure!(deg <= l, "complexity above the generating recurrence");
        ensure!(full.rem(&min)?.is_zero(), "minimal polynomial does not divide");
        let annihilates = (0..bits.len() - deg).all(|i| {
            min.exponents().iter().filter(|&&j| bits[i + j]).count() % 2 == 0
        });
        ensure!(annihilates, "recovered polynomial fails on later bits");
    }
    let poly = characteristic_poly(&GeneratorSpec::Mt19937)?;
    let pass = poly.degree() == Some(19937) && poly.weight() == 135;
    outcome(
        pass,
        format!(
            "{cases} randomized cases; P(z) degree {}, weight {}",
            poly.degree().unwrap_or(0),
            poly.weight()
        ),
    )
}

fn run_cli(args: &[&str]) -> Result<String> {
    let out = Command::new(env!("CARGO_BIN_EXE_f2lin"))
        .args(args)
        .env("RUST_LOG", "warn")
        .env_remove("F2LIN_OUT_DIR")
        .output()
        .context("running f2lin")?;
    ensure!(out.status.success(), "f2lin {args:?} exited with {}", out.status);
    Ok(String::from_utf8(out.stdout)?)
}

fn determinism() -> Result<Outcome> {
    let mut same = true;
    let runs: [(&[&str], Format); 4] = [
        (&["analyze", "mt19937", "--v-max", "32"], Format::Tsv),
        (&["merit", "mt19937", "--v", "21"], Format::Tsv),
        (&["--format", "json", "analyze", "memt19937ii", "--v-max", "16"], Format::Json),
        (&["--format", "json", "--threads", "1", "merit", "mt19937", "--v", "16"], Format::Json),
    ];
    for (args, format) in runs {
        let a = strip_header(&run_cli(args)?, format)?;
        let b = strip_header(&run_cli(args)?, format)?;
        same &= a == b && !a.is_empty();
    }
    let parallel = strip_header(&run_cli(&["merit", "mt19937", "--v", "16"])?, Format::Tsv)?;
    let single = strip_header(&run_cli(&["--threads", "1", "merit", "mt19937", "--v", "16"])?, Format::Tsv)?;
    same &= parallel == single;

    let table = include_str!("data/poisson_oracle.tsv");
    let mut worst = 0f64;
    let mut rows = 0;
    for line in table.lines().skip(1) {
        let f: Vec<&str> = line.split('\t').collect();
        let (mu, y, want): (f64, u64, f64) = (f[0].parse()?, f[1].parse()?, f[2].parse()?);
        let got = poisson_right_tail(mu, y)?;
        worst = worst.max(((got - want) / want).abs());
        rows += 1;
    }
    outcome(
        same && rows == 100 && worst < 1e-10,
        format!("reports byte-identical: {same}; Poisson worst relative error {worst:.1e} over {rows} pairs"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 10] = [
        ("equidistribution table", equidistribution),
        ("successive minima", successive_minima),
        ("exact N_v", exact_merit),
        ("explicit relations", relations),
        ("birthday spacings, MT19937", birthday_mt),
        ("birthday spacings, MEMT19937-II", birthday_memt),
        ("MEMT19937-II structure", memt_structure),
        ("oracle equivalence", oracle_equivalence),
        ("algebra suite", algebra),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let (pass, detail) = match check() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e:#}")),
        };
        let secs = started.elapsed().as_secs_f64();
        println!(
            "{} {:>2} {name}: {detail} [{secs:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1
        );
        failures += usize::from(!pass);
    }
    if failures > 0 {
        println!("{failures} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    } else {
        println!("all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    }
}
