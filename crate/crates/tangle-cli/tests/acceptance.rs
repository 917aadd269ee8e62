//! One line per acceptance criterion. Runs the full-size computations, which
//! takes several minutes in release mode. `TANGLE_ACCEPTANCE_QUICK=1` caps
//! the two-leg run at p = 12 and reports criterion 1 as partial.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use tangle_core::asymptotics::{conjectured_alpha, fit_growth, parse_sequence_csv, GrowthModel};
use tangle_core::oracle::{count_2pi, oracle_table, OracleOptions};
use tangle_core::poly::LoopPolynomial;
use tangle_core::renorm::{
    channel_decompose, solve_couplings, solved_channels, tangle_series, verify_solution, ClassMap,
};
use tangle_core::series::GSeries;
use tangle_core::table::CountTable;
use tangle_core::tm::{enumerate, growth_ratios, EnumerateOptions};

const TABLE1: &str = include_str!("../../../fixtures/table1.csv");
const TABLE2: &str = include_str!("../../../fixtures/table2.csv");
const TABLE3: &str = include_str!("../../../fixtures/table3.csv");

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, id: u32, blocking: bool, ok: bool, detail: String) {
        let verdict = match (ok, blocking) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "FAIL (informational)",
        };
        println!("criterion {id}: {verdict}: {detail}");
        if !ok && blocking {
            self.failed += 1;
        }
    }
}

/// `(type, p, k) -> count` from a published table.
fn published(text: &str) -> BTreeMap<(String, usize, usize), BigInt> {
    text.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (
                (f[0].to_string(), f[1].parse().unwrap(), f[2].parse().unwrap()),
                f[3].parse().unwrap(),
            )
        })
        .collect()
}

/// Compares every cell with `p <= max_p`; a missing cell means zero.
fn compare(series: &BTreeMap<String, GSeries>, table: &str, max_p: usize) -> (usize, Vec<String>) {
    let expected = published(table);
    let mut checked = 0;
    let mut bad = Vec::new();
    let names: Vec<String> = expected.keys().map(|(t, _, _)| t.clone()).collect();
    for name in names.iter().collect::<std::collections::BTreeSet<_>>() {
        let ours = &series[&capitalize(name)];
        for p in 1..=max_p {
            let c = ours.coeff(p);
            let width = (0..8).filter(|k| expected.contains_key(&(name.clone(), p, *k))).max();
            let deg = c.degree().unwrap_or(0).max(width.unwrap_or(0));
            for k in 0..=deg {
                let want = expected.get(&(name.clone(), p, k)).cloned().unwrap_or_default();
                let got = c.coeff(k);
                checked += 1;
                if !got.is_integer() || got.to_integer() != want {
                    bad.push(format!("{name} p={p} k={k}: {got} vs {want}"));
                }
            }
        }
    }
    (checked, bad)
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    c.next().map(|f| f.to_uppercase().collect::<String>() + c.as_str()).unwrap_or_default()
}

fn counts(legs: usize, order: usize) -> CountTable {
    enumerate(&EnumerateOptions::new(legs, order).tangencies(true).tangency_cost(3))
        .unwrap()
        .table
}

fn minutes(d: Duration) -> String {
    format!("{:.1} min", d.as_secs_f64() / 60.0)
}

fn main() {
    let mut r = Report { failed: 0 };
    let quick = std::env::var_os("TANGLE_ACCEPTANCE_QUICK").is_some();
    let table1 = parse_sequence_csv(TABLE1).unwrap();

    // 1 and 8: crossing-only two-leg counts.
    let max_p = if quick { 12 } else { 14 };
    let start = Instant::now();
    let run = enumerate(&EnumerateOptions::new(2, max_p)).unwrap();
    let elapsed = start.elapsed();
    let strand = "12".parse().unwrap();
    let mismatches: Vec<usize> = (0..=max_p)
        .filter(|p| BigInt::from(run.table.get(&strand, *p, 0).coeff(0).to_integer()) != table1[*p].1)
        .collect();
    r.line(
        1,
        !quick,
        mismatches.is_empty() && max_p == 14 && elapsed < Duration::from_secs(15 * 60),
        format!(
            "G for p<={max_p} in {} (mismatches at {mismatches:?}){}",
            minutes(elapsed),
            if quick { "; quick mode, p=13,14 not run" } else { "" }
        ),
    );
    let ratios: Vec<(usize, f64)> = growth_ratios(&run.levels)
        .into_iter()
        .filter(|(p, _)| (10..=14).contains(p))
        .collect();
    let in_band = !ratios.is_empty() && ratios.iter().all(|(_, x)| (2.2..=3.5).contains(x));
    let shown: Vec<String> = ratios.iter().map(|(p, x)| format!("{p}:{x:.2}")).collect();
    r.line(
        8,
        false,
        in_band,
        format!("state-count growth ratios [{}], band [2.2, 3.5]", shown.join(" ")),
    );

    // 2: four-leg tangles through p = 10.
    let start = Instant::now();
    let two = counts(2, 10);
    let four = counts(4, 10);
    let sol = solve_couplings(&two, &four, 10).unwrap();
    let map = ClassMap::builtin();
    let gammas = tangle_series(&four, &sol, &map).unwrap();
    let elapsed = start.elapsed();
    let (checked, bad) = compare(&gammas, TABLE2, 10);
    r.line(
        2,
        true,
        bad.is_empty() && elapsed < Duration::from_secs(30 * 60),
        format!("{checked} cells of Gamma1/Gamma2 for p<=10 in {}; mismatches {bad:?}", minutes(elapsed)),
    );

    // 3: six-leg tangles through p = 8.
    let six = counts(6, 8);
    let xis = tangle_series(&six, &sol.truncate(8), &map).unwrap();
    let (checked, bad) = compare(&xis, TABLE3, 8);
    r.line(3, true, bad.is_empty(), format!("{checked} cells of Xi1..Xi5 for p<=8; mismatches {bad:?}"));

    // 4: transfer matrix against the oracle.
    let mut disagree = Vec::new();
    for legs in [2, 4, 6] {
        let oracle = oracle_table(legs, 4, OracleOptions::default()).unwrap();
        let tm = enumerate(&EnumerateOptions::new(legs, 4).tangencies(true)).unwrap().table;
        if oracle.to_csv() != tm.to_csv() {
            disagree.push(legs);
        }
    }
    r.line(
        4,
        true,
        disagree.is_empty(),
        format!("all cells with p1+p2<=4 for 2, 4, 6 legs; disagreeing leg counts {disagree:?}"),
    );

    // 5: 2PI two-leg diagrams.
    let sigma: Vec<u64> = (1..=5).map(|p| count_2pi(p, 50_000_000).unwrap().two_pi).collect();
    r.line(5, true, sigma == [2, 0, 2, 4, 12], format!("Sigma2 for p=1..5 is {sigma:?}"));

    // 6: growth fit and the conjectured exponent.
    let fit = fit_growth(&table1, GrowthModel::LogCorrected, None).unwrap();
    let alpha0 = conjectured_alpha(0.0).unwrap();
    r.line(
        6,
        true,
        (fit.growth - 11.416).abs() <= 0.02 && (fit.alpha - 2.97).abs() <= 0.2 && alpha0 == 3.0,
        format!(
            "exp(s)={:.4} alpha={:.3} on p={}..{}, conjectured alpha(0)={alpha0}",
            fit.growth, fit.alpha, fit.window.0, fit.window.1
        ),
    );

    // 7: property suite, one representative check per property.
    let mut props = Vec::new();
    props.push(("residual", verify_solution(&two, &four, &sol, &map).is_ok()));
    let stable = (0..10).all(|m| {
        solve_couplings(&two.truncate(m), &four.truncate(m), m).map_or(false, |s| s == sol.truncate(m))
    });
    props.push(("triangular", stable));
    let channels = solved_channels(&sol, &four, &map).unwrap();
    let counting = gammas.values().chain(xis.values()).all(GSeries::is_counting_series) && channels.is_counting();
    props.push(("nonnegative", counting));
    let g1 = gammas["Gamma1"].clone();
    let g2 = gammas["Gamma2"].clone();
    let ch = channel_decompose(&g1, &g2, 10).unwrap();
    let one = GSeries::one(10);
    let g = GSeries::g(10);
    let n1 = LoopPolynomial::from_ints([1, 1]);
    let all = &one - &(&(&one - &g) * &(&(&one + &g2.scale(&n1)) + &g1)).reciprocal().unwrap();
    props.push(("divisible", ch.v2.scale(&LoopPolynomial::n()) == &all - &(&ch.h2 + &ch.h1)));
    let threaded = |t| {
        enumerate(&EnumerateOptions::new(6, 5).tangencies(true).threads(t).chunk_size(3))
            .unwrap()
            .table
            .to_csv()
    };
    let base = threaded(1);
    props.push(("threads", threaded(2) == base && threaded(8) == base));
    let plain = enumerate(&EnumerateOptions::new(6, 5).tangencies(true).symmetric(false)).unwrap().table;
    props.push(("reflection", plain.reflected() == plain));
    let incremental = (0..6).all(|m| {
        enumerate(&EnumerateOptions::new(4, m).tangencies(true)).unwrap().table
            == enumerate(&EnumerateOptions::new(4, 6).tangencies(true)).unwrap().table.truncate(m)
    });
    props.push(("incremental", incremental));
    let failed: Vec<&str> = props.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    let names: Vec<&str> = props.iter().map(|(n, _)| *n).collect();
    r.line(7, true, failed.is_empty(), format!("checked {names:?}; failed {failed:?}"));

    if r.failed > 0 {
        eprintln!("{} blocking criteria failed", r.failed);
        std::process::exit(1);
    }
}
