use num_bigint::BigInt;
use proptest::prelude::*;
use tangle_core::asymptotics::{conjectured_alpha, fit_growth, GrowthModel};

fn table1_g() -> Vec<(usize, BigInt)> {
    let text = include_str!("../../../fixtures/table1.csv");
    text.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap())
        })
        .collect()
}

#[test]
fn log_corrected_fit_of_two_leg_counts() {
    let f = fit_growth(&table1_g(), GrowthModel::LogCorrected, None).unwrap();
    assert_eq!(f.window, (8, 22));
    assert!((f.growth - 11.416).abs() <= 0.02, "{f:?}");
    assert!((f.alpha - 2.97).abs() <= 0.2, "{f:?}");
    assert!(f.residual < 1e-6);
}

#[test]
fn pure_power_is_reported_alongside() {
    let f = fit_growth(&table1_g(), GrowthModel::PurePower, None).unwrap();
    assert!(f.growth > 11.0 && f.growth < 11.5, "{f:?}");
    assert_eq!(f.a, 0.0);
}

#[test]
fn synthetic_power_law_is_recovered() {
    let seq: Vec<(usize, BigInt)> = (1..=22u32)
        .map(|p| {
            let v = 5.0 * 7f64.powi(p as i32) / (p as f64).powi(2);
            (p as usize, BigInt::from(v.round() as u128))
        })
        .collect();
    let f = fit_growth(&seq, GrowthModel::PurePower, None).unwrap();
    assert!((f.growth / 7.0 - 1.0).abs() < 0.01, "{f:?}");
    assert!((f.alpha / 2.0 - 1.0).abs() < 0.05, "{f:?}");
}

#[test]
fn synthetic_log_corrected_is_recovered() {
    let seq: Vec<(usize, BigInt)> = (1..=22u32)
        .map(|p| {
            let pf = p as f64;
            let v = 1e6 * 9f64.powf(pf) * pf.powf(-3.0) * (0.5 * pf.ln() + 0.2);
            (p as usize, BigInt::from(v.round() as u128))
        })
        .collect();
    let f = fit_growth(&seq, GrowthModel::LogCorrected, Some(1..=22)).unwrap();
    assert!((f.growth - 9.0).abs() < 1e-3, "{f:?}");
    assert!((f.alpha - 3.0).abs() < 1e-2, "{f:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn fit_ignores_overall_scale(factor in 2u64..1_000_000) {
        let seq = table1_g();
        let scaled: Vec<_> = seq.iter().map(|(p, c)| (*p, c * factor)).collect();
        for model in [GrowthModel::PurePower, GrowthModel::LogCorrected] {
            let a = fit_growth(&seq, model, None).unwrap();
            let b = fit_growth(&scaled, model, None).unwrap();
            prop_assert!((a.s_hat - b.s_hat).abs() < 1e-6);
            prop_assert!((a.alpha - b.alpha).abs() < 1e-4);
        }
    }

    #[test]
    fn conjecture_decreases(x in 0.0f64..2.0, dx in 1e-6f64..0.5) {
        let y = (x + dx).min(2.0);
        prop_assume!(y > x);
        prop_assert!(conjectured_alpha(y).unwrap() < conjectured_alpha(x).unwrap());
    }
}
