use std::sync::OnceLock;

use proptest::prelude::*;
use tangle_core::poly::LoopPolynomial;
use tangle_core::renorm::{
    channel_decompose, solve_couplings, solved_channels, tangle_series, verify_solution, ClassMap,
    CouplingSolution,
};
use tangle_core::series::GSeries;
use tangle_core::table::CountTable;
use tangle_core::tm::{enumerate, EnumerateOptions, Enumerator};

const ORDER: usize = 10;
const SIX_ORDER: usize = 8;

struct Inputs {
    two: CountTable,
    four: CountTable,
    six: CountTable,
    sol: CouplingSolution,
}

fn counts(legs: usize, order: usize) -> CountTable {
    enumerate(&EnumerateOptions::new(legs, order).tangencies(true).tangency_cost(3))
        .unwrap()
        .table
}

fn inputs() -> &'static Inputs {
    static CELL: OnceLock<Inputs> = OnceLock::new();
    CELL.get_or_init(|| {
        let two = counts(2, ORDER);
        let four = counts(4, ORDER);
        let six = counts(6, SIX_ORDER);
        let sol = solve_couplings(&two, &four, ORDER).unwrap();
        Inputs { two, four, six, sol }
    })
}

fn small_series() -> impl Strategy<Value = GSeries> {
    prop::collection::vec(prop::collection::vec(-4i64..5, 0..3), 1..6).prop_map(|rows| {
        let mut coeffs = vec![LoopPolynomial::zero()];
        coeffs.extend(rows.into_iter().map(LoopPolynomial::from_ints));
        GSeries::from_coeffs(coeffs)
    })
}

#[test]
fn two_leg_function_is_one_after_solving() {
    let inp = inputs();
    verify_solution(&inp.two, &inp.four, &inp.sol, &ClassMap::builtin()).unwrap();
}

#[test]
fn renormalized_series_count_tangles() {
    let inp = inputs();
    let map = ClassMap::builtin();
    let four = tangle_series(&inp.four, &inp.sol, &map).unwrap();
    let six = tangle_series(&inp.six, &inp.sol.truncate(SIX_ORDER), &map).unwrap();
    for (name, s) in four.iter().chain(&six) {
        assert!(s.is_counting_series(), "{name}: {s}");
    }
    let ch = solved_channels(&inp.sol, &inp.four, &map).unwrap();
    assert!(ch.is_counting(), "{ch:?}");
}

#[test]
fn thread_count_does_not_change_output() {
    let run = |threads| {
        let e = enumerate(
            &EnumerateOptions::new(6, 5)
                .tangencies(true)
                .threads(threads)
                .chunk_size(3),
        )
        .unwrap();
        (e.table.to_csv(), e.levels.iter().map(|l| l.states).collect::<Vec<_>>())
    };
    let one = run(1);
    assert_eq!(run(2), one);
    assert_eq!(run(8), one);
}

#[test]
fn symmetric_merging_is_exact() {
    for legs in [2, 4, 6] {
        let opts = EnumerateOptions::new(legs, 5).tangencies(true);
        let merged = enumerate(&opts).unwrap().table;
        let plain = enumerate(&opts.clone().symmetric(false)).unwrap().table;
        assert_eq!(merged.to_csv(), plain.to_csv(), "legs={legs}");
    }
}

#[test]
fn counts_are_reflection_symmetric() {
    for legs in [2, 4, 6] {
        let t = enumerate(&EnumerateOptions::new(legs, 5).tangencies(true).symmetric(false))
            .unwrap()
            .table;
        assert_eq!(t.reflected(), t, "legs={legs}");
    }
}

#[test]
fn checkpoint_resume_matches_straight_run() {
    let opts = EnumerateOptions::new(4, 6).tangencies(true).tangency_cost(2);
    let straight = enumerate(&opts).unwrap().table;
    let mut e = Enumerator::new(opts.clone()).unwrap();
    for _ in 0..3 {
        e.step().unwrap();
    }
    let entries = e
        .frontier_entries()
        .map(|(d, h, k, t)| (d, h, k.to_vec(), t.clone()))
        .collect();
    let mut resumed = Enumerator::resume(opts, e.level(), e.table().clone(), entries).unwrap();
    resumed.run_with(|_, _| Ok(())).unwrap();
    assert_eq!(resumed.table().to_csv(), straight.to_csv());
}

#[test]
fn cost_table_rejects_early_tangency_coupling() {
    use tangle_core::compose::{Couplings, Substitution};
    use tangle_core::Error;
    let table = counts(4, 4);
    let t = GSeries::one(4);
    let g = GSeries::g(4);
    let sub = Substitution::new(Couplings { t: &t, g1: &g, g2: &g }, 4).unwrap();
    assert!(matches!(
        sub.eval(&table, &"12-34".parse().unwrap()),
        Err(Error::TangencyCost { cost: 3, valuation: 1 })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn solution_is_stable_under_order_extension(m in 0usize..=ORDER) {
        let inp = inputs();
        let lower = solve_couplings(&inp.two.truncate(m), &inp.four.truncate(m), m).unwrap();
        prop_assert_eq!(lower, inp.sol.truncate(m));
    }

    #[test]
    fn lower_orders_do_not_depend_on_the_target(legs in prop::sample::select(vec![2usize, 4, 6]), m in 0usize..5, extra in 1usize..3) {
        let opts = |order| EnumerateOptions::new(legs, order).tangencies(true);
        let short = enumerate(&opts(m)).unwrap().table;
        let long = enumerate(&opts(m + extra)).unwrap().table;
        prop_assert_eq!(long.truncate(m), short);
    }

    #[test]
    fn tangency_cost_only_drops_cells(legs in prop::sample::select(vec![2usize, 4, 6]), order in 0usize..6, cost in 2usize..4) {
        let full = enumerate(&EnumerateOptions::new(legs, order).tangencies(true)).unwrap().table;
        let cheap = enumerate(&EnumerateOptions::new(legs, order).tangencies(true).tangency_cost(cost))
            .unwrap()
            .table;
        let kept = full.with_tangency_cost(cost).truncate(order);
        prop_assert_eq!(cheap.to_csv(), kept.to_csv());
    }

    #[test]
    fn vertical_channel_is_divisible_by_n(gamma1 in small_series(), gamma2 in small_series()) {
        let order = gamma1.order().min(gamma2.order());
        let ch = channel_decompose(&gamma1, &gamma2, order).unwrap();
        // n V2 = (1 - 1/((1-g)(1+(n+1)G2+G1))) - (H2 + H1)
        let one = GSeries::one(order);
        let g = GSeries::g(order);
        let n1 = LoopPolynomial::from_ints([1, 1]);
        let all = &one - &(&(&one - &g) * &(&(&one + &gamma2.scale(&n1)) + &gamma1)).reciprocal().unwrap();
        let plus = &ch.h2 + &ch.h1;
        prop_assert_eq!(ch.v2.scale(&LoopPolynomial::n()), &all - &plus);
    }

    #[test]
    fn csv_round_trips(legs in prop::sample::select(vec![2usize, 4, 6]), order in 0usize..5) {
        let t = enumerate(&EnumerateOptions::new(legs, order).tangencies(true)).unwrap().table;
        // An empty table has no rows to carry its leg count.
        prop_assume!(t.entries().count() > 0);
        prop_assert_eq!(CountTable::from_csv(&t.to_csv(), Some(order)).unwrap(), t);
    }
}
