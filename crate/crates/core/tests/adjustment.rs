use proptest::prelude::*;
use trustrep::{apply_adjustment, trust_adjustment, Choice, TrustAdjustment};

/// Reward magnitude in hundredths for a trustworthiness given in tenths.
fn oracle_hundredths(tenths: i32) -> i32 {
    match tenths.abs() {
        0 => 0,
        1..=30 => 25,
        31..=50 => 50,
        51..=70 => 75,
        71..=80 => 100,
        81..=90 => 150,
        _ => 200,
    }
}

fn oracle(tenths: i32, choice: Choice) -> TrustAdjustment {
    if tenths == -100 && choice == Choice::Like {
        return TrustAdjustment::Override(-10.0);
    }
    let m = oracle_hundredths(tenths);
    let rewarded =
        (tenths > 0 && choice == Choice::Like) || (tenths < 0 && choice == Choice::Dislike);
    let signed = if rewarded { m } else { -m };
    TrustAdjustment::Delta(f64::from(signed) / 100.0)
}

#[test]
fn full_grid_matches_integer_oracle() {
    for tenths in -100..=100 {
        let ft = f64::from(tenths) / 10.0;
        for choice in [Choice::Like, Choice::Dislike] {
            assert_eq!(
                trust_adjustment(ft, choice).unwrap(),
                oracle(tenths, choice),
                "ft={ft} choice={choice:?}"
            );
        }
    }
}

/// The published rule table, transcribed literally. Each row is
/// (lower, lower inclusive, upper, upper inclusive, choice, outcome).
/// Rows 7 to 12 punish, so the outcome is a decrement.
fn literal_table() -> Vec<(f64, bool, f64, bool, Choice, f64)> {
    use Choice::*;
    vec![
        (0.0, false, 3.0, true, Like, 0.25),
        (-3.0, true, 0.0, true, Dislike, 0.25),
        (3.0, false, 5.0, true, Like, 0.5),
        (-5.0, true, -3.0, false, Dislike, 0.5),
        (5.0, false, 7.0, true, Like, 0.75),
        (-7.0, true, -5.0, false, Dislike, 0.75),
        (7.0, false, 8.0, true, Like, 1.0),
        (-8.0, true, -7.0, false, Dislike, 1.0),
        (8.0, false, 9.0, true, Like, 1.5),
        (-9.0, true, -8.0, false, Dislike, 1.5),
        (9.0, false, 10.0, true, Like, 2.0),
        (-10.0, true, -9.0, false, Dislike, 2.0),
        (-3.0, true, 0.0, true, Like, -0.25),
        (0.0, true, 3.0, true, Dislike, -0.25),
        (-5.0, true, -3.0, false, Like, -0.5),
        (3.0, true, 5.0, true, Dislike, -0.5),
        (-7.0, true, -5.0, false, Like, -0.75),
        (5.0, true, 7.0, true, Dislike, -0.75),
        (-8.0, true, -7.0, false, Like, -1.0),
        (7.0, true, 8.0, true, Dislike, -1.0),
        (-9.0, true, -8.0, false, Like, -1.5),
        (8.0, true, 9.0, true, Dislike, -1.5),
        (-10.0, true, -9.0, false, Like, -2.0),
        (9.0, true, 10.0, true, Dislike, -2.0),
    ]
}

#[test]
fn interior_points_match_literal_table() {
    let table = literal_table();
    let boundaries = [0.0, 3.0, 5.0, 7.0, 8.0, 9.0, 10.0];
    let mut checked = 0;
    for tenths in -99..=99 {
        let ft = f64::from(tenths) / 10.0;
        if boundaries.contains(&ft.abs()) {
            continue;
        }
        for choice in [Choice::Like, Choice::Dislike] {
            let rows: Vec<f64> = table
                .iter()
                .filter(|(lo, lo_in, hi, hi_in, c, _)| {
                    *c == choice
                        && (if *lo_in { ft >= *lo } else { ft > *lo })
                        && (if *hi_in { ft <= *hi } else { ft < *hi })
                })
                .map(|r| r.5)
                .collect();
            assert_eq!(rows.len(), 1, "ft={ft} {choice:?} matched {rows:?}");
            assert_eq!(
                trust_adjustment(ft, choice).unwrap(),
                TrustAdjustment::Delta(rows[0])
            );
            checked += 1;
        }
    }
    assert_eq!(checked, 2 * (199 - 11));
}

#[test]
fn anchored_points() {
    use TrustAdjustment::*;
    assert_eq!(trust_adjustment(9.5, Choice::Like).unwrap(), Delta(2.0));
    assert_eq!(trust_adjustment(4.0, Choice::Dislike).unwrap(), Delta(-0.5));
    assert_eq!(
        trust_adjustment(-2.0, Choice::Dislike).unwrap(),
        Delta(0.25)
    );
    assert_eq!(
        trust_adjustment(-10.0, Choice::Like).unwrap(),
        Override(-10.0)
    );
    assert_eq!(
        trust_adjustment(-10.0, Choice::Dislike).unwrap(),
        Delta(2.0)
    );
}

#[test]
fn out_of_range_trustworthiness_is_rejected() {
    for ft in [10.01, -10.01, f64::NAN, f64::INFINITY] {
        assert!(trust_adjustment(ft, Choice::Like).is_err());
    }
}

#[test]
fn fresh_user_needs_five_maximal_rewards() {
    let mut t = 0.0;
    let mut n = 0;
    while t < 10.0 {
        t = apply_adjustment(t, trust_adjustment(10.0, Choice::Like).unwrap());
        n += 1;
    }
    assert_eq!(n, 5);
    assert_eq!(t, 10.0);
}

fn trust() -> impl Strategy<Value = f64> {
    prop_oneof![
        (-100i32..=100).prop_map(|t| f64::from(t) / 10.0),
        -10.0..=10.0f64,
        Just(-10.0),
        Just(10.0),
    ]
}

fn choice() -> impl Strategy<Value = Choice> {
    prop_oneof![Just(Choice::Like), Just(Choice::Dislike)]
}

proptest! {
    #[test]
    fn trust_never_leaves_bounds(votes in prop::collection::vec((trust(), choice()), 0..200)) {
        let mut t = 0.0;
        for (ft, c) in votes {
            t = apply_adjustment(t, trust_adjustment(ft, c).unwrap());
            prop_assert!((-10.0..=10.0).contains(&t));
        }
    }

    #[test]
    fn like_and_dislike_are_opposite(ft in trust()) {
        prop_assume!(ft != -10.0);
        let like = trust_adjustment(ft, Choice::Like).unwrap();
        let dislike = trust_adjustment(ft, Choice::Dislike).unwrap();
        match (like, dislike) {
            (TrustAdjustment::Delta(a), TrustAdjustment::Delta(b)) => prop_assert_eq!(a, -b),
            other => prop_assert!(false, "unexpected {other:?}"),
        }
    }

    #[test]
    fn mirrored_trustworthiness_mirrors_choice(ft in trust()) {
        prop_assume!(ft.abs() != 10.0);
        prop_assert_eq!(
            trust_adjustment(ft, Choice::Like).unwrap(),
            trust_adjustment(-ft, Choice::Dislike).unwrap()
        );
    }

    #[test]
    fn reward_grows_with_trustworthiness(a in trust(), b in trust()) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assume!(lo > 0.0);
        let reward = |ft| match trust_adjustment(ft, Choice::Like).unwrap() {
            TrustAdjustment::Delta(d) => d,
            TrustAdjustment::Override(_) => unreachable!(),
        };
        prop_assert!(reward(lo) <= reward(hi));
    }

    #[test]
    fn liking_a_contradictory_feedback_floors(before in trust()) {
        let adj = trust_adjustment(-10.0, Choice::Like).unwrap();
        prop_assert_eq!(apply_adjustment(before, adj), -10.0);
    }
}
