use conledisco_core::eval::{average_precision, interpolated_11pt, precision_recall_points, RelevanceList};
use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::Zero;
use proptest::prelude::*;

/// Looks up the first rank of each gold pair, one pair at a time.
fn brute_ap(flags: &[bool], n: u64) -> BigRational {
    let mut total = BigRational::zero();
    for gold_index in 1..=n {
        // the gold_index-th relevant item, if retrieved
        let mut seen = 0;
        for (rank, &hit) in flags.iter().enumerate() {
            if hit {
                seen += 1;
                if seen == gold_index {
                    let precision = flags[..=rank].iter().filter(|&&h| h).count();
                    total += BigRational::new(BigInt::from(precision), BigInt::from(rank + 1));
                    break;
                }
            }
        }
    }
    total / BigRational::from_integer(BigInt::from(n))
}

fn brute_curve(flags: &[bool], n: u64) -> Vec<Ratio<u64>> {
    (0..=10)
        .map(|level| {
            let mut best = Ratio::zero();
            for k in 1..=flags.len() {
                let hits = flags[..k].iter().filter(|&&h| h).count() as u64;
                // recall >= level/10  <=>  10 * hits >= level * n
                if 10 * hits >= level * n {
                    best = best.max(Ratio::new(hits, k as u64));
                }
            }
            best
        })
        .collect()
}

fn arb_list() -> impl Strategy<Value = (Vec<bool>, u64)> {
    (1u64..=100).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), 0..=200).prop_map(move |mut flags| {
            let mut hits = 0;
            for f in flags.iter_mut() {
                if *f {
                    hits += 1;
                    if hits > n {
                        *f = false;
                    }
                }
            }
            (flags, n)
        })
    })
}

proptest! {
    #[test]
    fn ap_and_curve_match_brute_force((flags, n) in arb_list()) {
        let rl = RelevanceList::from_flags(&flags, n);
        prop_assert_eq!(average_precision(&rl).unwrap(), brute_ap(&flags, n));
        let curve = interpolated_11pt(&precision_recall_points(&rl).unwrap());
        prop_assert_eq!(curve.to_vec(), brute_curve(&flags, n));
        prop_assert!(curve.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn ap_is_one_iff_gold_fills_the_top((flags, n) in arb_list()) {
        let ap = average_precision(&RelevanceList::from_flags(&flags, n)).unwrap();
        let top = flags.len() >= n as usize && flags[..n as usize].iter().all(|&h| h);
        prop_assert_eq!(ap == BigRational::from_integer(BigInt::from(1)), top);
        prop_assert!(ap >= BigRational::zero() && ap <= BigRational::from_integer(BigInt::from(1)));
    }

    #[test]
    fn trailing_misses_keep_recall((flags, n) in arb_list(), extra in 0usize..20) {
        let base = RelevanceList::from_flags(&flags, n);
        let mut longer = flags.clone();
        longer.extend(std::iter::repeat_n(false, extra));
        let longer = RelevanceList::from_flags(&longer, n);
        prop_assert_eq!(base.retrieved_relevant(), longer.retrieved_relevant());
        prop_assert_eq!(average_precision(&base).unwrap(), average_precision(&longer).unwrap());
    }
}
