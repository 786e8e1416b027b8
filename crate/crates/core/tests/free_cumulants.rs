use proptest::prelude::*;
use qfree::laws::{cumulants_from_moments, moments_from_cumulants, ScalarSeries, SeriesKind};
use qfree::C64;

/// Set partitions of `0..n` as restricted growth strings.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn grow(prefix: &mut Vec<usize>, n: usize, max: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for b in 0..=max + 1 {
            prefix.push(b);
            grow(prefix, n, max.max(b), out);
            prefix.pop();
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    grow(&mut vec![0], n, 0, &mut out);
    out
}

fn non_crossing(p: &[usize]) -> bool {
    let n = p.len();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    if p[a] == p[c] && p[b] == p[d] && p[a] != p[b] {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn block_sizes(p: &[usize]) -> Vec<usize> {
    let blocks = p.iter().max().map_or(0, |m| m + 1);
    let mut sizes = vec![0; blocks];
    p.iter().for_each(|&b| sizes[b] += 1);
    sizes
}

/// `m_n = Σ_{π ∈ NC(n)} Π_{B ∈ π} κ_|B|`, summed by enumeration.
fn moment_by_enumeration(kappa: &[f64], n: usize) -> f64 {
    set_partitions(n)
        .iter()
        .filter(|p| non_crossing(p))
        .map(|p| block_sizes(p).iter().map(|&s| kappa[s - 1]).product::<f64>())
        .sum()
}

fn count_non_crossing_pairings(n: usize) -> usize {
    set_partitions(n)
        .iter()
        .filter(|p| non_crossing(p) && block_sizes(p).iter().all(|&s| s == 2))
        .count()
}

#[test]
fn enumeration_sanity() {
    // Bell numbers and Catalan numbers
    assert_eq!(set_partitions(5).len(), 52);
    let nc: Vec<usize> = (1..=6).map(|n| set_partitions(n).iter().filter(|p| non_crossing(p)).count()).collect();
    assert_eq!(nc, vec![1, 2, 5, 14, 42, 132]);
}

#[test]
fn semicircle_moments_count_pairings() {
    let mut kappa = vec![0.0; 8];
    kappa[1] = 1.0;
    let m = moments_from_cumulants(&ScalarSeries::from_real(&kappa, SeriesKind::FreeCumulants));
    for n in 1..=8 {
        let pairings = count_non_crossing_pairings(n);
        assert_eq!(m.get(n), C64::new(pairings as f64, 0.0), "order {n}");
    }
    assert_eq!([2, 4, 6, 8].map(count_non_crossing_pairings), [1, 2, 5, 14]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moments_match_partition_sum(kappa in prop::collection::vec(-1.5..1.5f64, 7)) {
        let m = moments_from_cumulants(&ScalarSeries::from_real(&kappa, SeriesKind::FreeCumulants));
        for n in 1..=7 {
            let expected = moment_by_enumeration(&kappa, n);
            prop_assert!((m.get(n).re - expected).abs() <= 1e-11 * (1.0 + expected.abs()), "n={} {} vs {}", n, m.get(n), expected);
            prop_assert!(m.get(n).im.abs() < 1e-15);
        }
    }

    #[test]
    fn low_order_relations(m in prop::collection::vec(-2.0..2.0f64, 4)) {
        let k = cumulants_from_moments(&ScalarSeries::from_real(&m, SeriesKind::Moments));
        let (m1, m2, m3, m4) = (m[0], m[1], m[2], m[3]);
        let k2 = m2 - m1 * m1;
        let k3 = m3 - 3.0 * m2 * m1 + 2.0 * m1.powi(3);
        let k4 = m4 - 4.0 * m1 * m3 - 2.0 * m2 * m2 + 10.0 * m1 * m1 * m2 - 5.0 * m1.powi(4);
        prop_assert!((k.get(1).re - m1).abs() < 1e-13);
        prop_assert!((k.get(2).re - k2).abs() < 1e-12);
        prop_assert!((k.get(3).re - k3).abs() < 1e-12);
        prop_assert!((k.get(4).re - k4).abs() < 1e-11);
    }

    #[test]
    fn round_trip_complex(re in prop::collection::vec(-1.0..1.0f64, 8), im in prop::collection::vec(-1.0..1.0f64, 8)) {
        let coeffs: Vec<C64> = re.iter().zip(&im).map(|(&a, &b)| C64::new(a, b)).collect();
        let m = ScalarSeries::new(coeffs.clone(), SeriesKind::Moments);
        let back = moments_from_cumulants(&cumulants_from_moments(&m));
        for (a, b) in back.coeffs().iter().zip(&coeffs) {
            // order-8 coefficients reach ~10⁴ times the inputs
            prop_assert!((a - b).norm() <= 1e-10);
        }
    }
}
