use crate::error::{Error, Result};
use crate::num::Real;

fn is_constant<T: Real>(xs: &[T]) -> bool {
    xs.iter().all(|&x| x == xs[0])
}

/// Pearson correlation, computed on centered values.
///
/// Errors with `DegenerateVariance("x")` or `("y")` naming the constant side.
pub fn pearson<T: Real>(xs: &[T], ys: &[T]) -> Result<T> {
    assert_eq!(xs.len(), ys.len(), "correlated series differ in length");
    if xs.len() < 2 {
        return Err(Error::TooFewRows(xs.len()));
    }
    if is_constant(xs) {
        return Err(Error::DegenerateVariance("x"));
    }
    if is_constant(ys) {
        return Err(Error::DegenerateVariance("y"));
    }
    let n = T::from_usize(xs.len()).expect("row count fits the scalar");
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy = sxy + dx * dy;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp_to(-T::one(), T::one()))
}

/// Ranks starting at 1, ties sharing their average rank.
pub fn average_ranks<T: Real>(xs: &[T]) -> Vec<T> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).expect("ranked values are not NaN"));
    let mut ranks = vec![T::zero(); xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        // positions i..=j share the mean of ranks i+1..=j+1
        let avg = T::from_f64_lossy((i + j) as f64 / 2.0 + 1.0);
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation: Pearson over average ranks.
pub fn spearman<T: Real>(xs: &[T], ys: &[T]) -> Result<T> {
    pearson(&average_ranks(xs), &average_ranks(ys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Textbook single-pass formula, independent of the centered route.
    fn oracle(xs: &[f64], ys: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let sx: f64 = xs.iter().sum();
        let sy: f64 = ys.iter().sum();
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let syy: f64 = ys.iter().map(|y| y * y).sum();
        (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt())
    }

    #[test]
    fn identical_series() {
        let xs = [0.1f64, 0.4, 0.35, 0.9];
        assert!((pearson(&xs, &xs).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_series_is_degenerate() {
        assert!(matches!(
            pearson(&[0.1, 0.1, 0.1], &[1.0, 2.0, 3.0]),
            Err(Error::DegenerateVariance("x"))
        ));
        assert!(matches!(pearson(&[1.0], &[1.0]), Err(Error::TooFewRows(1))));
    }

    #[test]
    fn five_row_fixture_minus_half() {
        // dx = (-2,-1,0,1,2), dy = (0,1,2,-2,-1): sxy = -5, sxx = syy = 10.
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let ys = [-1.0, 0.0, 1.0, -3.0, -2.0];
        let expected = oracle(&xs, &ys);
        assert!((expected + 0.5).abs() < 1e-12, "oracle gave {expected}");
        assert!((pearson(&xs, &ys).unwrap() + 0.5).abs() < 1e-9);
    }

    #[test]
    fn ranks_average_ties() {
        assert_eq!(average_ranks(&[10.0, 20.0, 10.0, 30.0]), vec![1.5, 3.0, 1.5, 4.0]);
    }

    #[test]
    fn spearman_sees_monotone_relation() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| x.powi(5)).collect();
        assert!((spearman(&xs, &ys).unwrap() - 1.0).abs() < 1e-12);
        assert!(pearson(&xs, &ys).unwrap() < 1.0);
    }

    proptest! {
        #[test]
        fn symmetric_and_affine_invariant(
            rows in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 3..40),
            scale in 0.1f64..10.0,
            shift in -5.0f64..5.0,
        ) {
            let xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
            let ys: Vec<f64> = rows.iter().map(|r| r.1).collect();
            let r = pearson(&xs, &ys).unwrap();
            prop_assert!((-1.0..=1.0).contains(&r));
            prop_assert!((r - pearson(&ys, &xs).unwrap()).abs() <= 1e-12);
            let moved: Vec<f64> = xs.iter().map(|x| scale * x + shift).collect();
            prop_assert!((r - pearson(&moved, &ys).unwrap()).abs() <= 1e-9);
            prop_assert!((r - oracle(&xs, &ys)).abs() <= 1e-9);
        }
    }
}
