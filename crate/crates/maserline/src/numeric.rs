//! Small numeric utilities shared by the closed-form modules: deterministic
//! pairwise summation and golden-section minimization.

/// Sum with a fixed pairwise-tree reduction, ascending index order.
///
/// The reduction order is part of the crate's determinism contract: results
/// must not depend on thread schedule, so every summation over photon number
/// goes through this function.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

const INV_PHI: f64 = 0.618_033_988_749_894_8; // (√5 − 1) / 2

/// Golden-section minimum of a unimodal `f` on [a, b].
///
/// Shrinks the bracket until its width is ≤ `tol_x`, then returns the best
/// probed point. For non-unimodal `f` this still converges to some local
/// minimum inside the bracket.
pub fn golden_min(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol_x: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol_x {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_small_slices() {
        let xs: Vec<f64> = (0..17).map(|i| i as f64 * 0.1).collect();
        let naive: f64 = xs.iter().sum();
        assert_eq!(pairwise_sum(&xs), naive);
    }

    #[test]
    fn pairwise_is_exact_on_powers_of_two() {
        let xs = vec![1.0; 1 << 12];
        assert_eq!(pairwise_sum(&xs), 4096.0);
    }

    #[test]
    fn pairwise_beats_naive_on_ill_conditioned_sum() {
        // Large head cancels; pairwise keeps the small tail intact.
        let mut xs = vec![1e16, -1e16];
        xs.extend(std::iter::repeat(1.0).take(1000));
        assert_eq!(pairwise_sum(&xs), 1000.0);
    }

    #[test]
    fn golden_finds_parabola_minimum() {
        // Near the minimum the offset parabola is flat to f64: any x with
        // (x − 1.25)² < ulp(3.0)/2, i.e. |x − 1.25| ≲ 1.5e−8, evaluates to
        // exactly 3.0, so the achievable x-accuracy is that plateau width.
        let (x, v) = golden_min(|x| (x - 1.25) * (x - 1.25) + 3.0, -10.0, 10.0, 1e-10);
        assert!((x - 1.25).abs() < 5e-8);
        assert!((v - 3.0).abs() < 1e-15);
    }

    #[test]
    fn golden_handles_minimum_at_edge() {
        let (x, _) = golden_min(|x| x, 0.0, 1.0, 1e-9);
        assert!(x < 1e-8);
    }
}
