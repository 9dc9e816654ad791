use crate::scalar::Real;

/// Logistic function, evaluated without overflow for large `|z|`.
#[inline]
pub fn sigmoid<T: Real>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

/// `ln(1 + e^z)`.
#[inline]
pub fn softplus<T: Real>(z: T) -> T {
    z.max(T::zero()) + (-z.abs()).exp().ln_1p()
}

/// Binary cross-entropy of `sigmoid(z)` against target `t` in {0, 1}.
#[inline]
pub fn bce_with_logit<T: Real>(z: T, t: T) -> T {
    softplus(z) - t * z
}

/// Logistic density `sigma(z) * (1 - sigma(z))`.
#[inline]
pub fn logistic_pdf<T: Real>(z: T) -> T {
    sigmoid(z) * sigmoid(-z)
}

/// `sigma(a) - sigma(b)` for `a >= b`, free of cancellation when both saturate.
#[inline]
pub fn sigmoid_gap<T: Real>(a: T, b: T) -> T {
    sigmoid(a) * sigmoid(-b) * -(b - a).exp_m1()
}

pub fn log_sum_exp<T: Real>(z: &[T]) -> T {
    let m = z.iter().copied().fold(T::neg_infinity(), T::max);
    let s: T = z.iter().map(|&v| (v - m).exp()).sum();
    m + s.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_values() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(1.0f64) - 0.731_058_578_630_004_9).abs() < 1e-15);
        assert!(sigmoid(-800.0_f64) >= 0.0);
        assert_eq!(sigmoid(800.0_f64), 1.0);
    }

    #[test]
    fn gap_matches_direct_difference() {
        for &(a, b) in &[(1.0, 0.0), (0.3, -2.0), (5.0, 4.9), (-1.0, -3.0)] {
            let direct: f64 = sigmoid(a) - sigmoid(b);
            assert!((sigmoid_gap(a, b) - direct).abs() < 1e-15);
        }
        // both saturated: direct difference would round to zero
        assert!(sigmoid_gap(40.0_f64, 39.0) > 0.0);
    }

    #[test]
    fn bce_saturates() {
        assert!(bce_with_logit(40.0_f64, 1.0) < 1e-15);
        assert!((bce_with_logit(0.0_f64, 1.0) - std::f64::consts::LN_2).abs() < 1e-15);
    }
}
