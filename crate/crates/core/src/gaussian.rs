//! Gaussian special functions in the `erf` normalization.
//!
//! Everything here uses the density `e^{-u²}/√π`, whose cumulative function
//! measured from zero is `Φ(u) = erf(u)/2`. Interval quantities are returned in
//! a scaled form so that far-tail intervals neither underflow nor cancel.

use libm::{erf, erfc};
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// `Φ(u) = (1/√π)∫₀ᵘ e^{-t²} dt = erf(u)/2`, with `Φ(±∞) = ±1/2`.
pub fn phi(u: f64) -> f64 {
    if u == f64::INFINITY {
        0.5
    } else if u == f64::NEG_INFINITY {
        -0.5
    } else {
        0.5 * erf(u)
    }
}

/// Scaled complementary error function `erfcx(x) = e^{x²} erfc(x)`.
pub fn erfcx(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        // overflows to +∞ for x below about -26, which is the correct limit
        return 2.0 * (x * x).exp() - erfcx(-x);
    }
    if x < 5.0 {
        return (x * x).exp() * erfc(x);
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    // Laplace continued fraction, evaluated bottom-up:
    // erfcx(x) = (1/√π) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    let mut tail = x;
    for k in (1..=60).rev() {
        tail = x + (k as f64 * 0.5) / tail;
    }
    FRAC_1_SQRT_PI / tail
}

/// Probability mass and density jump of the interval `[alpha, beta)`, both
/// carrying a common factor `e^{-m²}` that is kept separate.
///
/// With `D = e^{-α²} - e^{-β²}` and `P = Φ(β) - Φ(α)` the fields satisfy
/// `D = e^{-m²}·jump` and `P = e^{-m²}·mass`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledInterval {
    /// `m²`, the squared distance from the origin to the interval (0 if it
    /// straddles the origin).
    pub log_scale: f64,
    pub jump: f64,
    pub mass: f64,
}

impl ScaledInterval {
    pub fn new(alpha: f64, beta: f64) -> Self {
        debug_assert!(alpha < beta, "empty interval [{alpha}, {beta})");
        if alpha >= 0.0 {
            right_tail(alpha, beta)
        } else if beta <= 0.0 {
            let mirrored = right_tail(-beta, -alpha);
            ScaledInterval {
                jump: -mirrored.jump,
                ..mirrored
            }
        } else {
            let ea = gauss(alpha);
            let eb = gauss(beta);
            ScaledInterval {
                log_scale: 0.0,
                jump: ea - eb,
                mass: phi(beta) - phi(alpha),
            }
        }
    }

    /// Interval probability `P`.
    pub fn probability(&self) -> f64 {
        (-self.log_scale).exp() * self.mass
    }

    /// `D² / P`, the per-interval Fisher weight. Zero when the weight
    /// underflows; the mass is floored at `1e-300` before division.
    pub fn fisher_weight(&self) -> f64 {
        let scale = (-self.log_scale).exp();
        if scale == 0.0 || self.jump == 0.0 {
            return 0.0;
        }
        scale * self.jump * self.jump / self.mass.max(1e-300)
    }

    /// `D / P`: for the standard density this is `2√π` times the conditional
    /// mean of `u` on the interval.
    pub fn jump_over_mass(&self) -> f64 {
        self.jump / self.mass.max(1e-300)
    }
}

fn gauss(u: f64) -> f64 {
    if u.is_infinite() {
        0.0
    } else {
        (-u * u).exp()
    }
}

fn right_tail(alpha: f64, beta: f64) -> ScaledInterval {
    // d = e^{-(β² - α²)}
    let (d, tail) = if beta == f64::INFINITY {
        (0.0, 0.0)
    } else {
        let d = (-(beta - alpha) * (beta + alpha)).exp();
        (d, d * erfcx(beta))
    };
    ScaledInterval {
        log_scale: alpha * alpha,
        jump: 1.0 - d,
        mass: 0.5 * (erfcx(alpha) - tail),
    }
}

/// Standard normal quantile.
pub fn normal_quantile(p: f64) -> f64 {
    use std::f64::consts::{PI, SQRT_2};
    if p <= 0.0 || p >= 1.0 {
        return if p == 0.0 { f64::NEG_INFINITY } else if p == 1.0 { f64::INFINITY } else { f64::NAN };
    }
    let mut x = SQRT_2 * statrs::function::erf::erf_inv(2.0 * p - 1.0);
    // Newton polish against an accurate CDF; the lower tail uses erfc so
    // small probabilities keep their relative accuracy
    for _ in 0..2 {
        let cdf = 0.5 * erfc(-x / SQRT_2);
        let pdf = (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
        if pdf > 0.0 {
            x -= (cdf - p) / pdf;
        }
    }
    x
}

/// `e^{-2u²} / (1 - 4Φ²(u))` evaluated without cancellation for large `|u|`.
pub fn onebit_weight(u: f64) -> f64 {
    let a = u.abs();
    let c = erfc(a);
    if a < 5.0 {
        (-2.0 * a * a).exp() / (c * (2.0 - c))
    } else {
        (-a * a).exp() / (erfcx(a) * (2.0 - c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn phi_limits_and_symmetry() {
        assert_eq!(phi(0.0), 0.0);
        assert_eq!(phi(f64::INFINITY), 0.5);
        assert_eq!(phi(f64::NEG_INFINITY), -0.5);
        assert!((phi(1.3) + phi(-1.3)).abs() < 1e-16);
    }

    #[test]
    fn erfcx_branches_agree() {
        // continued fraction vs direct product where both are accurate
        for &x in &[5.0f64, 6.5, 9.0, 14.0, 20.0, 25.0] {
            let direct = (x * x).exp() * erfc(x);
            let mut tail = x;
            for k in (1..=60).rev() {
                tail = x + (k as f64 * 0.5) / tail;
            }
            let cf = FRAC_1_SQRT_PI / tail;
            assert!((direct - cf).abs() < 1e-13 * cf, "x={x}: {direct} vs {cf}");
        }
        // asymptote 1/(x√π)
        let x = 1e6;
        assert!((erfcx(x) * x * PI.sqrt() - 1.0).abs() < 1e-11);
        assert!((erfcx(-1.0) - 2.0 * 1f64.exp() + erfcx(1.0)).abs() < 1e-14);
    }

    #[test]
    fn scaled_interval_matches_direct_in_the_bulk() {
        for &(a, b) in &[(-0.5, 0.7), (0.2, 1.1), (-2.0, -0.3), (1.5, f64::INFINITY)] {
            let iv = ScaledInterval::new(a, b);
            let p = phi(b) - phi(a);
            let d = gauss(a) - gauss(b);
            assert!((iv.probability() - p).abs() < 1e-14, "{a},{b}");
            assert!((iv.fisher_weight() - d * d / p).abs() < 1e-13 * (d * d / p));
        }
    }

    #[test]
    fn scaled_interval_survives_far_tails() {
        let iv = ScaledInterval::new(30.0, f64::INFINITY);
        // D²/P ≈ 2√π·u·e^{-u²} → underflows to exactly zero, never NaN
        assert!(iv.fisher_weight().is_finite());
        let iv = ScaledInterval::new(20.0, 20.5);
        let w = iv.fisher_weight();
        assert!(w > 0.0 && w.is_finite());
        // mirrored interval has the same weight and opposite jump
        let m = ScaledInterval::new(-20.5, -20.0);
        assert!((m.fisher_weight() - w).abs() <= 1e-15 * w);
        assert!((m.jump + iv.jump).abs() < 1e-15);
    }

    #[test]
    fn onebit_weight_matches_high_precision_values() {
        // reference values computed in 40-digit arithmetic
        let cases = [
            (0.0, 1.0),
            (0.3, 0.936_396_907_697_730_19),
            (-1.2, 0.327_644_119_917_208_69),
            (2.5, 0.004_579_669_655_305_573_9),
            (4.9, 1.655_564_068_339_762_5e-10),
            (7.0, 3.285_013_843_310_196_9e-21),
        ];
        for (u, expected) in cases {
            let w = onebit_weight(u);
            assert!((w - expected).abs() < 1e-12 * expected, "u={u}: {w}");
        }
        assert!(onebit_weight(40.0).is_finite());
    }

    #[test]
    fn quantile_inverts_cdf() {
        for &p in &[0.01, 0.25, 0.5, 0.9] {
            let x = normal_quantile(p);
            let back = 0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2));
            assert!((back - p).abs() < 1e-12);
        }
    }
}
