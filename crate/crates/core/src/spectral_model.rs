//! Line-spectrum signals `x = Σ_k A_k e^{j2πφ_k} v(f_k)` and the steering
//! vectors `v(f) = [1, e^{j2πf}, …, e^{j2π(n-1)f}]ᵀ`.

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Attempts allowed when drawing separated frequencies.
pub const MAX_SAMPLING_ATTEMPTS: usize = 10_000;

/// One spectral line. Frequency and phase are in cycles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub f: f64,
    #[serde(rename = "A")]
    pub amplitude: f64,
    pub phi: f64,
}

impl Component {
    pub fn new(f: f64, amplitude: f64, phi: f64) -> Self {
        Component { f, amplitude, phi }
    }

    /// Complex coefficient `A e^{j2πφ}`.
    pub fn coefficient(&self) -> Complex64 {
        Complex64::from_polar(self.amplitude, 2.0 * PI * self.phi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSignal")]
pub struct SpectralSignal {
    n: usize,
    components: Vec<Component>,
}

#[derive(Deserialize)]
struct RawSignal {
    n: usize,
    components: Vec<Component>,
}

impl TryFrom<RawSignal> for SpectralSignal {
    type Error = Error;

    fn try_from(raw: RawSignal) -> Result<Self> {
        SpectralSignal::new(raw.n, raw.components)
    }
}

impl SpectralSignal {
    pub fn new(n: usize, components: Vec<Component>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("signal dimension n must be positive".into()));
        }
        if components.is_empty() {
            return Err(Error::InvalidArgument("a signal needs at least one component".into()));
        }
        for c in &components {
            check_frequency(c.f)?;
            if !(c.amplitude > 0.0 && c.amplitude.is_finite()) {
                return Err(Error::InvalidArgument(format!("amplitude {} must be positive", c.amplitude)));
            }
            if !(0.0..1.0).contains(&c.phi) {
                return Err(Error::InvalidArgument(format!("phase {} outside [0, 1)", c.phi)));
            }
        }
        for (i, a) in components.iter().enumerate() {
            if components[..i].iter().any(|b| b.f == a.f) {
                return Err(Error::InvalidArgument(format!("duplicate frequency {}", a.f)));
            }
        }
        Ok(SpectralSignal { n, components })
    }

    /// Builds a signal from frequencies and complex coefficients.
    pub fn from_coefficients(n: usize, freqs: &[f64], coeffs: &[Complex64]) -> Result<Self> {
        if freqs.len() != coeffs.len() {
            return Err(Error::DimensionMismatch { expected: freqs.len(), got: coeffs.len() });
        }
        let components = freqs
            .iter()
            .zip(coeffs)
            .map(|(&f, c)| Component::new(f, c.norm(), (c.arg() / (2.0 * PI)).rem_euclid(1.0) % 1.0))
            .collect();
        SpectralSignal::new(n, components)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.f).collect()
    }

    pub fn coefficients(&self) -> Vec<Complex64> {
        self.components.iter().map(Component::coefficient).collect()
    }

    /// Same frequencies and phases with every amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let components = self
            .components
            .iter()
            .map(|c| Component { amplitude: c.amplitude * factor, ..*c })
            .collect();
        SpectralSignal::new(self.n, components)
    }

    /// Union of two signals of the same dimension.
    pub fn union(&self, other: &SpectralSignal) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let mut components = self.components.clone();
        components.extend_from_slice(&other.components);
        SpectralSignal::new(self.n, components)
    }

    /// The three-tone test signal used throughout the experiments:
    /// `f = {0.3, 0.325, 0.8}`, `c = {0.4e^{j2π·0.1}, 0.15e^{j2π·0.55}, 0.05e^{j2π·0.75}}`.
    pub fn reference(n: usize) -> Self {
        SpectralSignal::new(
            n,
            vec![
                Component::new(0.3, 0.4, 0.1),
                Component::new(0.325, 0.15, 0.55),
                Component::new(0.8, 0.05, 0.75),
            ],
        )
        .expect("reference signal is valid")
    }
}

fn check_frequency(f: f64) -> Result<()> {
    if (0.0..1.0).contains(&f) {
        Ok(())
    } else {
        Err(Error::FrequencyOutOfRange(f))
    }
}

fn check_dims(f: f64, n: usize) -> Result<()> {
    check_frequency(f)?;
    if n == 0 {
        return Err(Error::InvalidArgument("dimension n must be positive".into()));
    }
    Ok(())
}

/// Steering vector `v(f)`; entry `i` is `e^{j2πfi}`.
pub fn atom(f: f64, n: usize) -> Result<Vec<Complex64>> {
    check_dims(f, n)?;
    Ok(atom_unchecked(f, n))
}

/// `v(f)` for any real `f` (used by peak refinement, which may step past 1).
pub(crate) fn atom_unchecked(f: f64, n: usize) -> Vec<Complex64> {
    (0..n).map(|i| Complex64::cis(2.0 * PI * f * i as f64)).collect()
}

/// `g(f) = ∂v/∂f`; entry `i` is `j2πi·e^{j2πfi}`.
pub fn atom_derivative(f: f64, n: usize) -> Result<Vec<Complex64>> {
    check_dims(f, n)?;
    Ok((0..n)
        .map(|i| {
            let w = 2.0 * PI * i as f64;
            Complex64::new(0.0, w) * Complex64::cis(w * f)
        })
        .collect())
}

/// `x⋆ = Σ_k c_k v(f_k)`.
pub fn synthesize(signal: &SpectralSignal) -> Vec<Complex64> {
    let mut x = vec![Complex64::new(0.0, 0.0); signal.n];
    for comp in &signal.components {
        let c = comp.coefficient();
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += c * Complex64::cis(2.0 * PI * comp.f * i as f64);
        }
    }
    x
}

/// Distance between two frequencies on the unit circle.
pub fn wrap_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Minimum pairwise wrap-around distance.
pub fn min_separation(freqs: &[f64]) -> Result<f64> {
    if freqs.len() < 2 {
        return Err(Error::InvalidArgument("min_separation needs at least two frequencies".into()));
    }
    for &f in freqs {
        check_frequency(f)?;
    }
    let mut best = f64::INFINITY;
    for i in 0..freqs.len() {
        for j in (i + 1)..freqs.len() {
            best = best.min(wrap_distance(freqs[i], freqs[j]));
        }
    }
    Ok(best)
}

/// Draws `k` frequencies with wrap-around separation at least `min_sep`,
/// amplitudes uniform in `amplitude_range` and phases uniform in `[0, 1)`.
/// Components come back sorted by frequency.
pub fn random_signal(
    n: usize,
    k: usize,
    min_sep: f64,
    amplitude_range: (f64, f64),
    seed: u64,
) -> Result<SpectralSignal> {
    if k == 0 {
        return Err(Error::InvalidArgument("K must be at least 1".into()));
    }
    if k as f64 * min_sep >= 1.0 {
        return Err(Error::Infeasible(format!("{k} frequencies cannot be {min_sep} apart on the unit circle")));
    }
    let (lo, hi) = amplitude_range;
    if !(lo > 0.0 && hi >= lo) {
        return Err(Error::InvalidArgument(format!("bad amplitude range [{lo}, {hi}]")));
    }
    let mut rng = rng_from_seed(seed);
    let mut freqs = Vec::with_capacity(k);
    let mut attempts = 0;
    while freqs.len() < k {
        attempts += 1;
        if attempts > MAX_SAMPLING_ATTEMPTS {
            return Err(Error::SamplingBudgetExceeded(MAX_SAMPLING_ATTEMPTS));
        }
        let f: f64 = rng.random();
        if freqs.iter().all(|&g| wrap_distance(f, g) >= min_sep) {
            freqs.push(f);
        }
    }
    freqs.sort_by(f64::total_cmp);
    let components = freqs
        .into_iter()
        .map(|f| {
            let a = if hi > lo { rng.random_range(lo..hi) } else { lo };
            let phi: f64 = rng.random();
            Component::new(f, a, phi)
        })
        .collect();
    SpectralSignal::new(n, components)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn atom_examples() {
        let v = atom(0.0, 4).unwrap();
        assert!(v.iter().all(|z| close(*z, Complex64::new(1.0, 0.0), 1e-15)));
        let v = atom(0.5, 4).unwrap();
        for (i, z) in v.iter().enumerate() {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            assert!(close(*z, Complex64::new(s, 0.0), 1e-14));
        }
        let v = atom(0.25, 2).unwrap();
        assert!(close(v[1], Complex64::new(0.0, 1.0), 1e-15));
    }

    #[test]
    fn atom_rejects_bad_input() {
        assert!(matches!(atom(1.0, 4), Err(Error::FrequencyOutOfRange(_))));
        assert!(matches!(atom(-0.1, 4), Err(Error::FrequencyOutOfRange(_))));
        assert!(atom(0.2, 0).is_err());
        assert!(atom_derivative(1.5, 3).is_err());
    }

    #[test]
    fn derivative_examples() {
        let g = atom_derivative(0.0, 3).unwrap();
        assert!(close(g[0], Complex64::new(0.0, 0.0), 0.0));
        assert!(close(g[1], Complex64::new(0.0, 2.0 * PI), 1e-14));
        assert!(close(g[2], Complex64::new(0.0, 4.0 * PI), 1e-14));
        assert_eq!(atom_derivative(0.37, 1).unwrap(), vec![Complex64::new(0.0, 0.0)]);
    }

    #[test]
    fn derivative_matches_central_difference() {
        let (f, n, h) = (0.3, 64, 1e-6);
        let g = atom_derivative(f, n).unwrap();
        let plus = atom(f + h, n).unwrap();
        let minus = atom(f - h, n).unwrap();
        for i in 0..n {
            let fd = (plus[i] - minus[i]) / (2.0 * h);
            let scale = g[i].norm().max(1.0);
            assert!((fd - g[i]).norm() <= 1e-6 * scale, "entry {i}: {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn synthesize_single_flat_atom() {
        let s = SpectralSignal::new(4, vec![Component::new(0.0, 1.0, 0.0)]).unwrap();
        for z in synthesize(&s) {
            assert!(close(z, Complex64::new(1.0, 0.0), 1e-15));
        }
    }

    #[test]
    fn synthesize_reference_norm_by_direct_summation() {
        // oracle: Σ_i |Σ_k c_k e^{j2πf_k i}|² written out with explicit cos/sin
        let s = SpectralSignal::reference(64);
        let mut energy = 0.0;
        for i in 0..64 {
            let (mut re, mut im) = (0.0, 0.0);
            for &(f, a, p) in &[(0.3, 0.4, 0.1), (0.325, 0.15, 0.55), (0.8, 0.05, 0.75)] {
                let arg = 2.0 * PI * (f * i as f64 + p);
                re += a * arg.cos();
                im += a * arg.sin();
            }
            energy += re * re + im * im;
        }
        let x = synthesize(&s);
        let got: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        assert!((got - energy).abs() < 1e-12 * energy);
        assert!((got.sqrt() - 3.425_397_809).abs() < 1e-8);
    }

    #[test]
    fn min_separation_examples() {
        assert!((min_separation(&[0.3, 0.325, 0.8]).unwrap() - 0.025).abs() < 1e-12);
        assert!((min_separation(&[0.05, 0.95]).unwrap() - 0.1).abs() < 1e-12);
        assert!((min_separation(&[0.2, 0.7]).unwrap() - 0.5).abs() < 1e-12);
        assert!(min_separation(&[0.2]).is_err());
    }

    #[test]
    fn random_signal_behaviour() {
        let a = random_signal(64, 3, 4.0 / 64.0, (0.5, 1.5), 11).unwrap();
        let b = random_signal(64, 3, 4.0 / 64.0, (0.5, 1.5), 11).unwrap();
        assert_eq!(a, b);
        assert!(min_separation(&a.frequencies()).unwrap() >= 0.0625);
        assert!(a.frequencies().windows(2).all(|w| w[0] < w[1]));
        let one = random_signal(64, 1, 0.9, (1.0, 1.0), 3).unwrap();
        assert_eq!(one.k(), 1);
        assert!(matches!(random_signal(64, 4, 0.25, (1.0, 2.0), 0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn invalid_signals_rejected() {
        assert!(SpectralSignal::new(0, vec![Component::new(0.1, 1.0, 0.0)]).is_err());
        assert!(SpectralSignal::new(4, vec![]).is_err());
        assert!(SpectralSignal::new(4, vec![Component::new(0.1, -1.0, 0.0)]).is_err());
        assert!(SpectralSignal::new(4, vec![Component::new(0.1, 1.0, 1.0)]).is_err());
        assert!(SpectralSignal::new(4, vec![Component::new(0.1, 1.0, 0.0), Component::new(0.1, 2.0, 0.0)]).is_err());
    }

    #[test]
    fn json_shape() {
        let s = SpectralSignal::new(8, vec![Component::new(0.25, 1.5, 0.5)]).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"n":8,"components":[{"f":0.25,"A":1.5,"phi":0.5}]}"#);
        let back: SpectralSignal = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<SpectralSignal>(r#"{"n":8,"components":[{"f":1.5,"A":1,"phi":0}]}"#).is_err());
    }

    proptest! {
        #[test]
        fn atom_has_norm_n(f in 0.0f64..1.0, n in 1usize..200) {
            let e: f64 = atom(f, n).unwrap().iter().map(|z| z.norm_sqr()).sum();
            prop_assert!((e - n as f64).abs() < 1e-9 * n as f64);
        }

        #[test]
        fn derivative_is_second_order_accurate(f in 0.01f64..0.99) {
            let n = 32;
            let g = atom_derivative(f, n).unwrap();
            let h = 1e-5;
            let p = atom_unchecked(f + h, n);
            let m = atom_unchecked(f - h, n);
            for i in 0..n {
                let fd = (p[i] - m[i]) / (2.0 * h);
                // truncation error ≈ (2πi)³h²/6
                let bound = (2.0 * PI * i as f64).powi(3) * h * h / 6.0 * 1.1 + 1e-7;
                prop_assert!((fd - g[i]).norm() <= bound);
            }
        }

        #[test]
        fn synthesize_is_linear(f1 in 0.0f64..0.5, f2 in 0.5f64..1.0, a1 in 0.1f64..3.0, a2 in 0.1f64..3.0, p1 in 0.0f64..1.0, p2 in 0.0f64..1.0) {
            let s1 = SpectralSignal::new(16, vec![Component::new(f1, a1, p1)]).unwrap();
            let s2 = SpectralSignal::new(16, vec![Component::new(f2, a2, p2)]).unwrap();
            let both = synthesize(&s1.union(&s2).unwrap());
            let x1 = synthesize(&s1);
            let x2 = synthesize(&s2);
            for i in 0..16 {
                prop_assert!((both[i] - x1[i] - x2[i]).norm() < 1e-12);
            }
        }

        #[test]
        fn min_separation_invariances(mut fs in proptest::collection::vec(0.0f64..1.0, 2..6), shift in 0usize..5) {
            let base = min_separation(&fs).unwrap();
            let rotated: Vec<f64> = fs.iter().map(|f| (f + 0.37 * shift as f64).rem_euclid(1.0) % 1.0).collect();
            prop_assert!((min_separation(&rotated).unwrap() - base).abs() < 1e-12);
            fs.reverse();
            prop_assert!((min_separation(&fs).unwrap() - base).abs() < 1e-15);
        }
    }
}
