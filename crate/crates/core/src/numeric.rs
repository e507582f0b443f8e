//! Small numerical helpers shared by the oracle and the closed forms.

use num_complex::Complex64;

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

pub fn kahan_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// Compensated sum of complex terms, real and imaginary parts tracked separately.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedComplex {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl CompensatedComplex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Table of ln(n!) for n < len.
pub fn ln_factorials(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut acc = CompensatedSum::new();
    for n in 0..len {
        if n > 1 {
            acc.add((n as f64).ln());
        }
        out.push(acc.value());
    }
    out
}

/// Poisson probabilities P(n; mean) for n < len, computed in log space.
pub fn poisson_pmf(mean: f64, len: usize) -> Vec<f64> {
    if mean == 0.0 {
        let mut v = vec![0.0; len];
        if len > 0 {
            v[0] = 1.0;
        }
        return v;
    }
    let lnf = ln_factorials(len);
    let ln_mean = mean.ln();
    (0..len).map(|n| (-mean + n as f64 * ln_mean - lnf[n]).exp()).collect()
}

/// Coherent-state number amplitudes ⟨n|z⟩ for n < len.
pub fn coherent_amplitudes(z: Complex64, len: usize) -> Vec<Complex64> {
    let r2 = z.norm_sqr();
    if r2 == 0.0 {
        let mut v = vec![Complex64::new(0.0, 0.0); len];
        if len > 0 {
            v[0] = Complex64::new(1.0, 0.0);
        }
        return v;
    }
    let lnf = ln_factorials(len);
    let ln_r = 0.5 * r2.ln();
    let arg = z.arg();
    (0..len)
        .map(|n| {
            let nf = n as f64;
            let modulus = (-0.5 * r2 + nf * ln_r - 0.5 * lnf[n]).exp();
            Complex64::from_polar(modulus, nf * arg)
        })
        .collect()
}

/// Uniform grid `start + k * step` for k in 0..count.
pub fn linspace(start: f64, end: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (end - start) / (count - 1) as f64;
            (0..count).map(|k| start + k as f64 * step).collect()
        }
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut terms = vec![1.0];
        terms.extend(std::iter::repeat_n(1e-16, 10_000));
        let naive: f64 = terms.iter().sum();
        let comp = kahan_sum(terms.iter().copied());
        assert_eq!(naive, 1.0);
        assert!((comp - (1.0 + 1e-12)).abs() < 1e-15);
    }

    #[test]
    fn ln_factorials_match_direct_product() {
        let t = ln_factorials(21);
        let mut f = 1.0f64;
        for n in 1..21 {
            f *= n as f64;
            assert!((t[n] - f.ln()).abs() < 1e-12 * f.ln().max(1.0));
        }
        assert_eq!(t[0], 0.0);
    }

    #[test]
    fn poisson_sums_to_one() {
        for &mu in &[0.0, 0.3, 4.0, 12.5, 50.0] {
            let p = poisson_pmf(mu, 200);
            assert!((kahan_sum(p) - 1.0).abs() < 1e-13, "mu={mu}");
        }
    }

    #[test]
    fn coherent_amplitudes_survive_large_n() {
        // |z|^2 = 200 requires n well past 170
        let z = Complex64::new(200f64.sqrt(), 0.0);
        let a = coherent_amplitudes(z, 400);
        assert!(a.iter().all(|c| c.re.is_finite() && c.im.is_finite()));
        let norm = kahan_sum(a.iter().map(|c| c.norm_sqr()));
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gcd_basic() {
        assert_eq!(gcd(12, 18), 6);
        assert_eq!(gcd(3, 2), 1);
        assert_eq!(gcd(7, 0), 7);
    }
}
