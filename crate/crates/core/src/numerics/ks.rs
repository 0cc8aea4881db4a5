//! Kolmogorov–Smirnov distances.

/// One-sample statistic sup |F_n − F| against a continuous CDF. Sorts `sample`.
pub fn ks_one_sample<F: Fn(f64) -> f64>(sample: &mut [f64], cdf: F) -> f64 {
    let n = sample.len();
    if n == 0 {
        return f64::NAN;
    }
    sample.sort_by(f64::total_cmp);
    let nf = n as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sample.iter().enumerate() {
        let fx = cdf(x);
        let above = (i + 1) as f64 / nf - fx;
        let below = fx - i as f64 / nf;
        d = d.max(above).max(below);
    }
    d
}

/// Two-sample statistic sup |F_a − F_b|. Sorts both samples.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return f64::NAN;
    }
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::std_normal_cdf;

    #[test]
    fn two_point_law_far_from_normal() {
        let mut s = vec![-1.0, 1.0, -1.0, 1.0];
        let d = ks_one_sample(&mut s, std_normal_cdf);
        assert!((d - (0.5 - std_normal_cdf(-1.0))).abs() < 1e-15);
    }

    #[test]
    fn uniform_against_itself() {
        let mut s: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let d = ks_one_sample(&mut s, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.0005).abs() < 1e-12);
    }

    #[test]
    fn two_sample_identical_and_disjoint() {
        let mut a = vec![1.0, 2.0, 3.0];
        let mut b = vec![3.0, 2.0, 1.0];
        assert_eq!(ks_two_sample(&mut a, &mut b), 0.0);
        let mut c = vec![10.0, 11.0];
        assert_eq!(ks_two_sample(&mut a, &mut c), 1.0);
    }
}
