//! Summary statistics, Welch's t-test, Cohen's d and Wilson intervals.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance (n - 1 denominator); 0 for fewer than two values.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

pub fn std_dev(xs: &[f64]) -> f64 {
    variance(xs).sqrt()
}

/// Linear-interpolation quantile (R type 7) of already sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn quantile(xs: &[f64], q: f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, q)
}

pub fn median(xs: &[f64]) -> f64 {
    quantile(xs, 0.5)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

impl MeanStd {
    /// Order-independent: values are sorted before summation.
    pub fn of(xs: &[f64]) -> Option<MeanStd> {
        if xs.is_empty() {
            return None;
        }
        let mut v = xs.to_vec();
        v.sort_by(f64::total_cmp);
        Some(MeanStd { mean: mean(&v), std: std_dev(&v), n: v.len() })
    }
}

fn ln_gamma(x: f64) -> f64 {
    // Lanczos approximation, g = 7, n = 9.
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Continued fraction for the incomplete beta (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const EPS: f64 = 1e-15;
    const TINY: f64 = 1e-300;
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=500 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta I_x(a, b).
pub fn inc_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Student-t CDF with `df` degrees of freedom.
pub fn student_t_cdf(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return if t > 0.0 { 1.0 } else { 0.0 };
    }
    let x = df / (df + t * t);
    let tail = 0.5 * inc_beta(df / 2.0, 0.5, x);
    if t > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Two-sided p-value for a t statistic.
pub fn two_sided_p(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    inc_beta(df / 2.0, 0.5, df / (df + t * t)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonResult {
    pub metric: String,
    pub group_a: GroupStats,
    pub group_b: GroupStats,
    pub t_stat: f64,
    pub df: f64,
    pub p_value: f64,
    pub cohens_d: f64,
    /// Both samples had zero variance.
    pub degenerate: bool,
}

/// Cohen's d with pooled standard deviation.
pub fn cohens_d(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let pooled = (((na - 1.0) * variance(a) + (nb - 1.0) * variance(b)) / (na + nb - 2.0)).sqrt();
    let diff = mean(a) - mean(b);
    if pooled == 0.0 {
        return if diff == 0.0 { 0.0 } else { diff.signum() * f64::INFINITY };
    }
    diff / pooled
}

/// Welch's unequal-variance t-test, two-sided.
pub fn welch_t(metric: &str, a: &[f64], b: &[f64]) -> Result<ComparisonResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(invalid("welch_t needs at least two observations per group"));
    }
    let (ma, mb) = (mean(a), mean(b));
    let (va, vb) = (variance(a), variance(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (sa, sb) = (va / na, vb / nb);
    let group = |m, v: f64, n| GroupStats { mean: m, std: v.sqrt(), n };
    let (t, df, p, degenerate) = if sa + sb == 0.0 {
        if ma == mb {
            (0.0, na + nb - 2.0, 1.0, true)
        } else {
            ((ma - mb).signum() * f64::INFINITY, na + nb - 2.0, 0.0, true)
        }
    } else {
        let t = (ma - mb) / (sa + sb).sqrt();
        let df = (sa + sb).powi(2) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
        (t, df, two_sided_p(t, df), false)
    };
    Ok(ComparisonResult {
        metric: metric.to_string(),
        group_a: group(ma, va, a.len()),
        group_b: group(mb, vb, b.len()),
        t_stat: t,
        df,
        p_value: p,
        cohens_d: cohens_d(a, b),
        degenerate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilsonInterval {
    pub successes: u64,
    pub n: u64,
    pub point: f64,
    pub lo: f64,
    pub hi: f64,
}

pub fn wilson_ci(successes: u64, n: u64, z: f64) -> Result<WilsonInterval> {
    if n == 0 {
        return Err(invalid("wilson_ci with n = 0"));
    }
    if successes > n {
        return Err(invalid("wilson_ci with successes > n"));
    }
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == n { 1.0 } else { (centre + half).min(1.0) };
    Ok(WilsonInterval { successes, n, point: p, lo, hi })
}

/// One-sample Kolmogorov-Smirnov statistic D against a continuous CDF.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS critical value c(α)/√n with c(α) = sqrt(-ln(α/2)/2).
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p95_of_one_to_hundred() {
        let xs: Vec<f64> = (1..=100).map(f64::from).collect();
        // h = 99 * 0.95 = 94.05 -> x[94] + 0.05 * (x[95] - x[94]) = 95 + 0.05
        assert!((quantile(&xs, 0.95) - 95.05).abs() < 1e-12);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[1.0, 2.0, 3.0, 4.0]), 2.5);
    }

    #[test]
    fn t_table_values() {
        // Two-sided 5% critical values from standard t tables.
        for (t, df) in [(12.706, 1.0), (2.228, 10.0), (2.042, 30.0), (1.96, 1e7)] {
            assert!((two_sided_p(t, df) - 0.05).abs() < 2e-4, "t={t} df={df}");
        }
        assert!((two_sided_p(3.169, 10.0) - 0.01).abs() < 2e-5);
        assert!((student_t_cdf(0.0, 5.0) - 0.5).abs() < 1e-15);
        // df = 1 is Cauchy: F(1) = 3/4 exactly.
        assert!((student_t_cdf(1.0, 1.0) - 0.75).abs() < 1e-12);
        // df = 2 closed form: F(t) = 1/2 + t / (2 sqrt(2 + t^2)).
        for t in [-3.0, -0.4, 0.7, 2.5] {
            let exact = 0.5 + t / (2.0 * (2.0f64 + t * t).sqrt());
            assert!((student_t_cdf(t, 2.0) - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn ln_gamma_matches_factorials() {
        for n in 1..15u32 {
            let f: f64 = (1..n).map(f64::from).product();
            assert!((ln_gamma(f64::from(n)) - f.ln()).abs() < 1e-10);
        }
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-12);
    }

    #[test]
    fn welch_hand_example() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [2.0, 3.0, 4.0, 5.0, 6.0];
        let r = welch_t("x", &a, &b).unwrap();
        // Both variances 2.5, n = 5: t = -1 / sqrt(0.5 + 0.5) = -1, df = 8.
        assert!((r.t_stat + 1.0).abs() < 1e-12);
        assert!((r.df - 8.0).abs() < 1e-12);
        // d = -1 / sqrt(2.5)
        assert!((r.cohens_d + 1.0 / 2.5f64.sqrt()).abs() < 1e-12);
        // p for |t| = 1, df = 8 from tables: 0.3466
        assert!((r.p_value - 0.3466).abs() < 1e-4);
    }

    #[test]
    fn welch_identical_and_degenerate() {
        let a = [1.0, 2.0, 3.0];
        let r = welch_t("x", &a, &a).unwrap();
        assert_eq!((r.t_stat, r.p_value, r.cohens_d), (0.0, 1.0, 0.0));
        let r = welch_t("x", &[2.0, 2.0], &[2.0, 2.0]).unwrap();
        assert!(r.degenerate && r.t_stat == 0.0 && r.p_value == 1.0);
        let r = welch_t("x", &[2.0, 2.0], &[3.0, 3.0]).unwrap();
        assert!(r.degenerate && r.p_value == 0.0);
        assert!(welch_t("x", &[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn wilson_published_rows() {
        let w = wilson_ci(118, 120, 1.96).unwrap();
        assert!((100.0 * w.point - 98.3).abs() < 0.05);
        assert!((100.0 * w.lo - 94.1).abs() < 0.1, "{}", w.lo);
        assert!((100.0 * w.hi - 99.5).abs() < 0.1, "{}", w.hi);
        let w = wilson_ci(173, 368, 1.96).unwrap();
        assert!((100.0 * w.point - 47.0).abs() < 0.05);
        assert!((100.0 * w.lo - 42.0).abs() < 0.1);
        assert!((100.0 * w.hi - 52.1).abs() < 0.1);
    }

    #[test]
    fn wilson_boundaries() {
        assert_eq!(wilson_ci(0, 10, 1.96).unwrap().lo, 0.0);
        assert_eq!(wilson_ci(10, 10, 1.96).unwrap().hi, 1.0);
        assert!(wilson_ci(1, 0, 1.96).is_err());
        assert!(wilson_ci(5, 4, 1.96).is_err());
    }

    #[test]
    fn ks_critical_value() {
        // c(0.01) = 1.6276
        assert!((ks_critical(1, 0.01) - 1.6276).abs() < 1e-3);
    }

    #[test]
    fn mean_std_single() {
        let m = MeanStd::of(&[4.0]).unwrap();
        assert_eq!((m.mean, m.std, m.n), (4.0, 0.0, 1));
        assert!(MeanStd::of(&[]).is_none());
    }
}
