use statrs::distribution::{Binomial, DiscreteCDF};

/// Compensated summation, independent of chunking.
pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for v in values {
        let y = v - c;
        let t = s + y;
        c = (t - s) - y;
        s = t;
    }
    s
}

/// Sample mean and standard error of the mean.
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let m = kahan_sum(values.iter().copied()) / n as f64;
    if n < 2 {
        return (m, f64::NAN);
    }
    let v = kahan_sum(values.iter().map(|x| (x - m) * (x - m))) / (n - 1) as f64;
    (m, (v / n as f64).sqrt())
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// One-sided sign test: p-value of observing at least `wins` successes out of
/// `n` non-tied pairs under a fair coin.
pub fn sign_test_p(wins: u64, n: u64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if wins == 0 {
        return 1.0;
    }
    let b = Binomial::new(0.5, n).expect("valid binomial");
    1.0 - b.cdf(wins - 1)
}

/// Paired sign test that `a[i] > b[i]`; ties are dropped.
pub fn paired_sign_test(a: &[f64], b: &[f64]) -> (u64, u64, f64) {
    let mut wins = 0;
    let mut n = 0;
    for (x, y) in a.iter().zip(b) {
        if x != y {
            n += 1;
            if x > y {
                wins += 1;
            }
        }
    }
    (wins, n, sign_test_p(wins, n))
}
