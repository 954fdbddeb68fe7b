//! Goodness-of-fit statistics for geometric samples.

use std::collections::BTreeMap;

/// `P(K ≤ k)` for `K ~ Geom(p)` on `{1, 2, …}`.
pub fn geometric_cdf(p: f64, k: u64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    1.0 - (1.0 - p).powf(k as f64)
}

/// Kolmogorov distance `sup_k |F_emp(k) - F(k)|` between samples and `Geom(p)`.
pub fn ks_distance_geometric(samples: &[u64], p: f64) -> f64 {
    if samples.is_empty() {
        return 1.0;
    }
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for &s in samples {
        *counts.entry(s).or_default() += 1;
    }
    let n = samples.len() as f64;
    let mut below = 0u64;
    let mut worst = 0.0f64;
    // both CDFs are step functions jumping at integers; checking each
    // observed value and the integer just before it covers every jump
    for (&k, &c) in &counts {
        if k > 0 {
            worst = worst.max((below as f64 / n - geometric_cdf(p, k - 1)).abs());
        }
        below += c;
        worst = worst.max((below as f64 / n - geometric_cdf(p, k)).abs());
    }
    worst
}

/// Pearson statistic against `Geom(p)` with cells `1, 2, …` merged from the
/// tail until every expected count is at least `min_expected`. Returns
/// `(statistic, degrees of freedom)`.
pub fn chi_square_geometric(samples: &[u64], p: f64, min_expected: f64) -> (f64, usize) {
    let n = samples.len() as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut k = 1u64;
    loop {
        let tail = 1.0 - geometric_cdf(p, k - 1);
        let here = geometric_cdf(p, k) - geometric_cdf(p, k - 1);
        if n * (tail - here) < min_expected {
            // last cell: everything from k on
            let obs = samples.iter().filter(|&&s| s >= k).count() as f64;
            cells.push((obs, n * tail));
            break;
        }
        let obs = samples.iter().filter(|&&s| s == k).count() as f64;
        cells.push((obs, n * here));
        k += 1;
    }
    let stat = cells.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    (stat, cells.len().saturating_sub(1))
}

/// Two-sample chi-square homogeneity statistic on integer samples, pooling
/// values into cells with pooled count at least `min_count`.
pub fn chi_square_two_sample(a: &[u64], b: &[u64], min_count: u64) -> (f64, usize) {
    let mut pooled: BTreeMap<u64, (u64, u64)> = BTreeMap::new();
    for &x in a {
        pooled.entry(x).or_default().0 += 1;
    }
    for &x in b {
        pooled.entry(x).or_default().1 += 1;
    }
    let mut cells: Vec<(u64, u64)> = Vec::new();
    let mut cur = (0, 0);
    for (_, (ca, cb)) in pooled {
        cur.0 += ca;
        cur.1 += cb;
        if cur.0 + cur.1 >= min_count {
            cells.push(cur);
            cur = (0, 0);
        }
    }
    if cur.0 + cur.1 > 0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += cur.0;
                last.1 += cur.1;
            }
            None => cells.push(cur),
        }
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let total = na + nb;
    let mut stat = 0.0;
    for (ca, cb) in &cells {
        let col = (ca + cb) as f64;
        for (obs, rows) in [(*ca as f64, na), (*cb as f64, nb)] {
            let e = rows * col / total;
            if e > 0.0 {
                stat += (obs - e).powi(2) / e;
            }
        }
    }
    (stat, cells.len().saturating_sub(1))
}
