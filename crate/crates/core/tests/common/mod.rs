#![allow(dead_code)]

/// Pair counts behind Kendall's tau-b.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TauCounts {
    pub pairs: u64,
    pub tied_x: u64,
    pub tied_y: u64,
    pub tied_both: u64,
    pub discordant: u64,
}

impl TauCounts {
    pub fn tau_b(&self) -> f64 {
        let concordant = self.pairs - self.tied_x - self.tied_y + self.tied_both - self.discordant;
        let num = concordant as f64 - self.discordant as f64;
        let den = ((self.pairs - self.tied_x) as f64 * (self.pairs - self.tied_y) as f64).sqrt();
        num / den
    }
}

fn tied_pairs(sorted: &[f64]) -> u64 {
    let mut total = 0u64;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Sorts `v` and returns the number of inversions.
fn merge_count(v: &mut Vec<f64>) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mut right = v.split_off(n / 2);
    let mut inv = merge_count(v) + merge_count(&mut right);
    let left = std::mem::take(v);
    let (mut i, mut j) = (0, 0);
    v.reserve(n);
    while i < left.len() && j < right.len() {
        if right[j] < left[i] {
            inv += (left.len() - i) as u64;
            v.push(right[j]);
            j += 1;
        } else {
            v.push(left[i]);
            i += 1;
        }
    }
    v.extend_from_slice(&left[i..]);
    v.extend_from_slice(&right[j..]);
    inv
}

/// Knight's O(n log n) pair counting.
pub fn kendall_counts(x: &[f64], y: &[f64]) -> TauCounts {
    assert_eq!(x.len(), y.len());
    let n = x.len() as u64;
    let mut pts: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let tied_x = tied_pairs(&xs);
    let mut tied_both = 0u64;
    let mut run = 1u64;
    for w in pts.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            tied_both += run * (run - 1) / 2;
            run = 1;
        }
    }
    tied_both += run * (run - 1) / 2;

    let mut ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let discordant = merge_count(&mut ys);
    let tied_y = tied_pairs(&ys);
    TauCounts {
        pairs: n * n.saturating_sub(1) / 2,
        tied_x,
        tied_y,
        tied_both,
        discordant,
    }
}

pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> f64 {
    kendall_counts(x, y).tau_b()
}

/// Quadratic reference implementation.
pub fn kendall_counts_brute(x: &[f64], y: &[f64]) -> TauCounts {
    let n = x.len();
    let mut c = TauCounts {
        pairs: 0,
        tied_x: 0,
        tied_y: 0,
        tied_both: 0,
        discordant: 0,
    };
    for i in 0..n {
        for j in i + 1..n {
            c.pairs += 1;
            let dx = x[i] - x[j];
            let dy = y[i] - y[j];
            match (dx == 0.0, dy == 0.0) {
                (true, true) => {
                    c.tied_x += 1;
                    c.tied_y += 1;
                    c.tied_both += 1;
                }
                (true, false) => c.tied_x += 1,
                (false, true) => c.tied_y += 1,
                (false, false) => {
                    if (dx > 0.0) != (dy > 0.0) {
                        c.discordant += 1;
                    }
                }
            }
        }
    }
    c
}

pub fn mean_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64
}
