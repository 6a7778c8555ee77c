#![allow(dead_code)]

use gms_core::DistanceTable;

pub fn table(rows: &[&[f64]]) -> DistanceTable {
    DistanceTable::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
}

/// Brute-force polygon check over every `(u, w, z_1..z_v)` in `0..n`.
/// Returns (violations, admissible tuples).
pub fn naive_polygon(d: &DistanceTable, v: usize, coef: impl Fn(usize, usize) -> f64, partial: bool, distinct: bool) -> (usize, usize) {
    let n = d.n();
    let len = v + 2;
    let mut t = vec![0usize; len];
    let (mut bad, mut seen) = (0, 0);
    loop {
        let ok = !distinct || {
            let mut s = t.clone();
            s.sort_unstable();
            s.windows(2).all(|w| w[0] != w[1])
        };
        if ok {
            seen += 1;
            let (u, w) = (t[0], t[1]);
            let mut chain = vec![u];
            chain.extend_from_slice(&t[2..]);
            chain.push(w);
            let path: f64 = chain.windows(2).map(|e| d.get(e[0], e[1])).sum();
            let selfsum: f64 = if partial { t[2..].iter().map(|&z| d.get(z, z)).sum() } else { 0.0 };
            let lhs = d.get(u, w);
            let rhs = coef(u, w) * path - selfsum;
            if lhs > rhs + 1e-9 * lhs.abs().max(rhs.abs()).max(1.0) {
                bad += 1;
            }
        }
        let mut k = len;
        loop {
            if k == 0 {
                return (bad, seen);
            }
            k -= 1;
            t[k] += 1;
            if t[k] < n {
                break;
            }
            t[k] = 0;
        }
    }
}
