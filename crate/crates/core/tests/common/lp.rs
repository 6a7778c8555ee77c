//! Exact minimum of `α+β+γ` subject to `α·base + β·left + γ·right ≥ image`
//! for every pair and `α, β, γ ≥ 0`, by enumerating the vertices of the
//! feasible polyhedron.

/// One constraint row `a·x ≥ b` over `x = (α, β, γ)`.
type Row = ([f64; 3], f64);

fn solve3(rows: [&Row; 3]) -> Option<[f64; 3]> {
    let m = [rows[0].0, rows[1].0, rows[2].0];
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(m);
    if d.abs() < 1e-12 {
        return None;
    }
    let mut x = [0.0; 3];
    for (k, xk) in x.iter_mut().enumerate() {
        let mut mk = m;
        for r in 0..3 {
            mk[r][k] = rows[r].1;
        }
        *xk = det(mk) / d;
    }
    Some(x)
}

/// `terms` are `(base, left, right, image)`; with `alpha_zero` the constraint
/// `α = 0` is added. Returns the optimal `(α, β, γ)`.
pub fn reich_optimum(terms: &[(f64, f64, f64, f64)], alpha_zero: bool) -> Option<[f64; 3]> {
    let mut rows: Vec<Row> = terms.iter().map(|&(b, l, r, i)| ([b, l, r], i)).collect();
    rows.push(([1.0, 0.0, 0.0], 0.0));
    rows.push(([0.0, 1.0, 0.0], 0.0));
    rows.push(([0.0, 0.0, 1.0], 0.0));
    if alpha_zero {
        rows.push(([-1.0, 0.0, 0.0], 0.0));
    }
    let feasible = |x: &[f64; 3]| {
        rows.iter().all(|(a, b)| a[0] * x[0] + a[1] * x[1] + a[2] * x[2] >= b - 1e-9 * b.abs().max(1.0))
    };
    let mut best: Option<[f64; 3]> = None;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            for k in j + 1..rows.len() {
                let Some(x) = solve3([&rows[i], &rows[j], &rows[k]]) else { continue };
                if feasible(&x) && best.is_none_or(|b| x.iter().sum::<f64>() < b.iter().sum::<f64>()) {
                    best = Some(x);
                }
            }
        }
    }
    best
}
