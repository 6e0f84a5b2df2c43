//! Minimum-cost perfect matching on a square cost matrix (Hungarian method
//! with potentials). Missing pairs carry `f64::INFINITY`.

const BIG: f64 = 1e18;

/// Returns the optimal cost and `assign[row] = col`, or `None` if no finite
/// perfect matching exists.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Option<(f64, Vec<usize>)> {
    let n = cost.len();
    if n == 0 {
        return Some((0.0, Vec::new()));
    }
    let c = |i: usize, j: usize| {
        let v = cost[i - 1][j - 1];
        if v.is_finite() {
            v
        } else {
            BIG
        }
    };
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = c(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0; n];
    let mut total = 0.0;
    for j in 1..=n {
        let i = p[j];
        if !cost[i - 1][j - 1].is_finite() {
            return None;
        }
        assign[i - 1] = j - 1;
        total += cost[i - 1][j - 1];
    }
    Some((total, assign))
}
