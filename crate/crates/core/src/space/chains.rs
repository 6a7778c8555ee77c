use rayon::prelude::*;

use super::DistanceTable;

/// Enumerates polygon tuples `(u, w, z_1, …, z_v)` in lexicographic order,
/// carrying the running path sum `ρ(u,z_1)+…+ρ(z_v,w)` and the self-distance
/// sum `ρ(z_1,z_1)+…+ρ(z_v,z_v)`.
///
/// Both sums are accumulated left to right so that [`super::polygon_slack`]
/// reproduces them bit for bit.
pub(crate) struct ChainWalker<'a> {
    d: &'a DistanceTable,
    v: usize,
    distinct: bool,
}

struct Dfs<'a, F> {
    d: &'a DistanceTable,
    v: usize,
    distinct: bool,
    w: usize,
    tuple: Vec<usize>,
    used: Vec<bool>,
    visit: &'a mut F,
}

impl<'a> ChainWalker<'a> {
    pub(crate) fn new(d: &'a DistanceTable, v: usize, distinct: bool) -> Self {
        Self { d, v, distinct }
    }

    /// No admissible tuple exists: distinct chains need `v + 2` points.
    pub(crate) fn is_vacuous(&self) -> bool {
        self.distinct && self.d.n() < self.v + 2
    }

    pub(crate) fn walk_from<F>(&self, u: usize, visit: &mut F)
    where
        F: FnMut(&[usize], f64, f64),
    {
        if self.is_vacuous() {
            return;
        }
        let n = self.d.n();
        let mut dfs = Dfs {
            d: self.d,
            v: self.v,
            distinct: self.distinct,
            w: 0,
            tuple: vec![0; self.v + 2],
            used: vec![false; n],
            visit,
        };
        dfs.tuple[0] = u;
        for w in 0..n {
            if self.distinct && w == u {
                continue;
            }
            dfs.w = w;
            dfs.tuple[1] = w;
            dfs.used[u] = true;
            dfs.used[w] = true;
            dfs.step(0, u, 0.0, 0.0);
            dfs.used[u] = false;
            dfs.used[w] = false;
        }
    }

    /// Runs `f(u)` for every start point in parallel and returns the results
    /// in ascending `u` order.
    pub(crate) fn par_per_start<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..self.d.n()).into_par_iter().map(f).collect()
    }
}

impl<F> Dfs<'_, F>
where
    F: FnMut(&[usize], f64, f64),
{
    fn step(&mut self, depth: usize, prev: usize, path: f64, selfsum: f64) {
        if depth == self.v {
            let total = path + self.d.get(prev, self.w);
            (self.visit)(&self.tuple, total, selfsum);
            return;
        }
        for z in 0..self.d.n() {
            if self.distinct && self.used[z] {
                continue;
            }
            self.tuple[2 + depth] = z;
            self.used[z] = true;
            self.step(depth + 1, z, path + self.d.get(prev, z), selfsum + self.d.get(z, z));
            self.used[z] = false;
        }
    }
}
