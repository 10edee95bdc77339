//! Marching-squares level-set extraction on a uniform grid.

use rayon::prelude::*;
use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BBox {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl BBox {
    pub fn square(r: f64) -> Self {
        BBox { x0: -r, x1: r, y0: -r, y1: r }
    }
}

/// Field samples on the `(n+1) x (n+1)` nodes of a uniform grid; invalid samples are NaN.
#[derive(Clone, Debug)]
pub struct Grid {
    pub bbox: BBox,
    pub n: usize,
    pub values: Vec<f64>,
}

impl Grid {
    pub fn sample<F>(field: &F, bbox: BBox, n: usize) -> Grid
    where
        F: Fn(f64, f64) -> Option<f64> + Sync,
    {
        let n = n.max(1);
        let rows: Vec<Vec<f64>> = (0..=n)
            .into_par_iter()
            .map(|j| {
                let y = bbox.y0 + (bbox.y1 - bbox.y0) * j as f64 / n as f64;
                (0..=n)
                    .map(|i| {
                        let x = bbox.x0 + (bbox.x1 - bbox.x0) * i as f64 / n as f64;
                        field(x, y).unwrap_or(f64::NAN)
                    })
                    .collect()
            })
            .collect();
        Grid { bbox, n, values: rows.concat() }
    }

    pub fn x(&self, i: usize) -> f64 {
        self.bbox.x0 + (self.bbox.x1 - self.bbox.x0) * i as f64 / self.n as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        self.bbox.y0 + (self.bbox.y1 - self.bbox.y0) * j as f64 / self.n as f64
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * (self.n + 1) + i]
    }

    pub fn cell_diag(&self) -> f64 {
        let dx = (self.bbox.x1 - self.bbox.x0) / self.n as f64;
        let dy = (self.bbox.y1 - self.bbox.y0) / self.n as f64;
        dx.hypot(dy)
    }

    /// Nearest node to `(x, y)`, clamped to the grid.
    pub fn nearest(&self, x: f64, y: f64) -> (usize, usize) {
        let fi = (x - self.bbox.x0) / (self.bbox.x1 - self.bbox.x0) * self.n as f64;
        let fj = (y - self.bbox.y0) / (self.bbox.y1 - self.bbox.y0) * self.n as f64;
        let c = |f: f64| (f.round().max(0.0) as usize).min(self.n);
        (c(fi), c(fj))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
    /// True for loops; false for chains ending at invalid cells or the grid border.
    pub closed: bool,
}

impl Polyline {
    pub fn length(&self) -> f64 {
        let mut l: f64 = self
            .points
            .windows(2)
            .map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]))
            .sum();
        if self.closed && self.points.len() > 1 {
            let (a, b) = (self.points[0], self.points[self.points.len() - 1]);
            l += (a[0] - b[0]).hypot(a[1] - b[1]);
        }
        l
    }
}

/// True when a cell with alternating corner signs joins corners 0 and 2 through its centre.
pub fn saddle_joins_02(grid: &Grid, field: &dyn Fn(f64, f64) -> Option<f64>, i: usize, j: usize, level: f64) -> bool {
    let corners = [grid.at(i, j), grid.at(i + 1, j), grid.at(i + 1, j + 1), grid.at(i, j + 1)];
    let xc = 0.5 * (grid.x(i) + grid.x(i + 1));
    let yc = 0.5 * (grid.y(j) + grid.y(j + 1));
    let centre = field(xc, yc).unwrap_or(0.25 * corners.iter().sum::<f64>());
    (centre > level) == (corners[0] > level)
}

/// Extracts `{field = level}` from pre-sampled values.
pub fn contour<F>(grid: &Grid, field: &F, level: f64) -> Vec<Polyline>
where
    F: Fn(f64, f64) -> Option<f64> + Sync,
{
    let n = grid.n;
    let stride = (n + 1) as u64;
    // Edge ids: horizontal edge from node (i,j) -> 2k, vertical -> 2k+1.
    let hid = |i: usize, j: usize| 2 * (j as u64 * stride + i as u64);
    let vid = |i: usize, j: usize| 2 * (j as u64 * stride + i as u64) + 1;
    let interp = |p: [f64; 2], q: [f64; 2], fp: f64, fq: f64| {
        let s = ((level - fp) / (fq - fp)).clamp(0.0, 1.0);
        [p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]
    };

    let rows: Vec<Vec<[(u64, [f64; 2]); 2]>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut segs = Vec::new();
            for i in 0..n {
                let f = [grid.at(i, j), grid.at(i + 1, j), grid.at(i + 1, j + 1), grid.at(i, j + 1)];
                if f.iter().any(|v| v.is_nan()) {
                    continue;
                }
                let code = f
                    .iter()
                    .enumerate()
                    .fold(0u8, |c, (k, &v)| c | (((v > level) as u8) << k));
                if code == 0 || code == 15 {
                    continue;
                }
                let p = [
                    [grid.x(i), grid.y(j)],
                    [grid.x(i + 1), grid.y(j)],
                    [grid.x(i + 1), grid.y(j + 1)],
                    [grid.x(i), grid.y(j + 1)],
                ];
                let e = [
                    (hid(i, j), interp(p[0], p[1], f[0], f[1])),
                    (vid(i + 1, j), interp(p[1], p[2], f[1], f[2])),
                    (hid(i, j + 1), interp(p[3], p[2], f[3], f[2])),
                    (vid(i, j), interp(p[0], p[3], f[0], f[3])),
                ];
                let crossing = |k: usize| {
                    let (a, b) = [(0, 1), (1, 2), (3, 2), (0, 3)][k];
                    (f[a] > level) != (f[b] > level)
                };
                let ks: Vec<usize> = (0..4).filter(|&k| crossing(k)).collect();
                if ks.len() == 2 {
                    segs.push([e[ks[0]], e[ks[1]]]);
                } else if saddle_joins_02(grid, field, i, j, level) {
                    // Corners 1 and 3 are cut off.
                    segs.push([e[0], e[1]]);
                    segs.push([e[2], e[3]]);
                } else {
                    segs.push([e[3], e[0]]);
                    segs.push([e[1], e[2]]);
                }
            }
            segs
        })
        .collect();

    // Node graph: every crossed edge is a node of degree <= 2.
    let mut index: HashMap<u64, usize> = HashMap::new();
    let mut pts: Vec<[f64; 2]> = Vec::new();
    let mut adj: Vec<Vec<usize>> = Vec::new();
    let mut node = |id: u64, p: [f64; 2], pts: &mut Vec<[f64; 2]>, adj: &mut Vec<Vec<usize>>| {
        *index.entry(id).or_insert_with(|| {
            pts.push(p);
            adj.push(Vec::with_capacity(2));
            pts.len() - 1
        })
    };
    for seg in rows.iter().flatten() {
        let a = node(seg[0].0, seg[0].1, &mut pts, &mut adj);
        let b = node(seg[1].0, seg[1].1, &mut pts, &mut adj);
        if a != b {
            adj[a].push(b);
            adj[b].push(a);
        }
    }

    let mut seen = vec![false; pts.len()];
    let mut out = Vec::new();
    let walk = |start: usize, seen: &mut Vec<bool>| {
        let mut chain = vec![start];
        seen[start] = true;
        let mut cur = start;
        loop {
            let next = adj[cur].iter().copied().find(|&k| !seen[k]);
            match next {
                Some(k) => {
                    seen[k] = true;
                    chain.push(k);
                    cur = k;
                }
                None => break,
            }
        }
        let closed = chain.len() > 2 && adj[cur].contains(&start);
        (chain, closed)
    };
    for s in 0..pts.len() {
        if !seen[s] && adj[s].len() < 2 {
            let (chain, _) = walk(s, &mut seen);
            out.push(Polyline { points: chain.iter().map(|&k| pts[k]).collect(), closed: false });
        }
    }
    for s in 0..pts.len() {
        if !seen[s] {
            let (chain, closed) = walk(s, &mut seen);
            out.push(Polyline { points: chain.iter().map(|&k| pts[k]).collect(), closed });
        }
    }
    out
}

/// Samples `field` on an `n x n` cell grid and extracts the level set.
pub fn marching_squares<F>(field: &F, bbox: BBox, level: f64, n: usize) -> Vec<Polyline>
where
    F: Fn(f64, f64) -> Option<f64> + Sync,
{
    let grid = Grid::sample(field, bbox, n);
    contour(&grid, field, level)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle() {
        let f = |x: f64, y: f64| Some(x * x + y * y);
        let lines = marching_squares(&f, BBox::square(2.0), 1.0, 400);
        assert_eq!(lines.len(), 1);
        assert!(lines[0].closed);
        let l = lines[0].length();
        assert!((l - 2.0 * std::f64::consts::PI).abs() < 0.01 * 2.0 * std::f64::consts::PI);
    }

    #[test]
    fn invalid_region_opens_chains() {
        let f = |x: f64, y: f64| if x < 0.0 { None } else { Some(x * x + y * y) };
        let lines = marching_squares(&f, BBox::square(2.0), 1.0, 101);
        assert_eq!(lines.len(), 1);
        assert!(!lines[0].closed);
    }

    #[test]
    fn saddle_gives_two_branches() {
        let f = |x: f64, y: f64| Some(x * y);
        let lines = marching_squares(&f, BBox::square(1.0), 0.0, 101);
        assert_eq!(lines.len(), 2);
        assert!(lines.iter().all(|l| !l.closed));
    }

    #[test]
    fn empty_above_max() {
        let f = |x: f64, y: f64| Some(-(x * x + y * y));
        assert!(marching_squares(&f, BBox::square(1.0), 1.0, 32).is_empty());
    }
}
