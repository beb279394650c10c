use std::collections::{BTreeMap, HashMap};

use crate::agent::ParamSpace;

/// Fills the whole grid from values at known grid indices.
///
/// Known points are triangulated (Delaunay, in grid-index coordinates) and
/// each grid point inside the hull gets the barycentric blend of its
/// simplex. Points outside the hull take the value of the nearest known
/// point. Known points keep their own value.
pub fn interpolate_grid(known: &BTreeMap<usize, f64>, space: &ParamSpace) -> Vec<f64> {
    let coords = |i: usize| {
        space
            .coords(i)
            .into_iter()
            .map(|c| c as f64)
            .collect::<Vec<f64>>()
    };
    let pts: Vec<(Vec<f64>, f64)> = known.iter().map(|(&i, &v)| (coords(i), v)).collect();
    let queries: Vec<Vec<f64>> = (0..space.len()).map(coords).collect();
    let mut out = interpolate_points(&pts, &queries);
    for (&i, &v) in known {
        out[i] = v;
    }
    out
}

/// Piecewise-linear interpolation of scattered values at arbitrary query
/// coordinates, with nearest-point fallback outside the hull.
pub fn interpolate_points(known: &[(Vec<f64>, f64)], queries: &[Vec<f64>]) -> Vec<f64> {
    if known.is_empty() {
        return vec![0.0; queries.len()];
    }
    let d = known[0].0.len();
    let simplices = if known.len() > d {
        delaunay(known, d)
    } else {
        Vec::new()
    };
    // barycentric transforms in original coordinates
    let frames: Vec<(Vec<usize>, Vec<Vec<f64>>)> = simplices
        .into_iter()
        .filter_map(|s| inverse_frame(known, &s).map(|inv| (s, inv)))
        .collect();
    queries
        .iter()
        .map(|q| {
            if let Some((_, v)) = known.iter().find(|(p, _)| p == q) {
                return *v;
            }
            for (s, inv) in &frames {
                let v0 = &known[s[0]].0;
                let rel: Vec<f64> = q.iter().zip(v0).map(|(a, b)| a - b).collect();
                let lam: Vec<f64> = inv
                    .iter()
                    .map(|row| row.iter().zip(&rel).map(|(a, b)| a * b).sum())
                    .collect();
                let l0 = 1.0 - lam.iter().sum::<f64>();
                if l0 >= -1e-9 && lam.iter().all(|&l| l >= -1e-9) {
                    return l0 * known[s[0]].1
                        + lam
                            .iter()
                            .zip(&s[1..])
                            .map(|(l, &k)| l * known[k].1)
                            .sum::<f64>();
                }
            }
            nearest(known, q)
        })
        .collect()
}

fn nearest(known: &[(Vec<f64>, f64)], q: &[f64]) -> f64 {
    let mut best = (f64::INFINITY, 0.0);
    for (p, v) in known {
        let d2: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
        if d2 < best.0 {
            best = (d2, *v);
        }
    }
    best.1
}

/// Inverse of the matrix whose columns are `v_i - v_0`, or `None` for a
/// degenerate simplex.
fn inverse_frame(known: &[(Vec<f64>, f64)], s: &[usize]) -> Option<Vec<Vec<f64>>> {
    let d = s.len() - 1;
    let v0 = &known[s[0]].0;
    let m: Vec<Vec<f64>> = (0..d)
        .map(|r| (0..d).map(|c| known[s[c + 1]].0[r] - v0[r]).collect())
        .collect();
    invert(m)
}

fn invert(mut a: Vec<Vec<f64>>) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for r in 0..n {
            if r != col && a[r][col] != 0.0 {
                let f = a[r][col];
                for j in 0..n {
                    a[r][j] -= f * a[col][j];
                    inv[r][j] -= f * inv[col][j];
                }
            }
        }
    }
    Some(inv)
}

fn solve(a: Vec<Vec<f64>>, b: &[f64]) -> Option<Vec<f64>> {
    let inv = invert(a)?;
    Some(
        inv.iter()
            .map(|row| row.iter().zip(b).map(|(x, y)| x * y).sum())
            .collect(),
    )
}

fn jitter(i: usize, j: usize) -> f64 {
    // splitmix64 of (i, j) mapped to [-1, 1]
    let mut z = (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (j as u64).wrapping_add(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
}

struct Cell {
    verts: Vec<usize>,
    center: Vec<f64>,
    r2: f64,
}

fn cell(pts: &[Vec<f64>], verts: Vec<usize>) -> Cell {
    let d = verts.len() - 1;
    let v0 = &pts[verts[0]];
    let a: Vec<Vec<f64>> = (1..=d)
        .map(|i| (0..d).map(|c| 2.0 * (pts[verts[i]][c] - v0[c])).collect())
        .collect();
    let b: Vec<f64> = (1..=d)
        .map(|i| {
            pts[verts[i]].iter().map(|x| x * x).sum::<f64>() - v0.iter().map(|x| x * x).sum::<f64>()
        })
        .collect();
    match solve(a, &b) {
        Some(center) => {
            let r2 = center.iter().zip(v0).map(|(a, b)| (a - b) * (a - b)).sum();
            Cell { verts, center, r2 }
        }
        None => Cell {
            verts,
            center: v0.clone(),
            r2: f64::INFINITY,
        },
    }
}

/// Bowyer-Watson on slightly perturbed copies of the known points.
fn delaunay(known: &[(Vec<f64>, f64)], d: usize) -> Vec<Vec<usize>> {
    let n = known.len();
    let mut pts: Vec<Vec<f64>> = known
        .iter()
        .enumerate()
        .map(|(i, (p, _))| {
            p.iter()
                .enumerate()
                .map(|(j, x)| x + 1e-6 * jitter(i, j))
                .collect()
        })
        .collect();
    let lo: Vec<f64> = (0..d)
        .map(|j| pts.iter().map(|p| p[j]).fold(f64::INFINITY, f64::min))
        .collect();
    let hi: Vec<f64> = (0..d)
        .map(|j| pts.iter().map(|p| p[j]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let span = lo.iter().zip(&hi).map(|(a, b)| b - a).fold(1.0, f64::max);
    let k = 100.0 * span;
    let s = 3.0 * (d as f64 + 1.0) * k;
    let base: Vec<f64> = lo.iter().map(|x| x - k).collect();
    pts.push(base.clone());
    for j in 0..d {
        let mut v = base.clone();
        v[j] += s;
        pts.push(v);
    }
    let mut cells = vec![cell(&pts, (n..n + d + 1).collect())];

    for p in 0..n {
        let (bad, good): (Vec<Cell>, Vec<Cell>) = cells.into_iter().partition(|c| {
            let d2: f64 = pts[p]
                .iter()
                .zip(&c.center)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            d2 < c.r2
        });
        cells = good;
        let mut facets: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut order: Vec<Vec<usize>> = Vec::new();
        for c in &bad {
            for skip in 0..c.verts.len() {
                let mut f: Vec<usize> = c
                    .verts
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, &v)| v)
                    .collect();
                f.sort_unstable();
                let e = facets.entry(f.clone()).or_insert(0);
                if *e == 0 {
                    order.push(f);
                }
                *e += 1;
            }
        }
        for f in order {
            if facets[&f] == 1 {
                let mut verts = f;
                verts.push(p);
                cells.push(cell(&pts, verts));
            }
        }
    }
    let mut out: Vec<Vec<usize>> = cells
        .into_iter()
        .filter(|c| c.verts.iter().all(|&v| v < n))
        .map(|c| {
            let mut v = c.verts;
            v.sort_unstable();
            v
        })
        .collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_midpoint() {
        let known = vec![(vec![0.0], 0.2), (vec![10.0], 0.8)];
        let v = interpolate_points(&known, &[vec![5.0], vec![12.0], vec![-1.0]]);
        assert!((v[0] - 0.5).abs() < 1e-12);
        assert_eq!(v[1], 0.8);
        assert_eq!(v[2], 0.2);
    }

    #[test]
    fn plane_is_reproduced_inside_hull() {
        let f = |x: f64, y: f64| 0.3 + 0.05 * x - 0.02 * y;
        let known: Vec<(Vec<f64>, f64)> =
            [(0.0, 0.0), (6.0, 0.0), (0.0, 6.0), (6.0, 6.0), (3.0, 2.0)]
                .iter()
                .map(|&(x, y)| (vec![x, y], f(x, y)))
                .collect();
        let qs: Vec<Vec<f64>> = (0..7)
            .flat_map(|x| (0..7).map(move |y| vec![x as f64, y as f64]))
            .collect();
        let v = interpolate_points(&known, &qs);
        for (q, val) in qs.iter().zip(v) {
            assert!((val - f(q[0], q[1])).abs() < 1e-9, "{q:?}");
        }
    }

    #[test]
    fn collinear_known_points_fall_back_to_nearest() {
        let known = vec![
            (vec![0.0, 0.0], 1.0),
            (vec![2.0, 0.0], 2.0),
            (vec![4.0, 0.0], 3.0),
        ];
        let v = interpolate_points(&known, &[vec![4.0, 3.0], vec![2.0, 0.0]]);
        assert_eq!(v, vec![3.0, 2.0]);
    }
}
