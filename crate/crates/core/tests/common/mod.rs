#![allow(dead_code)]

use num_complex::Complex64;

/// Classical multiple-exchange Remez for a Type-I zero-phase response
/// `Σ_{k=0}^{l} b_k cos kω` on a dense grid, using barycentric Lagrange
/// interpolation in `x = cos ω`. Returns the maximum error on the grid.
pub fn pm_exchange(l: usize, bands: &[(f64, f64, f64)], grid_points: usize) -> f64 {
    let total: f64 = bands.iter().map(|b| b.1 - b.0).sum();
    let mut w = Vec::new();
    let mut d = Vec::new();
    let mut seg = Vec::new();
    for (s, &(lo, hi, t)) in bands.iter().enumerate() {
        let n = ((grid_points as f64 * (hi - lo) / total).ceil() as usize).max(2);
        for i in 0..n {
            w.push(lo + (hi - lo) * i as f64 / (n - 1) as f64);
            d.push(t);
            seg.push(s);
        }
    }
    let x: Vec<f64> = w.iter().map(|v| v.cos()).collect();
    let n = w.len();
    let r = l + 2;
    let mut ext: Vec<usize> = (0..r).map(|i| i * (n - 1) / (r - 1)).collect();
    let mut best = f64::INFINITY;
    for _ in 0..200 {
        let xe: Vec<f64> = ext.iter().map(|&i| x[i]).collect();
        let de: Vec<f64> = ext.iter().map(|&i| d[i]).collect();
        let bw = bary_weights(&xe);
        let num: f64 = (0..r).map(|k| bw[k] * de[k]).sum();
        let den: f64 = (0..r)
            .map(|k| bw[k] * if k % 2 == 0 { 1.0 } else { -1.0 })
            .sum();
        let delta = num / den;
        let xi = &xe[..r - 1];
        let ci: Vec<f64> = (0..r - 1)
            .map(|k| de[k] - if k % 2 == 0 { delta } else { -delta })
            .collect();
        let wi = bary_weights(xi);
        let err: Vec<f64> = (0..n)
            .map(|i| d[i] - bary_eval(xi, &wi, &ci, x[i]))
            .collect();
        let emax = err.iter().fold(0.0f64, |a, e| a.max(e.abs()));
        best = best.min(emax);
        if emax - delta.abs() <= 1e-13 * emax.max(1e-300) {
            return emax;
        }
        // local extrema of the signed error, band edges included
        let mut cand: Vec<usize> = Vec::new();
        for i in 0..n {
            let left = i > 0 && seg[i - 1] == seg[i];
            let right = i + 1 < n && seg[i + 1] == seg[i];
            let e = err[i];
            let is_ext = if e >= 0.0 {
                (!left || e >= err[i - 1]) && (!right || e > err[i + 1])
            } else {
                (!left || e <= err[i - 1]) && (!right || e < err[i + 1])
            };
            if is_ext && e.abs() >= delta.abs() * (1.0 - 1e-12) {
                cand.push(i);
            }
        }
        let mut alt: Vec<usize> = Vec::new();
        for i in cand {
            match alt.last() {
                Some(&j) if err[j].signum() == err[i].signum() => {
                    if err[i].abs() > err[j].abs() {
                        *alt.last_mut().unwrap() = i;
                    }
                }
                _ => alt.push(i),
            }
        }
        while alt.len() > r {
            let first = err[alt[0]].abs();
            let last = err[*alt.last().unwrap()].abs();
            if first < last {
                alt.remove(0);
            } else {
                alt.pop();
            }
        }
        if alt.len() < r {
            return best;
        }
        if alt == ext {
            return emax;
        }
        ext = alt;
    }
    best
}

fn bary_weights(x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|k| {
            let mut p = 1.0;
            for j in 0..x.len() {
                if j != k {
                    p *= 2.0 * (x[k] - x[j]);
                }
            }
            1.0 / p
        })
        .collect()
}

fn bary_eval(xi: &[f64], w: &[f64], c: &[f64], x: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..xi.len() {
        let dx = x - xi[k];
        if dx == 0.0 {
            return c[k];
        }
        let t = w[k] / dx;
        num += t * c[k];
        den += t;
    }
    num / den
}

/// Minimum over a zooming coefficient grid of `max_n |d_n − Σ f_k u_{n,k}|`.
/// Returns `None` when the minimizer sits on the boundary of the search
/// window `[−half_width, half_width]^K`.
pub fn brute_force_minimax(
    u: &[Vec<Complex64>],
    d: &[Complex64],
    half_width: f64,
    final_step: f64,
) -> Option<(f64, Vec<f64>)> {
    let k1 = u[0].len();
    let obj = |f: &[f64]| {
        u.iter()
            .zip(d)
            .map(|(row, &dn)| {
                (dn - row.iter().zip(f).map(|(a, b)| a * b).sum::<Complex64>()).norm()
            })
            .fold(0.0, f64::max)
    };
    let mut center = vec![0.0; k1];
    let mut radius = half_width;
    let mut step = half_width / 20.0;
    let mut best: (f64, Vec<f64>);
    let mut shifts = 0;
    loop {
        let per = (2.0 * radius / step).round() as i64;
        let mut idx = vec![0i64; k1];
        let mut local = (f64::INFINITY, center.clone(), idx.clone());
        loop {
            let f: Vec<f64> = (0..k1)
                .map(|k| center[k] - radius + step * idx[k] as f64)
                .collect();
            let v = obj(&f);
            if v < local.0 {
                local = (v, f, idx.clone());
            }
            let mut k = 0;
            while k < k1 {
                idx[k] += 1;
                if idx[k] <= per {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == k1 {
                break;
            }
        }
        if radius == half_width && local.2.iter().any(|&i| i == 0 || i == per) {
            return None;
        }
        best = (local.0, local.1.clone());
        let at_center = local.0 >= obj(&center) - 1e-15;
        if radius < half_width && !at_center && shifts < 100 {
            // re-center at the same resolution while the window improves
            shifts += 1;
            center = local.1;
            continue;
        }
        if step <= final_step * (1.0 + 1e-9) {
            break;
        }
        center = local.1;
        radius = 6.0 * step;
        step = (step / 5.0).max(final_step);
    }
    Some(best)
}
