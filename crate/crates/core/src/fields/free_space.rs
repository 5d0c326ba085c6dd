//! Whole-lattice Green's function of the 7-point Laplacian and the
//! free-space solver built on it.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::ScalarField;
use crate::fft::Fft3;
use crate::quadrature::gauss;

const TAIL_TERMS: usize = 9;

/// `e^{−x} I_m(x)` for `m = 0..=dmax` by normalized backward recurrence.
fn scaled_bessel(x: f64, dmax: usize) -> Vec<f64> {
    let start = dmax + 30 + (10.0 * x.sqrt()).ceil() as usize;
    let mut out = vec![0.0; dmax + 1];
    let (mut above, mut cur) = (0.0f64, 1e-280f64);
    let mut sum = 0.0;
    for m in (1..=start).rev() {
        // cur holds I_m, above holds I_{m+1}
        if m <= dmax {
            out[m] = cur;
        }
        sum += 2.0 * cur;
        let below = above + 2.0 * m as f64 / x * cur;
        above = cur;
        cur = below;
        if cur > 1e250 {
            let s = 1e-250;
            cur *= s;
            above *= s;
            sum *= s;
            out.iter_mut().for_each(|v| *v *= s);
        }
    }
    out[0] = cur;
    sum += cur;
    out.iter_mut().for_each(|v| *v /= sum);
    out
}

/// Quadrature nodes on dyadic panels of `[0, X]` and the cutoff `X`.
fn nodes(dmax: usize) -> (Vec<(f64, f64)>, f64) {
    let top = (200.0 * (dmax * dmax) as f64).max(1024.0);
    let rule = gauss(16);
    let mut out: Vec<(f64, f64)> = rule.on(0.0, 1.0).collect();
    let mut a = 1.0;
    while a < top {
        out.extend(rule.on(a, 2.0 * a));
        a *= 2.0;
    }
    (out, a)
}

fn hankel_coefficients(m: usize) -> [f64; TAIL_TERMS] {
    let mut c = [0.0; TAIL_TERMS];
    c[0] = 1.0;
    let mu = 4.0 * (m * m) as f64;
    for k in 1..TAIL_TERMS {
        let j = (2 * k - 1) as f64;
        c[k] = c[k - 1] * (mu - j * j) / (k as f64 * 8.0);
    }
    c
}

/// `½∫_X^∞ Π e^{−x}I_{d_i}(x) dx` from the large-argument expansion.
fn tail(d: [usize; 3], x: f64) -> f64 {
    let a = d.map(hankel_coefficients);
    let mut total = 0.0;
    for k in 0..TAIL_TERMS {
        let mut ck = 0.0;
        for i in 0..=k {
            for j in 0..=(k - i) {
                ck += a[0][i] * a[1][j] * a[2][k - i - j];
            }
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * ck * x.powf(-0.5 - k as f64) / (k as f64 + 0.5);
    }
    0.5 * (2.0 * PI).powf(-1.5) * total
}

/// `G(d)` with `6G(d) − Σ_{|e|=1} G(d+e) = δ_{d,0}` and `G → 0` at infinity.
pub fn lattice_green(d: [i64; 3]) -> f64 {
    let a = d.map(|x| x.unsigned_abs() as usize);
    let dmax = *a.iter().max().unwrap();
    let (nodes, top) = nodes(dmax);
    let mut acc = 0.0;
    for (x, w) in nodes {
        let g = scaled_bessel(x, dmax);
        acc += w * g[a[0]] * g[a[1]] * g[a[2]];
    }
    0.5 * acc + tail(a, top)
}

/// Dense table of `G` on `[0, dmax]³`.
struct GreenTable {
    dmax: usize,
    values: Vec<f64>,
}

impl GreenTable {
    fn build(dmax: usize) -> Self {
        let (nodes, top) = nodes(dmax);
        let bessel: Vec<(f64, Vec<f64>)> = nodes.iter().map(|(x, w)| (*w, scaled_bessel(*x, dmax))).collect();
        let m = dmax + 1;
        let rows: Vec<Vec<(usize, usize, f64)>> = (0..m)
            .into_par_iter()
            .map(|a| {
                let mut row = Vec::new();
                for b in 0..=a {
                    for c in 0..=b {
                        let mut acc = 0.0;
                        for (w, g) in &bessel {
                            acc += w * g[a] * g[b] * g[c];
                        }
                        row.push((b, c, 0.5 * acc + tail([a, b, c], top)));
                    }
                }
                row
            })
            .collect();
        let mut values = vec![0.0; m * m * m];
        for (a, row) in rows.into_iter().enumerate() {
            for (b, c, g) in row {
                for p in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
                    values[p[0] + m * (p[1] + m * p[2])] = g;
                }
            }
        }
        GreenTable { dmax, values }
    }

    fn at(&self, d: [i64; 3]) -> f64 {
        let m = self.dmax + 1;
        let a = d.map(|x| x.unsigned_abs() as usize);
        self.values[a[0] + m * (a[1] + m * a[2])]
    }
}

fn padding(n: usize) -> usize {
    n.div_ceil(2)
}

/// Spectrum of the periodized Green's function for an `n`-cell source.
fn kernel_spectrum(n: usize) -> Arc<Vec<Complex64>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<Complex64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(k) = cache.lock().unwrap().get(&n) {
        return k.clone();
    }
    let p = padding(n);
    let big = n + 2 * p;
    let m = big + n;
    let dmax = n + p - 1;
    let table = GreenTable::build(dmax);
    let mut data = vec![Complex64::new(0.0, 0.0); m * m * m];
    let wrap = |d: i64| d.rem_euclid(m as i64) as usize;
    let r = dmax as i64;
    for z in -r..=r {
        for y in -r..=r {
            for x in -r..=r {
                data[wrap(x) + m * (wrap(y) + m * wrap(z))] = Complex64::new(table.at([x, y, z]), 0.0);
            }
        }
    }
    Fft3::new([m; 3]).forward(&mut data);
    let k = Arc::new(data);
    cache.lock().unwrap().insert(n, k.clone());
    k
}

/// Free-space potential on the grid enlarged by `⌈n/2⌉` cells per side.
pub(super) fn solve(rhs: &ScalarField) -> ScalarField {
    let n = rhs.n;
    let p = padding(n);
    let big = n + 2 * p;
    let h = rhs.h();
    let l = rhs.l * big as f64 / n as f64;
    if rhs.max_abs() == 0.0 {
        return ScalarField { l, n: big, pad: p, values: vec![0.0; big * big * big] };
    }
    let m = big + n;
    let kernel = kernel_spectrum(n);
    let mut data = vec![Complex64::new(0.0, 0.0); m * m * m];
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                data[i + m * (j + m * k)] = Complex64::new(rhs.values[i + n * (j + n * k)], 0.0);
            }
        }
    }
    let fft = Fft3::new([m; 3]);
    fft.forward(&mut data);
    data.iter_mut().zip(kernel.iter()).for_each(|(a, b)| *a *= b);
    fft.inverse(&mut data);
    let mut values = vec![0.0; big * big * big];
    let wrap = |o: usize| (o as i64 - p as i64).rem_euclid(m as i64) as usize;
    for k in 0..big {
        for j in 0..big {
            for i in 0..big {
                values[i + big * (j + big * k)] = h * h * data[wrap(i) + m * (wrap(j) + m * wrap(k))].re;
            }
        }
    }
    ScalarField { l, n: big, pad: p, values }
}
