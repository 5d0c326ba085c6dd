//! Gauss–Legendre rules and corner-singular cubature.

use std::sync::OnceLock;

use crate::linalg::Vec3;

const MAX_NODES: usize = 64;

#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    fn compute(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussRule { nodes, weights }
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Cached `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss(n: usize) -> &'static GaussRule {
    static RULES: [OnceLock<GaussRule>; MAX_NODES + 1] = [const { OnceLock::new() }; MAX_NODES + 1];
    assert!((1..=MAX_NODES).contains(&n), "unsupported Gauss order {n}");
    RULES[n].get_or_init(|| GaussRule::compute(n))
}

/// Tensor Gauss–Legendre cubature of `f` over the box `[lo, hi]`, split into
/// `split³` equal sub-boxes.
pub fn box_cubature<F: Fn(Vec3) -> f64>(f: &F, lo: Vec3, hi: Vec3, order: usize, split: usize) -> f64 {
    let rule = gauss(order);
    let mut total = 0.0;
    let step = [
        (hi[0] - lo[0]) / split as f64,
        (hi[1] - lo[1]) / split as f64,
        (hi[2] - lo[2]) / split as f64,
    ];
    for a in 0..split {
        let (x0, x1) = (lo[0] + a as f64 * step[0], lo[0] + (a + 1) as f64 * step[0]);
        for b in 0..split {
            let (y0, y1) = (lo[1] + b as f64 * step[1], lo[1] + (b + 1) as f64 * step[1]);
            for c in 0..split {
                let (z0, z1) = (lo[2] + c as f64 * step[2], lo[2] + (c + 1) as f64 * step[2]);
                let mut acc = 0.0;
                for (x, wx) in rule.on(x0, x1) {
                    for (y, wy) in rule.on(y0, y1) {
                        let wxy = wx * wy;
                        for (z, wz) in rule.on(z0, z1) {
                            acc += wxy * wz * f([x, y, z]);
                        }
                    }
                }
                total += acc;
            }
        }
    }
    total
}

/// Panel breakpoints on `[0, 1]`, geometrically graded toward 0 down to
/// width `a`.
fn graded_panels(a: f64) -> Vec<f64> {
    let mut pts = vec![1.0];
    let mut x = 1.0;
    let floor = a.max(1e-12);
    while x > 4.0 * floor {
        x *= 0.25;
        pts.push(x);
    }
    pts.push(0.0);
    pts.reverse();
    pts
}

/// Integral of `f` over the box spanned by the origin and the corner `e`
/// (components may be negative), where `f` has at most an inverse-distance
/// singularity at the origin measured in the metric `diag(metric)`.
///
/// Splits the box into three pyramids with apex at the origin and applies the
/// Duffy substitution, which cancels the singularity.
pub fn corner_cubature<F: Fn(Vec3) -> f64>(f: &F, e: Vec3, metric: Vec3) -> f64 {
    if e.iter().any(|v| *v == 0.0) {
        return 0.0;
    }
    let vol = (e[0] * e[1] * e[2]).abs();
    let rs = gauss(12);
    let ruv = gauss(16);
    let scaled = [
        (metric[0] * e[0]).abs(),
        (metric[1] * e[1]).abs(),
        (metric[2] * e[2]).abs(),
    ];
    let mut total = 0.0;
    for p in 0..3 {
        let q = (p + 1) % 3;
        let r = (p + 2) % 3;
        let pu = graded_panels(scaled[p] / scaled[q]);
        let pv = graded_panels(scaled[p] / scaled[r]);
        let mut acc = 0.0;
        for wu in pu.windows(2) {
            for (u, wtu) in ruv.on(wu[0], wu[1]) {
                for wv in pv.windows(2) {
                    for (v, wtv) in ruv.on(wv[0], wv[1]) {
                        let mut dir = [0.0; 3];
                        dir[p] = e[p];
                        dir[q] = e[q] * u;
                        dir[r] = e[r] * v;
                        let mut inner = 0.0;
                        for (s, ws) in rs.on(0.0, 1.0) {
                            inner += ws * s * s * f([s * dir[0], s * dir[1], s * dir[2]]);
                        }
                        acc += wtu * wtv * inner;
                    }
                }
            }
        }
        total += acc;
    }
    vol * total
}
