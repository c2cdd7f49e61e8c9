//! Quadrature primitives: fixed Gauss-Legendre rules, composite panel sums,
//! double-exponential (tanh-sinh) integration for endpoint singularities, and
//! a cosine-Fourier integral over a half line.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;


/// Values that can be accumulated by the quadrature routines.
pub trait Quantity: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl Quantity for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Quantity for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Two complex values integrated together, such as a pair of weighted moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair(pub Complex64, pub Complex64);

impl Add for Pair {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Pair(self.0 + o.0, self.1 + o.1)
    }
}

impl Sub for Pair {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Pair(self.0 - o.0, self.1 - o.1)
    }
}

impl Mul<f64> for Pair {
    type Output = Self;
    fn mul(self, w: f64) -> Self {
        Pair(self.0 * w, self.1 * w)
    }
}

impl Quantity for Pair {
    fn zero() -> Self {
        Pair(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }
    fn magnitude(&self) -> f64 {
        self.0.norm().max(self.1.norm())
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = (n + 1) / 2;
        for i in 0..m {
            // Tricomi initial guess followed by Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Points and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<T: Quantity, F: FnMut(f64) -> T>(&self, mut f: F, a: f64, b: f64) -> T {
        self.mapped(a, b).fold(T::zero(), |acc, (x, w)| acc + f(x) * w)
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

pub(crate) fn gl8() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(8))
}

pub(crate) fn gl16() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(16))
}

/// Sum of a Gauss-Legendre rule applied on consecutive panels given by
/// `breaks` (must be increasing).
pub fn composite<T: Quantity, F: FnMut(f64) -> T>(rule: &GaussLegendre, mut f: F, breaks: &[f64]) -> T {
    breaks
        .windows(2)
        .fold(T::zero(), |acc, w| acc + rule.integrate(&mut f, w[0], w[1]))
}

/// Tanh-sinh integration on `[a, b]`.
///
/// The integrand is handed both the abscissa and its distance to the nearer
/// endpoint (signed: negative when measured from `b`), so that integrands with
/// an endpoint singularity can be evaluated without cancellation.
/// Nodes that round onto an endpoint are skipped.
pub fn tanh_sinh<T: Quantity, F: FnMut(f64, f64) -> T>(mut f: F, a: f64, b: f64, tol: f64) -> T {
    const T_MAX: f64 = 4.0;
    let half = 0.5 * (b - a);
    if half == 0.0 {
        return T::zero();
    }
    let mut eval = |t: f64| -> T {
        // Map t to x in (-1, 1) and return weight * f.
        let u = FRAC_PI_2 * t.sinh();
        let cu = u.cosh();
        let w = FRAC_PI_2 * t.cosh() / (cu * cu);
        // Distance from the nearer endpoint, computed without cancellation.
        let gap = half * (-u.abs()).exp() / cu;
        let (x, d) = if t < 0.0 { (a + gap, gap) } else { (b - gap, -gap) };
        if gap == 0.0 || x <= a || x >= b {
            return T::zero();
        }
        f(x, d) * (w * half)
    };

    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        if t > T_MAX {
            break;
        }
        sum = sum + eval(t) + eval(-t);
        k += 1;
    }
    let mut estimate = sum * h;
    for _level in 0..10 {
        h *= 0.5;
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            if t > T_MAX {
                break;
            }
            sum = sum + eval(t) + eval(-t);
            k += 2;
        }
        let next = sum * h;
        let diff = (next - estimate).magnitude();
        estimate = next;
        if diff <= tol * estimate.magnitude().max(1e-300) {
            break;
        }
    }
    estimate
}

/// Panel breakpoints on `[0, end]` for an integrand whose amplitude has a peak
/// of width `peak` at the origin and otherwise varies on the scale of the
/// abscissa itself, multiplied by an oscillation of angular frequency `freq`
/// (zero for none).
pub(crate) fn graded_breaks(peak: f64, freq: f64, end: f64) -> Vec<f64> {
    let mut breaks = vec![0.0];
    let mut x = 0.25 * peak.clamp(1e-12, 0.5);
    let max_step = if freq > 0.0 { PI / freq } else { f64::INFINITY };
    // Geometric panels through the peak.
    while x < 1.0 && x < end {
        breaks.push(x);
        x += (0.5 * x).min(max_step);
    }
    let mut x = *breaks.last().unwrap();
    while x < end {
        let step = (0.5 * x.max(1.0)).min(max_step);
        x = (x + step).min(end);
        breaks.push(x);
    }
    breaks
}

/// Panel breakpoints on `[lo, pole - w]` and `[pole + w, hi]` that grow
/// geometrically away from a pole at `pole`, capped at `max_step`.
pub(crate) fn pole_breaks(pole: f64, w: f64, lo: f64, hi: f64, max_step: f64) -> (Vec<f64>, Vec<f64>) {
    let mut left = vec![pole - w];
    let mut x = pole - w;
    while x > lo {
        x = (x - (0.5 * (pole - x)).min(max_step)).max(lo);
        left.push(x);
    }
    left.reverse();
    let mut right = vec![pole + w];
    let mut x = pole + w;
    while x < hi {
        x = (x + (0.5 * (x - pole)).min(max_step)).min(hi);
        right.push(x);
    }
    (left, right)
}

/// `∫_start^∞ g(k) cos(freq k) dk` for an amplitude `g` that is smooth and
/// decays at least like `k^{-2}`.
///
/// The range is cut at a point `K` beyond which two integration-by-parts
/// terms of the asymptotic tail leave a remainder of order `1e-13`.
///
/// `peak` is the width of a possible peak of `g` at `k = 0` (only used when
/// `start == 0`).
pub fn cosine_integral<F: Fn(f64) -> f64>(g: F, freq: f64, start: f64, peak: f64) -> f64 {
    let end = (50.0_f64).max(2800.0 / freq.powf(0.75)).max(4.0 * start);
    let breaks: Vec<f64> = if start == 0.0 {
        graded_breaks(peak, freq, end)
    } else {
        let max_step = PI / freq;
        let mut v = vec![start];
        let mut x = start;
        while x < end {
            x = (x + (0.5 * x.max(1.0)).min(max_step)).min(end);
            v.push(x);
        }
        v
    };
    composite(gl8(), |k| g(k) * (freq * k).cos(), &breaks) + cosine_tail(&g, freq, end)
}

/// Asymptotic tail `∫_K^∞ g(k) cos(freq k) dk` from two integrations by parts.
fn cosine_tail<F: Fn(f64) -> f64>(g: &F, freq: f64, end: f64) -> f64 {
    let h = 1e-3 * end;
    let dg = (g(end + h) - g(end - h)) / (2.0 * h);
    -g(end) * (freq * end).sin() / freq - dg * (freq * end).cos() / (freq * freq)
}
