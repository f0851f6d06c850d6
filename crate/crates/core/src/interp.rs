//! One-dimensional interpolation on uniform nodes.

/// Monotone piecewise-cubic Hermite interpolant (Fritsch–Carlson slopes)
/// through `(x0 + i·h, y[i])`. Outside the node range the value is zero.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x0: f64,
    h: f64,
    y: Vec<f64>,
    slope: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x0: f64, h: f64, y: Vec<f64>) -> Self {
        let n = y.len();
        assert!(n >= 2, "need at least two nodes");
        let delta: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]) / h).collect();
        let mut slope = vec![0.0; n];
        slope[0] = delta[0];
        slope[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            let (d0, d1) = (delta[i - 1], delta[i]);
            // harmonic mean of same-signed secants, flat at extrema
            slope[i] = if d0 * d1 > 0.0 { 2.0 * d0 * d1 / (d0 + d1) } else { 0.0 };
        }
        Self { x0, h, y, slope }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let r = (x - self.x0) / self.h;
        let n = self.y.len();
        if r < 0.0 || r > (n - 1) as f64 {
            return 0.0;
        }
        let i = (r.floor() as usize).min(n - 2);
        let s = r - i as f64;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[i] + h10 * self.h * self.slope[i] + h01 * self.y[i + 1] + h11 * self.h * self.slope[i + 1]
    }
}

/// Catmull–Rom cubic through periodic samples `y[k]` at `x0 + k·h`, period `y.len()·h`.
pub fn periodic_cubic(y: &[f64], x0: f64, h: f64, x: f64) -> f64 {
    let n = y.len() as isize;
    let r = (x - x0) / h;
    let i = r.floor();
    let s = r - i;
    let i = i as isize;
    let at = |k: isize| y[k.rem_euclid(n) as usize];
    let (p0, p1, p2, p3) = (at(i - 1), at(i), at(i + 1), at(i + 2));
    p1 + 0.5
        * s
        * (p2 - p0 + s * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + s * (3.0 * (p1 - p2) + p3 - p0)))
}
