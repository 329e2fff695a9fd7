/// Natural cubic spline through strictly increasing knots. No extrapolation.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    second: Vec<f64>,
}

impl CubicSpline {
    /// Returns `None` unless there are at least two strictly increasing, finite knots.
    pub fn natural(x: Vec<f64>, y: Vec<f64>) -> Option<Self> {
        let n = x.len();
        if n < 2 || y.len() != n || x.iter().chain(&y).any(|v| !v.is_finite()) {
            return None;
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return None;
        }
        // tridiagonal solve for the interior second derivatives
        let mut second = vec![0.0; n];
        let mut u = vec![0.0; n];
        for i in 1..n - 1 {
            let sig = (x[i] - x[i - 1]) / (x[i + 1] - x[i - 1]);
            let p = sig * second[i - 1] + 2.0;
            second[i] = (sig - 1.0) / p;
            let d = (y[i + 1] - y[i]) / (x[i + 1] - x[i]) - (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
            u[i] = (6.0 * d / (x[i + 1] - x[i - 1]) - sig * u[i - 1]) / p;
        }
        second[n - 1] = 0.0;
        for k in (0..n - 1).rev() {
            second[k] = second[k] * second[k + 1] + u[k];
        }
        second[0] = 0.0;
        Some(Self { x, y, second })
    }

    pub fn knots(&self) -> (&[f64], &[f64]) {
        (&self.x, &self.y)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().unwrap())
    }

    /// Value at `r`, or `None` outside the knot range.
    pub fn eval(&self, r: f64) -> Option<f64> {
        let (lo, hi) = self.range();
        if !(lo..=hi).contains(&r) {
            return None;
        }
        let k = match self.x.binary_search_by(|v| v.partial_cmp(&r).unwrap()) {
            Ok(i) => return Some(self.y[i]),
            Err(i) => i - 1,
        };
        let h = self.x[k + 1] - self.x[k];
        let a = (self.x[k + 1] - r) / h;
        let b = (r - self.x[k]) / h;
        Some(
            a * self.y[k]
                + b * self.y[k + 1]
                + ((a * a * a - a) * self.second[k] + (b * b * b - b) * self.second[k + 1]) * h * h / 6.0,
        )
    }
}
