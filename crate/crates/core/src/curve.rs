//! Sampled `C¹` curves `γ: [a, b] → R⁴`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type Vec4 = [f64; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Interpolation {
    /// Cubic Hermite through the nodes with the stored tangents.
    Hermite,
    /// Piecewise linear; the tangent on a segment is its secant.
    Linear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    params: Vec<f64>,
    points: Vec<Vec4>,
    tangents: Vec<Vec4>,
    interp: Interpolation,
}

pub(crate) fn norm(v: &Vec4) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

pub(crate) fn sub(a: &Vec4, b: &Vec4) -> Vec4 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

pub(crate) fn dist(a: &Vec4, b: &Vec4) -> f64 {
    norm(&sub(a, b))
}

fn scale(v: &Vec4, s: f64) -> Vec4 {
    [v[0] * s, v[1] * s, v[2] * s, v[3] * s]
}

impl SampledCurve {
    pub fn new(params: Vec<f64>, points: Vec<Vec4>, tangents: Vec<Vec4>) -> Result<Self> {
        Self::with_interpolation(params, points, tangents, Interpolation::Hermite)
    }

    pub fn with_interpolation(
        params: Vec<f64>,
        points: Vec<Vec4>,
        tangents: Vec<Vec4>,
        interp: Interpolation,
    ) -> Result<Self> {
        if params.len() < 2 {
            return Err(Error::Invalid("a curve needs at least two nodes".into()));
        }
        if points.len() != params.len() || tangents.len() != params.len() {
            return Err(Error::Invalid(format!(
                "length mismatch: {} params, {} points, {} tangents",
                params.len(),
                points.len(),
                tangents.len()
            )));
        }
        if let Some(i) = params.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::Invalid(format!(
                "parameter grid not strictly increasing at node {}",
                i + 1
            )));
        }
        let finite = |v: &Vec4| v.iter().all(|c| c.is_finite());
        if !points.iter().all(finite) || !tangents.iter().all(finite) {
            return Err(Error::Invalid("non-finite curve data".into()));
        }
        if let Some(i) = tangents.iter().position(|v| norm(v) == 0.0) {
            return Err(Error::Invalid(format!(
                "curve is not regular: zero tangent at s = {}",
                params[i]
            )));
        }
        Ok(Self {
            params,
            points,
            tangents,
            interp,
        })
    }

    /// Samples `pos` and `vel` on `n` equispaced nodes of `[a, b]`.
    pub fn from_fn(
        a: f64,
        b: f64,
        n: usize,
        pos: impl Fn(f64) -> Vec4,
        vel: impl Fn(f64) -> Vec4,
    ) -> Result<Self> {
        if n < 2 || !(b > a) {
            return Err(Error::Invalid(format!(
                "bad sampling [{a}, {b}] with {n} nodes"
            )));
        }
        let params: Vec<f64> = (0..n)
            .map(|i| {
                if i + 1 == n {
                    b
                } else {
                    a + (b - a) * i as f64 / (n - 1) as f64
                }
            })
            .collect();
        let points = params.iter().map(|&s| pos(s)).collect();
        let tangents = params.iter().map(|&s| vel(s)).collect();
        Self::new(params, points, tangents)
    }

    /// Hermite curve with tangents from second-order finite differences.
    pub fn from_points(params: Vec<f64>, points: Vec<Vec4>) -> Result<Self> {
        let n = params.len();
        if n < 3 || points.len() != n {
            return Err(Error::Invalid(
                "finite-difference tangents need at least three matching nodes".into(),
            ));
        }
        let mut tangents = vec![[0.0; 4]; n];
        for i in 0..n {
            // three-point stencil on a possibly nonuniform grid
            let (j0, j1, j2) = if i == 0 {
                (0, 1, 2)
            } else if i == n - 1 {
                (n - 3, n - 2, n - 1)
            } else {
                (i - 1, i, i + 1)
            };
            let (s0, s1, s2, s) = (params[j0], params[j1], params[j2], params[i]);
            let w0 = (2.0 * s - s1 - s2) / ((s0 - s1) * (s0 - s2));
            let w1 = (2.0 * s - s0 - s2) / ((s1 - s0) * (s1 - s2));
            let w2 = (2.0 * s - s0 - s1) / ((s2 - s0) * (s2 - s1));
            for c in 0..4 {
                tangents[i][c] = w0 * points[j0][c] + w1 * points[j1][c] + w2 * points[j2][c];
            }
        }
        Self::new(params, points, tangents)
    }

    /// Piecewise-linear curve through `points` with the given parameters.
    pub fn polyline(params: Vec<f64>, points: Vec<Vec4>) -> Result<Self> {
        let n = points.len();
        if n < 2 || params.len() != n {
            return Err(Error::Invalid(
                "polyline needs at least two matching nodes".into(),
            ));
        }
        let mut tangents = Vec::with_capacity(n);
        for i in 0..n {
            let k = i.min(n - 2);
            let h = params[k + 1] - params[k];
            tangents.push(scale(&sub(&points[k + 1], &points[k]), 1.0 / h));
        }
        Self::with_interpolation(params, points, tangents, Interpolation::Linear)
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn points(&self) -> &[Vec4] {
        &self.points
    }

    pub fn tangents(&self) -> &[Vec4] {
        &self.tangents
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interp
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.params[0], *self.params.last().unwrap())
    }

    pub fn start(&self) -> Vec4 {
        self.points[0]
    }

    pub fn end(&self) -> Vec4 {
        *self.points.last().unwrap()
    }

    /// Index `k` with `params[k] ≤ s ≤ params[k+1]`, clamped to the grid.
    pub fn segment(&self, s: f64) -> usize {
        let n = self.params.len();
        match self.params.binary_search_by(|p| p.total_cmp(&s)) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        }
    }

    fn segment_tangents(&self, k: usize) -> (Vec4, Vec4) {
        match self.interp {
            Interpolation::Hermite => (self.tangents[k], self.tangents[k + 1]),
            Interpolation::Linear => (self.tangents[k], self.tangents[k]),
        }
    }

    pub fn eval(&self, s: f64) -> Vec4 {
        let k = self.segment(s);
        self.eval_on(k, s)
    }

    pub fn eval_tangent(&self, s: f64) -> Vec4 {
        let k = self.segment(s);
        self.tangent_on(k, s)
    }

    pub(crate) fn eval_on(&self, k: usize, s: f64) -> Vec4 {
        let (s0, s1) = (self.params[k], self.params[k + 1]);
        let h = s1 - s0;
        let tau = (s - s0) / h;
        let (p0, p1) = (&self.points[k], &self.points[k + 1]);
        match self.interp {
            Interpolation::Linear => std::array::from_fn(|c| p0[c] + tau * (p1[c] - p0[c])),
            Interpolation::Hermite => {
                let (m0, m1) = self.segment_tangents(k);
                let t2 = tau * tau;
                let t3 = t2 * tau;
                let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
                let h10 = t3 - 2.0 * t2 + tau;
                let h01 = -2.0 * t3 + 3.0 * t2;
                let h11 = t3 - t2;
                std::array::from_fn(|c| {
                    h00 * p0[c] + h10 * h * m0[c] + h01 * p1[c] + h11 * h * m1[c]
                })
            }
        }
    }

    pub(crate) fn tangent_on(&self, k: usize, s: f64) -> Vec4 {
        let (s0, s1) = (self.params[k], self.params[k + 1]);
        let h = s1 - s0;
        let (m0, m1) = self.segment_tangents(k);
        match self.interp {
            Interpolation::Linear => m0,
            Interpolation::Hermite => {
                let tau = (s - s0) / h;
                let t2 = tau * tau;
                let d00 = 6.0 * t2 - 6.0 * tau;
                let d10 = 3.0 * t2 - 4.0 * tau + 1.0;
                let d01 = -d00;
                let d11 = 3.0 * t2 - 2.0 * tau;
                let (p0, p1) = (&self.points[k], &self.points[k + 1]);
                std::array::from_fn(|c| (d00 * p0[c] + d01 * p1[c]) / h + d10 * m0[c] + d11 * m1[c])
            }
        }
    }

    /// Same nodes with every point and tangent passed through `f`.
    pub fn map_points(
        &self,
        f: impl Fn(&Vec4) -> Vec4,
        df: impl Fn(&Vec4, &Vec4) -> Vec4,
    ) -> Result<Self> {
        let points = self.points.iter().map(&f).collect();
        let tangents = self
            .points
            .iter()
            .zip(&self.tangents)
            .map(|(p, v)| df(p, v))
            .collect();
        Self::with_interpolation(self.params.clone(), points, tangents, self.interp)
    }

    /// Resamples on `params` (inside the domain) keeping the interpolation rule.
    pub fn resample(&self, params: &[f64]) -> Result<Self> {
        let points = params.iter().map(|&s| self.eval(s)).collect();
        match self.interp {
            Interpolation::Hermite => {
                let tangents = params.iter().map(|&s| self.eval_tangent(s)).collect();
                Self::new(params.to_vec(), points, tangents)
            }
            Interpolation::Linear => Self::polyline(params.to_vec(), points),
        }
    }
}
