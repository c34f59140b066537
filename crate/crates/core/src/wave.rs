//! Explicit solver for `−∂_t² u + A u = f` on `g_α^ε = −dt² + ρ^ε`, reduced to
//! the `(x, y)` plane, with
//!
//! ```text
//! A u = w⁻¹ ∂_i (w ρ^{ij} ∂_j u),      w = √det ρ^ε.
//! ```
//!
//! The grid is cell-centered on `[−L, L]²` with `n` even, so the axis is a
//! cell corner. `A` is the gradient of the discrete energy
//!
//! ```text
//! E(u) = ½ Σ_corners h² [ Kxx ½(dx₁² + dx₂²) + Kyy ½(dy₁² + dy₂²) + 2 Kxy X̄ Ȳ ],
//! ```
//!
//! with `K = w ρ⁻¹` at corners, `dx₁, dx₂` the two x-differences meeting at a
//! corner and `X̄` their mean. Homogeneous Dirichlet data are imposed with odd
//! reflection ghosts; faces lying in the ghost layer are dropped and faces
//! between a ghost and an interior cell count with half weight. For `K = I`
//! this is the 5-point Laplacian.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::regularization::RegularizedField;
use crate::{Error, Result};

pub const DEFAULT_CFL: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Dirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub n: usize,
    pub half_width: f64,
    pub boundary: Boundary,
}

impl Grid2D {
    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::Invalid(format!(
                "grid size must be even and at least 2, got {n}"
            )));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::Invalid(format!("bad half width {half_width}")));
        }
        Ok(Self {
            n,
            half_width,
            boundary: Boundary::Dirichlet,
        })
    }

    pub fn h(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Center of cell `i`, `−L + (i + ½)h`.
    pub fn center(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.h()
    }

    pub fn corner(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.h()
    }

    /// Row-major index of cell `(i, j)` (`i` along x).
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    pub fn sample(&self, f: impl Fn(f64, f64) -> f64 + Sync) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        out.par_chunks_mut(n).enumerate().for_each(|(j, row)| {
            let y = self.center(j);
            for (i, v) in row.iter_mut().enumerate() {
                *v = f(self.center(i), y);
            }
        });
        out
    }

    /// Discrete `L²` norm `(Σ u² h²)^{1/2}`.
    pub fn l2_norm(&self, u: &[f64]) -> f64 {
        let h = self.h();
        (u.iter().map(|x| x * x).sum::<f64>() * h * h).sqrt()
    }

    pub fn l2_distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let h = self.h();
        (a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() * h * h).sqrt()
    }
}

/// Assembled coefficients of `A` on a grid.
#[derive(Debug, Clone)]
pub struct SpatialOperator {
    grid: Grid2D,
    /// `K = w ρ⁻¹` at the `(n+1)²` corners: `(Kxx, Kxy, Kyy)`.
    k: Vec<[f64; 3]>,
    /// `w` at cell centers.
    w: Vec<f64>,
    /// `sqrt(max λ_max(K) / min w)`.
    c_max: f64,
    /// Smallest eigenvalue of `K` over the corners.
    k_min: f64,
}

fn planar_coefficients(r11: f64, r12: f64, r22: f64) -> Result<([f64; 3], f64)> {
    let det = r11 * r22 - r12 * r12;
    if !(det > 0.0 && r11 > 0.0) {
        return Err(Error::Numerical(format!(
            "spatial metric not positive definite: [[{r11}, {r12}], [{r12}, {r22}]]"
        )));
    }
    let w = det.sqrt();
    Ok(([r22 / w, -r12 / w, r11 / w], w))
}

fn eig2(k: &[f64; 3]) -> (f64, f64) {
    let m = 0.5 * (k[0] + k[2]);
    let d = (0.25 * (k[0] - k[2]).powi(2) + k[1] * k[1]).sqrt();
    (m - d, m + d)
}

impl SpatialOperator {
    /// Coefficients from `ρ^ε`; requires an admissible `(α, φ, ε)`.
    pub fn assemble(field: &RegularizedField, eps: f64, grid: &Grid2D) -> Result<Self> {
        if field.beta(eps).beta().is_none() {
            return Err(Error::Precondition(format!(
                "lower bound inadmissible for alpha = {} at eps = {eps}",
                field.params().alpha()
            )));
        }
        Self::from_planar_metric(grid, |x, y| {
            let r = field.spatial_metric(eps, x, y, 0.0)?;
            Ok([r.get(0, 0), r.get(0, 1), r.get(1, 1)])
        })
    }

    /// Coefficients from any planar metric `(x, y) ↦ (ρ₁₁, ρ₁₂, ρ₂₂)`.
    pub fn from_planar_metric(
        grid: &Grid2D,
        rho: impl Fn(f64, f64) -> Result<[f64; 3]> + Sync,
    ) -> Result<Self> {
        let n = grid.n;
        let k: Vec<[f64; 3]> = (0..(n + 1) * (n + 1))
            .into_par_iter()
            .map(|c| {
                let (i, j) = (c % (n + 1), c / (n + 1));
                let r = rho(grid.corner(i), grid.corner(j))?;
                Ok(planar_coefficients(r[0], r[1], r[2])?.0)
            })
            .collect::<Result<_>>()?;
        let w: Vec<f64> = (0..n * n)
            .into_par_iter()
            .map(|c| {
                let (i, j) = (c % n, c / n);
                let r = rho(grid.center(i), grid.center(j))?;
                Ok(planar_coefficients(r[0], r[1], r[2])?.1)
            })
            .collect::<Result<_>>()?;
        let (mut kmin, mut kmax) = (f64::INFINITY, 0.0f64);
        for kc in &k {
            let (lo, hi) = eig2(kc);
            kmin = kmin.min(lo);
            kmax = kmax.max(hi);
        }
        let wmin = w.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Self {
            grid: *grid,
            k,
            w,
            c_max: (kmax / wmin).sqrt(),
            k_min: kmin,
        })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn corner_coefficients(&self) -> &[[f64; 3]] {
        &self.k
    }

    pub fn c_max(&self) -> f64 {
        self.c_max
    }

    pub fn k_min(&self) -> f64 {
        self.k_min
    }

    /// Largest stable step for the given CFL constant.
    pub fn max_dt(&self, cfl: f64) -> f64 {
        cfl * self.grid.h() / self.c_max
    }

    /// Cell values extended by one layer of odd-reflection ghosts.
    fn extend(&self, u: &[f64]) -> Vec<f64> {
        let n = self.grid.n;
        let m = n + 2;
        let mut e = vec![0.0; m * m];
        for j in 0..n {
            let src = &u[j * n..(j + 1) * n];
            e[(j + 1) * m + 1..(j + 1) * m + 1 + n].copy_from_slice(src);
            e[(j + 1) * m] = -src[0];
            e[(j + 1) * m + n + 1] = -src[n - 1];
        }
        for p in 0..m {
            e[p] = -e[m + p];
            e[(n + 1) * m + p] = -e[n * m + p];
        }
        e
    }

    fn face_mask(row: usize, a: usize, n: usize) -> f64 {
        // row and a are extended indices; the face joins cells a and a+1
        if row == 0 || row == n + 1 {
            0.0
        } else if a == 0 || a == n {
            0.5
        } else {
            1.0
        }
    }

    /// Differences `(dx₁, dx₂, dy₁, dy₂)` and masks at corner `(ci, cj)`.
    #[inline]
    fn corner_diffs(&self, e: &[f64], ci: usize, cj: usize) -> ([f64; 4], [f64; 4]) {
        let n = self.grid.n;
        let m = n + 2;
        let inv_h = 1.0 / self.grid.h();
        let a = e[cj * m + ci];
        let b = e[cj * m + ci + 1];
        let c = e[(cj + 1) * m + ci];
        let d = e[(cj + 1) * m + ci + 1];
        let diffs = [
            (b - a) * inv_h,
            (d - c) * inv_h,
            (c - a) * inv_h,
            (d - b) * inv_h,
        ];
        let masks = [
            Self::face_mask(cj, ci, n),
            Self::face_mask(cj + 1, ci, n),
            Self::face_mask(ci, cj, n),
            Self::face_mask(ci + 1, cj, n),
        ];
        (diffs, masks)
    }

    /// `Σ_corners a_c h² = ⟨u, −A u⟩_w`.
    pub fn bilinear(&self, u: &[f64]) -> f64 {
        let n = self.grid.n;
        let h = self.grid.h();
        let e = self.extend(u);
        (0..=n)
            .into_par_iter()
            .map(|cj| {
                let mut acc = 0.0;
                for ci in 0..=n {
                    let k = &self.k[cj * (n + 1) + ci];
                    let (d, mk) = self.corner_diffs(&e, ci, cj);
                    let xb = 0.5 * (d[0] + d[1]);
                    let yb = 0.5 * (d[2] + d[3]);
                    acc += 0.5 * k[0] * (mk[0] * d[0] * d[0] + mk[1] * d[1] * d[1])
                        + 0.5 * k[2] * (mk[2] * d[2] * d[2] + mk[3] * d[3] * d[3])
                        + 2.0 * k[1] * xb * yb;
                }
                acc
            })
            .sum::<f64>()
            * h
            * h
    }

    /// `Σ_corners ½(dx₁² + dx₂² + dy₁² + dy₂²) h²` with the same face masks.
    pub fn gradient_norm_sq(&self, u: &[f64]) -> f64 {
        let n = self.grid.n;
        let h = self.grid.h();
        let e = self.extend(u);
        let mut acc = 0.0;
        for cj in 0..=n {
            for ci in 0..=n {
                let (d, mk) = self.corner_diffs(&e, ci, cj);
                acc += 0.5 * (0..4).map(|q| mk[q] * d[q] * d[q]).sum::<f64>();
            }
        }
        acc * h * h
    }

    /// `out = A u`.
    pub fn apply_into(&self, u: &[f64], out: &mut [f64]) {
        let n = self.grid.n;
        let m = n + 2;
        let h = self.grid.h();
        let e = self.extend(u);
        // ∂a_c/∂(dx₁, dx₂, dy₁, dy₂) per corner
        let mut g = vec![[0.0; 4]; (n + 1) * (n + 1)];
        g.par_chunks_mut(n + 1).enumerate().for_each(|(cj, row)| {
            for (ci, gc) in row.iter_mut().enumerate() {
                let k = &self.k[cj * (n + 1) + ci];
                let (d, mk) = self.corner_diffs(&e, ci, cj);
                let xb = 0.5 * (d[0] + d[1]);
                let yb = 0.5 * (d[2] + d[3]);
                *gc = [
                    k[0] * mk[0] * d[0] + k[1] * yb,
                    k[0] * mk[1] * d[1] + k[1] * yb,
                    k[2] * mk[2] * d[2] + k[1] * xb,
                    k[2] * mk[3] * d[3] + k[1] * xb,
                ];
            }
        });
        // ∂E/∂(extended cell) = ½h Σ ±g
        let corner = |i: isize, j: isize| -> [f64; 4] {
            if i < 0 || j < 0 || i > n as isize || j > n as isize {
                [0.0; 4]
            } else {
                g[j as usize * (n + 1) + i as usize]
            }
        };
        let mut ge = vec![0.0; m * m];
        ge.par_chunks_mut(m).enumerate().for_each(|(q, row)| {
            let q = q as isize;
            for (p, v) in row.iter_mut().enumerate() {
                let p = p as isize;
                let ga = corner(p, q);
                let gb = corner(p - 1, q);
                let gc = corner(p, q - 1);
                let gd = corner(p - 1, q - 1);
                *v = 0.5
                    * h
                    * ((-ga[0] - ga[2]) + (gb[0] - gb[3]) + (-gc[1] + gc[2]) + (gd[1] + gd[3]));
            }
        });
        // fold the ghost layer back onto the cells it mirrors
        let mut fold = |i: usize, j: usize, p: usize, q: usize, s: f64| {
            ge[(j + 1) * m + i + 1] += s * ge[q * m + p];
        };
        for j in 0..n {
            fold(0, j, 0, j + 1, -1.0);
            fold(n - 1, j, n + 1, j + 1, -1.0);
        }
        for i in 0..n {
            fold(i, 0, i + 1, 0, -1.0);
            fold(i, n - 1, i + 1, n + 1, -1.0);
        }
        fold(0, 0, 0, 0, 1.0);
        fold(n - 1, 0, n + 1, 0, 1.0);
        fold(0, n - 1, 0, n + 1, 1.0);
        fold(n - 1, n - 1, n + 1, n + 1, 1.0);
        let inv_h2 = 1.0 / (h * h);
        out.par_chunks_mut(n).enumerate().for_each(|(j, row)| {
            for (i, o) in row.iter_mut().enumerate() {
                *o = -ge[(j + 1) * m + i + 1] * inv_h2 / self.w[j * n + i];
            }
        });
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; u.len()];
        self.apply_into(u, &mut out);
        out
    }

    /// `⟨a, b⟩_w = Σ w a b h²`.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        let h = self.grid.h();
        self.w
            .iter()
            .zip(a.iter().zip(b))
            .map(|(w, (x, y))| w * x * y)
            .sum::<f64>()
            * h
            * h
    }
}

/// Source term `f(t, x, y)`.
pub type Forcing<'a> = &'a (dyn Fn(f64, f64, f64) -> f64 + Sync);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergySample {
    pub t: f64,
    pub energy: f64,
    pub leapfrog_energy: f64,
}

#[derive(Debug, Clone)]
pub struct WaveState {
    u: Vec<f64>,
    v: Vec<f64>,
    t: f64,
    au: Option<Vec<f64>>,
    trace: Vec<EnergySample>,
}

impl WaveState {
    pub fn new(grid: &Grid2D, u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if u.len() != grid.len() || v.len() != grid.len() {
            return Err(Error::Invalid(format!(
                "state arrays of length {} and {} do not match the {}x{} grid",
                u.len(),
                v.len(),
                grid.n,
                grid.n
            )));
        }
        if !u.iter().chain(&v).all(|x| x.is_finite()) {
            return Err(Error::Invalid("non-finite initial data".into()));
        }
        Ok(Self {
            u,
            v,
            t: 0.0,
            au: None,
            trace: Vec::new(),
        })
    }

    pub fn zero(grid: &Grid2D) -> Self {
        Self::new(grid, vec![0.0; grid.len()], vec![0.0; grid.len()]).expect("shapes match")
    }

    pub fn from_data(grid: &Grid2D, data: &InitialData) -> Result<Self> {
        Self::new(grid, data.displacement(grid), data.velocity(grid))
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn trace(&self) -> &[EnergySample] {
        &self.trace
    }

    fn acceleration(&mut self, op: &SpatialOperator) -> &[f64] {
        if self.au.is_none() {
            self.au = Some(op.apply(&self.u));
        }
        self.au.as_deref().unwrap()
    }

    /// `Σ w v² h² + ⟨u, −A u⟩_w`.
    pub fn energy(&self, op: &SpatialOperator) -> f64 {
        op.inner(&self.v, &self.v) + op.bilinear(&self.u)
    }

    /// Quantity conserved exactly by the velocity Verlet step when `f = 0`:
    /// `|v|²_w + ⟨u, −A u⟩_w − (dt²/4)|A u|²_w`.
    pub fn leapfrog_energy(&mut self, op: &SpatialOperator, dt: f64) -> f64 {
        let pot = op.bilinear(&self.u);
        let kin = op.inner(&self.v, &self.v);
        let au = self.acceleration(op).to_vec();
        kin + pot - 0.25 * dt * dt * op.inner(&au, &au)
    }

    pub fn record(&mut self, op: &SpatialOperator, dt: f64) {
        let energy = self.energy(op);
        let leapfrog_energy = self.leapfrog_energy(op, dt);
        self.trace.push(EnergySample {
            t: self.t,
            energy,
            leapfrog_energy,
        });
    }

    /// One velocity Verlet step of `u_tt = A u − f`; `dt` may be negative.
    pub fn step(
        &mut self,
        op: &SpatialOperator,
        dt: f64,
        forcing: Option<Forcing<'_>>,
    ) -> Result<()> {
        let limit = op.max_dt(DEFAULT_CFL);
        if !(dt.abs() <= limit * (1.0 + 1e-12)) || dt == 0.0 {
            return Err(Error::Precondition(format!(
                "time step {dt} violates the CFL limit {limit}"
            )));
        }
        let grid = *op.grid();
        let sample_f = |t: f64| forcing.map(|f| grid.sample(|x, y| f(t, x, y)));
        let f0 = sample_f(self.t);
        let half = 0.5 * dt;
        let au = self.acceleration(op).to_vec();
        for (k, v) in self.v.iter_mut().enumerate() {
            *v += half * (au[k] - f0.as_ref().map_or(0.0, |f| f[k]));
        }
        for (u, v) in self.u.iter_mut().zip(&self.v) {
            *u += dt * v;
        }
        let mut au1 = vec![0.0; self.u.len()];
        op.apply_into(&self.u, &mut au1);
        let f1 = sample_f(self.t + dt);
        for (k, v) in self.v.iter_mut().enumerate() {
            *v += half * (au1[k] - f1.as_ref().map_or(0.0, |f| f[k]));
        }
        self.au = Some(au1);
        self.t += dt;
        Ok(())
    }

    /// `steps` steps of size `dt`, recording energies every `record_every`
    /// steps (0 disables recording).
    pub fn run(
        &mut self,
        op: &SpatialOperator,
        dt: f64,
        steps: usize,
        forcing: Option<Forcing<'_>>,
        record_every: usize,
    ) -> Result<()> {
        if record_every > 0 && self.trace.is_empty() {
            self.record(op, dt);
        }
        for k in 0..steps {
            self.step(op, dt, forcing)?;
            if record_every > 0 && (k + 1) % record_every == 0 {
                self.record(op, dt);
            }
        }
        Ok(())
    }

    /// `max |u|` over cells farther than `radius` from `center`.
    pub fn max_outside(&self, grid: &Grid2D, center: [f64; 2], radius: f64) -> f64 {
        let mut m: f64 = 0.0;
        for j in 0..grid.n {
            for i in 0..grid.n {
                let (x, y) = (grid.center(i) - center[0], grid.center(j) - center[1]);
                if x.hypot(y) > radius {
                    m = m.max(self.u[grid.idx(i, j)].abs());
                }
            }
        }
        m
    }
}

/// Initial displacement with zero initial velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    /// `A exp(1 − 1/(1 − |x − c|²/r²))` inside the ball, 0 outside.
    Bump {
        center: [f64; 2],
        radius: f64,
        amplitude: f64,
    },
    /// `max(0, 1 − |x − c|/r)`, an `H¹` but not `H²` profile.
    Hat { center: [f64; 2], radius: f64 },
    /// Characteristic function of the ball.
    Indicator { center: [f64; 2], radius: f64 },
    /// Standing Dirichlet mode `sin(kx(x + L)) sin(ky(y + L))`, `k = mπ/(2L)`.
    Mode { mx: u32, my: u32 },
}

impl InitialData {
    pub fn displacement(&self, grid: &Grid2D) -> Vec<f64> {
        let l = grid.half_width;
        match *self {
            InitialData::Bump {
                center,
                radius,
                amplitude,
            } => grid.sample(|x, y| {
                let q = ((x - center[0]).powi(2) + (y - center[1]).powi(2)) / (radius * radius);
                if q < 1.0 {
                    amplitude * (1.0 - 1.0 / (1.0 - q)).exp()
                } else {
                    0.0
                }
            }),
            InitialData::Hat { center, radius } => {
                grid.sample(|x, y| (1.0 - (x - center[0]).hypot(y - center[1]) / radius).max(0.0))
            }
            InitialData::Indicator { center, radius } => grid.sample(|x, y| {
                if (x - center[0]).hypot(y - center[1]) < radius {
                    1.0
                } else {
                    0.0
                }
            }),
            InitialData::Mode { mx, my } => {
                let (kx, ky) = mode_wavenumbers(mx, my, l);
                grid.sample(|x, y| (kx * (x + l)).sin() * (ky * (y + l)).sin())
            }
        }
    }

    pub fn velocity(&self, grid: &Grid2D) -> Vec<f64> {
        vec![0.0; grid.len()]
    }

    /// Center and radius of the support, when compact.
    pub fn support(&self) -> Option<([f64; 2], f64)> {
        match *self {
            InitialData::Bump { center, radius, .. }
            | InitialData::Hat { center, radius }
            | InitialData::Indicator { center, radius } => Some((center, radius)),
            InitialData::Mode { .. } => None,
        }
    }
}

pub fn mode_wavenumbers(mx: u32, my: u32, half_width: f64) -> (f64, f64) {
    let k = std::f64::consts::PI / (2.0 * half_width);
    (mx as f64 * k, my as f64 * k)
}

/// Exact flat-space standing mode at time `t`.
pub fn mode_solution(grid: &Grid2D, mx: u32, my: u32, t: f64) -> Vec<f64> {
    let l = grid.half_width;
    let (kx, ky) = mode_wavenumbers(mx, my, l);
    let c = (kx.hypot(ky) * t).cos();
    grid.sample(|x, y| (kx * (x + l)).sin() * (ky * (y + l)).sin() * c)
}

/// Step count and size reaching `t_final` exactly under the CFL limit.
pub fn time_grid(t_final: f64, dt_max: f64) -> (usize, f64) {
    let steps = (t_final / dt_max).ceil().max(1.0) as usize;
    (steps, t_final / steps as f64)
}

/// Solves from `data` to `t_final` and returns the final state.
pub fn solve(
    op: &SpatialOperator,
    data: &InitialData,
    t_final: f64,
    dt: f64,
    record_every: usize,
) -> Result<WaveState> {
    let grid = *op.grid();
    let mut st = WaveState::from_data(&grid, data)?;
    let steps = (t_final / dt).round() as usize;
    st.run(op, dt, steps, None, record_every)?;
    Ok(st)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub dt: f64,
    pub steps: usize,
    pub l2_error: f64,
    /// `log₂(e_{previous}/e)`, absent for the coarsest grid.
    pub order: Option<f64>,
}

/// Flat-space grid refinement study against the standing-mode oracle.
pub fn flat_convergence(
    sizes: &[usize],
    half_width: f64,
    mode: (u32, u32),
    t_final: f64,
) -> Result<Vec<ConvergenceRow>> {
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for &n in sizes {
        let grid = Grid2D::new(n, half_width)?;
        let op = SpatialOperator::from_planar_metric(&grid, |_, _| Ok([1.0, 0.0, 1.0]))?;
        let (steps, dt) = time_grid(t_final, op.max_dt(DEFAULT_CFL));
        let data = InitialData::Mode {
            mx: mode.0,
            my: mode.1,
        };
        let mut st = WaveState::from_data(&grid, &data)?;
        st.run(&op, dt, steps, None, 0)?;
        let exact = mode_solution(&grid, mode.0, mode.1, st.t());
        let err = grid.l2_distance(st.u(), &exact);
        let order = rows.last().map(|r| (r.l2_error / err).log2());
        rows.push(ConvergenceRow {
            n,
            h: grid.h(),
            dt,
            steps,
            l2_error: err,
            order,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonStudy {
    pub eps: Vec<f64>,
    pub dt: f64,
    pub steps: usize,
    /// `‖u_{ε_k}(T) − u_{ε_{k+1}}(T)‖_{L²}`.
    pub distances: Vec<f64>,
    pub strictly_decreasing: bool,
    pub solution_norms: Vec<f64>,
}

/// Solves the same problem for every `ε` (in parallel, with a common step)
/// and compares consecutive final states.
pub fn epsilon_study(
    field: &RegularizedField,
    eps: &[f64],
    grid: &Grid2D,
    data: &InitialData,
    t_final: f64,
) -> Result<EpsilonStudy> {
    if eps.len() < 2 {
        return Err(Error::Invalid(
            "an eps study needs at least two values".into(),
        ));
    }
    let ops: Vec<SpatialOperator> = eps
        .iter()
        .map(|&e| {
            SpatialOperator::assemble(field, e, grid)
                .map_err(|err| Error::Numerical(format!("eps = {e}: {err}")))
        })
        .collect::<Result<_>>()?;
    let dt_max = ops
        .iter()
        .map(|op| op.max_dt(DEFAULT_CFL))
        .fold(f64::INFINITY, f64::min);
    let (steps, dt) = time_grid(t_final, dt_max);
    let finals: Vec<Vec<f64>> = ops
        .par_iter()
        .zip(eps.par_iter())
        .map(|(op, &e)| {
            let mut st = WaveState::from_data(grid, data)?;
            st.run(op, dt, steps, None, 0)
                .map_err(|err| Error::Numerical(format!("eps = {e}: {err}")))?;
            Ok(st.u)
        })
        .collect::<Result<_>>()?;
    let distances: Vec<f64> = finals
        .windows(2)
        .map(|w| grid.l2_distance(&w[0], &w[1]))
        .collect();
    let strictly_decreasing = distances.windows(2).all(|w| w[1] < w[0]);
    Ok(EpsilonStudy {
        eps: eps.to_vec(),
        dt,
        steps,
        strictly_decreasing,
        solution_norms: finals.iter().map(|u| grid.l2_norm(u)).collect(),
        distances,
    })
}
