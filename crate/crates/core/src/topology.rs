//! Curves on `[0, 1]`, the uniform-convergence metric, classes modulo
//! reparametrization with arclength-proportional representatives, and
//! compactness of Lipschitz families.
//!
//! Distances are Euclidean in `R⁴`.

use serde::{Deserialize, Serialize};

use crate::causality::{
    curve_causal_profile, unit_speed_reparam, CausalProfile, Euclidean, RiemannMetric,
};
use crate::curve::{dist, norm, sub, Interpolation, SampledCurve, Vec4};
use crate::metric::MetricField;
use crate::{Error, Result};

const DOMAIN_TOL: f64 = 1e-12;

/// A sampled curve parametrized on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamCurve01 {
    curve: SampledCurve,
}

impl ParamCurve01 {
    pub fn new(curve: SampledCurve) -> Result<Self> {
        let (a, b) = curve.domain();
        if a.abs() > DOMAIN_TOL || (b - 1.0).abs() > DOMAIN_TOL {
            return Err(Error::Invalid(format!(
                "parameter domain must be [0, 1], got [{a}, {b}]"
            )));
        }
        Ok(Self { curve })
    }

    /// Affine change of parameter from the curve's domain onto `[0, 1]`.
    pub fn rescaled(curve: &SampledCurve) -> Result<Self> {
        let (a, b) = curve.domain();
        let len = b - a;
        let params: Vec<f64> = curve
            .params()
            .iter()
            .enumerate()
            .map(|(i, s)| {
                if i + 1 == curve.len() {
                    1.0
                } else {
                    (s - a) / len
                }
            })
            .collect();
        let tangents = curve
            .tangents()
            .iter()
            .map(|v| v.map(|c| c * len))
            .collect();
        Self::new(SampledCurve::with_interpolation(
            params,
            curve.points().to_vec(),
            tangents,
            curve.interpolation(),
        )?)
    }

    pub fn curve(&self) -> &SampledCurve {
        &self.curve
    }

    pub fn start(&self) -> Vec4 {
        self.curve.start()
    }

    pub fn end(&self) -> Vec4 {
        self.curve.end()
    }

    pub fn eval(&self, s: f64) -> Vec4 {
        self.curve.eval(s)
    }

    /// Euclidean speed at every node.
    pub fn speeds(&self) -> Vec<f64> {
        self.curve.tangents().iter().map(norm).collect()
    }

    /// `max/min` of the node speeds.
    pub fn speed_ratio(&self) -> f64 {
        let s = self.speeds();
        let (lo, hi) = s
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        hi / lo
    }
}

/// `sup_s |a(s) − b(s)|` evaluated at the nodes of both curves.
pub fn uniform_distance(a: &ParamCurve01, b: &ParamCurve01) -> f64 {
    let one = |x: &ParamCurve01, y: &ParamCurve01| {
        x.curve
            .params()
            .iter()
            .zip(x.curve.points())
            .map(|(&s, p)| dist(p, &y.eval(s)))
            .fold(0.0, f64::max)
    };
    one(a, b).max(one(b, a))
}

/// The representative on `[0, 1]` with constant speed equal to the length.
///
/// Polylines keep their vertices; smooth curves are resampled on nodes
/// equispaced in arclength.
pub fn proportional_reparam(
    curve: &SampledCurve,
    metric: &impl RiemannMetric,
) -> Result<ParamCurve01> {
    let unit = unit_speed_reparam(curve, metric)?;
    let (a, b) = unit.domain();
    let l = b - a;
    if !(l > 0.0) {
        return Err(Error::Domain("curve has zero length".into()));
    }
    let params: Vec<f64> = unit
        .params()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if i + 1 == unit.len() {
                1.0
            } else {
                (s - a) / l
            }
        })
        .collect();
    let tangents = unit.tangents().iter().map(|v| v.map(|c| c * l)).collect();
    ParamCurve01::new(SampledCurve::with_interpolation(
        params,
        unit.points().to_vec(),
        tangents,
        unit.interpolation(),
    )?)
}

/// The same nodes under the parameter change `s ↦ w(s)`, `w` increasing.
///
/// Exact for polylines; Hermite curves agree at the nodes.
pub fn warp_parameters(
    curve: &SampledCurve,
    w: impl Fn(f64) -> f64,
    dw: impl Fn(f64) -> f64,
) -> Result<SampledCurve> {
    let params: Vec<f64> = curve.params().iter().map(|&s| w(s)).collect();
    if curve.interpolation() == Interpolation::Linear {
        return SampledCurve::polyline(params, curve.points().to_vec());
    }
    let tangents = curve
        .params()
        .iter()
        .zip(curve.tangents())
        .map(|(&s, v)| v.map(|c| c / dw(s)))
        .collect();
    SampledCurve::with_interpolation(
        params,
        curve.points().to_vec(),
        tangents,
        curve.interpolation(),
    )
}

/// Axis-aligned compact box in `R⁴`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box4 {
    pub lo: Vec4,
    pub hi: Vec4,
}

impl Box4 {
    pub fn new(lo: Vec4, hi: Vec4) -> Result<Self> {
        if (0..4).any(|i| !(lo[i] <= hi[i])) {
            return Err(Error::Invalid(format!("empty box {lo:?}..{hi:?}")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, p: &Vec4) -> bool {
        (0..4).all(|i| p[i] >= self.lo[i] && p[i] <= self.hi[i])
    }

    pub fn time_extent(&self) -> f64 {
        self.hi[0] - self.lo[0]
    }

    pub fn diameter(&self) -> f64 {
        dist(&self.lo, &self.hi)
    }
}

fn check_in_box(c: &ParamCurve01, bx: &Box4) -> Result<()> {
    if let Some(p) = c.curve.points().iter().find(|p| !bx.contains(p)) {
        return Err(Error::Precondition(format!(
            "curve leaves the box at {p:?}"
        )));
    }
    Ok(())
}

/// Largest node speed, the empirical Lipschitz constant of `c`.
pub fn lipschitz_bound(c: &ParamCurve01, bx: &Box4) -> Result<f64> {
    check_in_box(c, bx)?;
    Ok(c.speeds().into_iter().fold(0.0, f64::max))
}

/// Lipschitz constant for arclength-proportional causal curves in `bx` when
/// the spatial metric dominates `c²` times the Euclidean one: `‖γ̇₁‖ ≤ |γ̇₀|/c`
/// and `γ₀` is monotone, so the length is at most `√(1 + 1/c²)` times the
/// time extent.
pub fn causal_lipschitz_bound(spatial_coeff: f64, bx: &Box4) -> f64 {
    (1.0 + 1.0 / (spatial_coeff * spatial_coeff)).sqrt() * bx.time_extent()
}

/// `max d(γ(s₁), γ(s₂))/|s₁ − s₂|` over all pairs of `m` equispaced parameters.
pub fn equicontinuity_modulus(c: &ParamCurve01, m: usize) -> f64 {
    let m = m.max(2);
    let pts: Vec<(f64, Vec4)> = (0..m)
        .map(|i| {
            let s = i as f64 / (m - 1) as f64;
            (s, c.eval(s))
        })
        .collect();
    let mut best: f64 = 0.0;
    for i in 0..m {
        for j in i + 1..m {
            best = best.max(dist(&pts[i].1, &pts[j].1) / (pts[j].0 - pts[i].0));
        }
    }
    best
}

/// A curve modulo increasing `C¹` reparametrization, stored through its
/// arclength-proportional representative.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveClass {
    canonical: ParamCurve01,
    length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub length: f64,
    pub start: Vec4,
    pub end: Vec4,
    pub params: Vec<f64>,
    pub nodes: Vec<Vec4>,
}

impl CurveClass {
    pub fn canonical(&self) -> &ParamCurve01 {
        &self.canonical
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn report(&self) -> ClassReport {
        ClassReport {
            length: self.length,
            start: self.canonical.start(),
            end: self.canonical.end(),
            params: self.canonical.curve.params().to_vec(),
            nodes: self.canonical.curve.points().to_vec(),
        }
    }
}

/// `Γ`: a parametrized curve to its class.
pub fn gamma_map(c: &ParamCurve01) -> Result<CurveClass> {
    let canonical = proportional_reparam(c.curve(), &Euclidean)?;
    let length = canonical.speeds().iter().sum::<f64>() / canonical.curve.len() as f64;
    Ok(CurveClass { canonical, length })
}

fn point_segment_distance(p: &Vec4, a: &Vec4, b: &Vec4) -> (f64, f64) {
    let ab = sub(b, a);
    let ap = sub(p, a);
    let l2: f64 = ab.iter().map(|c| c * c).sum();
    let t = if l2 == 0.0 {
        0.0
    } else {
        (ap.iter().zip(&ab).map(|(x, y)| x * y).sum::<f64>() / l2).clamp(0.0, 1.0)
    };
    let q = std::array::from_fn(|i| a[i] + t * ab[i]);
    (dist(p, &q), t)
}

/// Distance from `p` to the image of `c`.
pub fn distance_to_image(p: &Vec4, c: &SampledCurve) -> f64 {
    let pts = c.points();
    let (mut best, mut k_best) = (f64::INFINITY, 0);
    for k in 0..pts.len() - 1 {
        let (d, _) = point_segment_distance(p, &pts[k], &pts[k + 1]);
        if d < best {
            best = d;
            k_best = k;
        }
    }
    if c.interpolation() == Interpolation::Linear {
        return best;
    }
    // refine on the interpolant around the closest chord
    let s = c.params();
    let lo = s[k_best.saturating_sub(1)];
    let hi = s[(k_best + 2).min(s.len() - 1)];
    let f = |t: f64| dist(p, &c.eval(t));
    let (mut a, mut b) = (lo, hi);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (b - g * (b - a), a + g * (b - a));
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..120 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
        if b - a < 1e-14 * (hi - lo) {
            break;
        }
    }
    best.min(f1).min(f2)
}

/// `max` over the nodes of `a` of the distance to the image of `b`.
pub fn directed_image_distance(a: &CurveClass, b: &CurveClass) -> f64 {
    a.canonical
        .curve
        .points()
        .iter()
        .map(|p| distance_to_image(p, &b.canonical.curve))
        .fold(0.0, f64::max)
}

/// Image of `a` contained in the image of `b` up to `tol`; both classes must
/// share their endpoints.
pub fn image_subset_check(a: &CurveClass, b: &CurveClass, tol: f64) -> Result<bool> {
    let ends = dist(&a.canonical.start(), &b.canonical.start())
        .max(dist(&a.canonical.end(), &b.canonical.end()));
    if ends > tol {
        return Err(Error::Precondition(format!(
            "classes do not share endpoints (mismatch {ends})"
        )));
    }
    Ok(directed_image_distance(a, b) <= tol)
}

/// Equal canonical representatives within `tol`.
pub fn same_class(a: &CurveClass, b: &CurveClass, tol: f64) -> bool {
    uniform_distance(&a.canonical, &b.canonical) <= tol
}

/// Image of `a` inside the `δ`-tube around the image of `b`.
pub fn within_tube(a: &CurveClass, b: &CurveClass, delta: f64) -> bool {
    directed_image_distance(a, b) <= delta
}

/// Open sets `U` for the neighborhoods `O(U)` of classes with image in `U`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum OpenSet {
    Box { lo: Vec4, hi: Vec4 },
    Ball { center: Vec4, radius: f64 },
}

impl OpenSet {
    pub fn contains(&self, p: &Vec4) -> bool {
        match self {
            OpenSet::Box { lo, hi } => (0..4).all(|i| p[i] > lo[i] && p[i] < hi[i]),
            OpenSet::Ball { center, radius } => dist(p, center) < *radius,
        }
    }

    /// Membership of the class in `O(U)`.
    pub fn contains_class(&self, c: &CurveClass) -> bool {
        c.canonical.curve.points().iter().all(|p| self.contains(p))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    /// Indices of the extracted subsequence, increasing.
    pub indices: Vec<usize>,
    /// Node-wise mean of the last quarter of the subsequence, as a polyline.
    pub limit: ParamCurve01,
    /// Dense parameters used for the diagonal selection.
    pub dense_points: Vec<f64>,
    /// Largest uniform distance from a tail member to the limit.
    pub tail_spread: f64,
    pub lipschitz: f64,
}

fn dyadic_points(depth: u32) -> Vec<(f64, u32)> {
    let mut pts = vec![(0.0, 0), (1.0, 0)];
    for level in 1..=depth {
        let den = 2u64.pow(level);
        for num in (1..den).step_by(2) {
            pts.push((num as f64 / den as f64, level));
        }
    }
    pts
}

/// Diagonal selection of a uniformly convergent subsequence.
///
/// At every dyadic parameter the surviving curves are restricted to the
/// largest cluster of radius `diam(box)·2^{-level}`; the selection stops
/// before fewer than `min_keep` curves would remain.
pub fn arzela_ascoli_extract(
    family: &[ParamCurve01],
    bx: &Box4,
    lipschitz_cap: f64,
    depth: u32,
    min_keep: usize,
) -> Result<Extraction> {
    if family.is_empty() {
        return Err(Error::Invalid("empty family".into()));
    }
    let mut lip: f64 = 0.0;
    for (i, c) in family.iter().enumerate() {
        check_in_box(c, bx).map_err(|e| Error::Precondition(format!("member {i}: {e}")))?;
        lip = lip.max(lipschitz_bound(c, bx)?);
    }
    if !(lip.is_finite() && lip <= lipschitz_cap) {
        return Err(Error::Precondition(format!(
            "family Lipschitz constant {lip} exceeds the cap {lipschitz_cap}"
        )));
    }
    let diam = bx.diameter().max(f64::MIN_POSITIVE);
    let dense = dyadic_points(depth);
    let mut alive: Vec<usize> = (0..family.len()).collect();
    for &(d, level) in &dense {
        let r = diam * 2f64.powi(-(level as i32) - 1);
        let vals: Vec<Vec4> = alive.iter().map(|&i| family[i].eval(d)).collect();
        let mut best: Option<Vec<usize>> = None;
        // later centers win ties so the tail is preferred
        for c in (0..vals.len()).rev() {
            let members: Vec<usize> = (0..vals.len())
                .filter(|&j| dist(&vals[j], &vals[c]) <= r)
                .collect();
            if best.as_ref().is_none_or(|b| members.len() > b.len()) {
                best = Some(members);
            }
        }
        let chosen = best.unwrap_or_default();
        if chosen.len() < min_keep.max(1) {
            break;
        }
        alive = chosen.into_iter().map(|j| alive[j]).collect();
    }
    let tail_len = alive.len().div_ceil(4).max(1);
    let tail = &alive[alive.len() - tail_len..];
    let grid = family[tail[0]].curve.params().to_vec();
    let nodes: Vec<Vec4> = grid
        .iter()
        .map(|&s| {
            let mut acc = [0.0; 4];
            for &i in tail {
                let p = family[i].eval(s);
                for c in 0..4 {
                    acc[c] += p[c];
                }
            }
            acc.map(|c| c / tail.len() as f64)
        })
        .collect();
    let limit = ParamCurve01::new(SampledCurve::polyline(grid, nodes)?)?;
    let tail_spread = tail
        .iter()
        .map(|&i| uniform_distance(&family[i], &limit))
        .fold(0.0, f64::max);
    Ok(Extraction {
        indices: alive,
        limit,
        dense_points: dense.into_iter().map(|p| p.0).collect(),
        tail_spread,
        lipschitz: lip,
    })
}

/// Causal classification of a limit curve; secant tangents are used for
/// polylines.
pub fn limit_causality(
    limit: &ParamCurve01,
    field: &(impl MetricField + ?Sized),
) -> Result<CausalProfile> {
    let c = limit.curve();
    if c.interpolation() == Interpolation::Linear {
        // midpoints of segments carry the secant direction
        let mids: Vec<f64> = c.params().windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let pts: Vec<Vec4> = mids.iter().map(|&s| c.eval(s)).collect();
        let tans: Vec<Vec4> = mids.iter().map(|&s| c.eval_tangent(s)).collect();
        if mids.len() >= 2 {
            let probe = SampledCurve::new(mids, pts, tans)?;
            return curve_causal_profile(&probe, field);
        }
    }
    curve_causal_profile(c, field)
}

/// `γ_n(s) = p + s(q − p) + (1/n) sin(nπs) ν` for `n = 1..=count`, sampled
/// on `nodes` equispaced parameters.
pub fn oscillation_family(
    p: Vec4,
    q: Vec4,
    normal: Vec4,
    count: usize,
    nodes: usize,
) -> Result<Vec<ParamCurve01>> {
    let pi = std::f64::consts::PI;
    (1..=count)
        .map(|n| {
            let nf = n as f64;
            let c = SampledCurve::from_fn(
                0.0,
                1.0,
                nodes,
                |s| {
                    let w = (nf * pi * s).sin() / nf;
                    std::array::from_fn(|i| p[i] + s * (q[i] - p[i]) + w * normal[i])
                },
                |s| {
                    let w = pi * (nf * pi * s).cos();
                    std::array::from_fn(|i| q[i] - p[i] + w * normal[i])
                },
            )?;
            ParamCurve01::new(SampledCurve::polyline(
                c.params().to_vec(),
                c.points().to_vec(),
            )?)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::ConicalParams;

    fn segment(p: Vec4, q: Vec4, n: usize, warp: impl Fn(f64) -> f64) -> SampledCurve {
        let params: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let pts = params
            .iter()
            .map(|&s| {
                let u = warp(s);
                std::array::from_fn(|i| p[i] + u * (q[i] - p[i]))
            })
            .collect();
        SampledCurve::polyline(params, pts).unwrap()
    }

    #[test]
    fn uniform_distance_examples() {
        let p = [0.0, 0.0, 0.0, 0.0];
        let q = [1.0, 0.5, 0.0, 0.0];
        let a = ParamCurve01::new(segment(p, q, 11, |s| s)).unwrap();
        assert_eq!(uniform_distance(&a, &a), 0.0);
        let b = ParamCurve01::new(segment(
            [0.0, 0.0, 0.25, 0.0],
            [1.0, 0.5, 0.25, 0.0],
            11,
            |s| s,
        ))
        .unwrap();
        assert!((uniform_distance(&a, &b) - 0.25).abs() < 1e-15);
        let c = ParamCurve01::new(segment(p, q, 11, |s| s * s)).unwrap();
        assert!(uniform_distance(&a, &c) > 0.1);
    }

    #[test]
    fn proportional_reparam_of_segment() {
        let p = [0.0, 1.0, 2.0, 0.0];
        let q = [3.0, 1.0, 6.0, 0.0];
        let c = segment(p, q, 17, |s| s * s);
        let r = proportional_reparam(&c, &Euclidean).unwrap();
        for v in r.speeds() {
            assert!((v - 5.0).abs() < 1e-12);
        }
        assert!((r.eval(0.5)[2] - 4.0).abs() < 1e-12);
        let rr = proportional_reparam(r.curve(), &Euclidean).unwrap();
        assert!(uniform_distance(&r, &rr) < 1e-12);
        let other = proportional_reparam(&segment(p, q, 17, |s| s.sqrt()), &Euclidean).unwrap();
        let c1 = gamma_map(&r).unwrap();
        let c2 = gamma_map(&other).unwrap();
        assert!((c1.length() - 5.0).abs() < 1e-12);
        assert!(image_subset_check(&c1, &c2, 1e-8).unwrap());
        assert!(image_subset_check(&c2, &c1, 1e-8).unwrap());
    }

    #[test]
    fn zero_length_is_rejected() {
        let c = SampledCurve::polyline(vec![0.0, 1.0], vec![[1.0; 4], [1.0; 4]]);
        // a degenerate polyline already fails regularity
        assert!(c.is_err());
    }

    #[test]
    fn smooth_canonicality() {
        let pos = |u: f64| [u, 0.3 * (2.0 * u).sin(), 0.2 * u * u, 0.1 * u];
        let vel = |u: f64| [1.0, 0.6 * (2.0 * u).cos(), 0.4 * u, 0.1];
        let a = SampledCurve::from_fn(0.0, 1.0, 2001, pos, vel).unwrap();
        let warp = |s: f64| 0.5 * s + 0.5 * s * s;
        let b = SampledCurve::from_fn(
            0.0,
            1.0,
            2001,
            |s| pos(warp(s)),
            |s| vel(warp(s)).map(|c| c * (0.5 + s)),
        )
        .unwrap();
        let ra = proportional_reparam(&a, &Euclidean).unwrap();
        let rb = proportional_reparam(&b, &Euclidean).unwrap();
        assert!(uniform_distance(&ra, &rb) < 1e-8);
        assert!((ra.speed_ratio() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn subset_requires_shared_endpoints() {
        let p = [0.0; 4];
        let q = [1.0, 1.0, 0.0, 0.0];
        let full = gamma_map(&ParamCurve01::new(segment(p, q, 5, |s| s)).unwrap()).unwrap();
        let half =
            gamma_map(&ParamCurve01::new(segment(p, [0.5, 0.5, 0.0, 0.0], 5, |s| s)).unwrap())
                .unwrap();
        assert!(matches!(
            image_subset_check(&half, &full, 1e-8),
            Err(Error::Precondition(_))
        ));
        let bent =
            SampledCurve::polyline(vec![0.0, 0.5, 1.0], vec![p, [0.5, 0.5, 0.2, 0.0], q]).unwrap();
        let bent = gamma_map(&ParamCurve01::new(bent).unwrap()).unwrap();
        assert!(!image_subset_check(&bent, &full, 1e-8).unwrap());
        assert!(!image_subset_check(&full, &bent, 1e-8).unwrap());
    }

    #[test]
    fn lipschitz_and_boxes() {
        let bx = Box4::new([-1.0; 4], [2.0; 4]).unwrap();
        let c = ParamCurve01::new(segment([0.0; 4], [1.0, 0.0, 0.0, 0.0], 5, |s| s)).unwrap();
        assert!((lipschitz_bound(&c, &bx).unwrap() - 1.0).abs() < 1e-15);
        let far = ParamCurve01::new(segment([0.0; 4], [5.0, 0.0, 0.0, 0.0], 5, |s| s)).unwrap();
        assert!(lipschitz_bound(&far, &bx).is_err());
        assert!(equicontinuity_modulus(&c, 20) <= 1.0 + 1e-12);
    }

    #[test]
    fn tubes_and_open_sets() {
        let p = [0.0, 0.5, 0.5, 0.0];
        let q = [1.0, 0.6, 0.5, 0.0];
        let a = gamma_map(&ParamCurve01::new(segment(p, q, 9, |s| s)).unwrap()).unwrap();
        let shifted = segment([0.0, 0.5, 0.51, 0.0], [1.0, 0.6, 0.51, 0.0], 9, |s| s);
        let b = gamma_map(&ParamCurve01::new(shifted).unwrap()).unwrap();
        assert!(within_tube(&b, &a, 0.0101) && !within_tube(&b, &a, 0.009));
        let u = OpenSet::Ball {
            center: [0.5, 0.55, 0.5, 0.0],
            radius: 0.6,
        };
        assert!(u.contains_class(&a));
        assert!(same_class(&a, &gamma_map(a.canonical()).unwrap(), 1e-12));
    }

    #[test]
    fn extraction_examples() {
        let p = [0.0, 0.5, 0.3, 0.0];
        let q = [1.0, 0.6, 0.3, 0.0];
        let bx = Box4::new([-0.1, 0.0, 0.0, -0.1], [1.1, 1.0, 1.0, 0.1]).unwrap();
        let constant: Vec<ParamCurve01> = (0..5)
            .map(|_| ParamCurve01::new(segment(p, q, 9, |s| s)).unwrap())
            .collect();
        let ex = arzela_ascoli_extract(&constant, &bx, 10.0, 4, 2).unwrap();
        assert_eq!(ex.indices, vec![0, 1, 2, 3, 4]);
        assert_eq!(uniform_distance(&ex.limit, &constant[0]), 0.0);

        let fam = oscillation_family(p, q, [0.0, 0.0, 0.25, 0.0], 200, 513).unwrap();
        let ex = arzela_ascoli_extract(&fam, &bx, 10.0, 8, 8).unwrap();
        let seg = ParamCurve01::new(segment(p, q, 513, |s| s)).unwrap();
        assert!(uniform_distance(&ex.limit, &seg) < 0.25 / 100.0);
        let prof = limit_causality(&ex.limit, &ConicalParams::new(0.5).unwrap()).unwrap();
        assert!(prof.is_timelike());

        let escaping: Vec<ParamCurve01> = (0..4)
            .map(|n| {
                ParamCurve01::new(segment(
                    [0.0, n as f64, 0.0, 0.0],
                    [1.0, n as f64, 0.0, 0.0],
                    3,
                    |s| s,
                ))
                .unwrap()
            })
            .collect();
        assert!(matches!(
            arzela_ascoli_extract(&escaping, &bx, 10.0, 4, 2),
            Err(Error::Precondition(_))
        ));
    }
}
