//! Causal character of tangents and sampled curves, Cauchy-slice crossings,
//! arclength, and crossing bounds for ε-families of curves.
//!
//! Time orientation is fixed by the vector field `(1, 0, 0, 0)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{norm, Interpolation, SampledCurve, Vec4};
use crate::metric::{MetricField, SymForm4};
use crate::quadrature::UnitRule;
use crate::regularization::RegularizedField;
use crate::{Error, Result, SpacetimePoint};

/// `|g(v, v)| ≤ NULL_TOL` counts as null.
pub const NULL_TOL: f64 = 1e-12;
const DEGENERATE_TOL: f64 = 1e-14;
const ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorClass {
    Timelike,
    Null,
    Spacelike,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentClass {
    pub class: VectorClass,
    pub value: f64,
    /// `v₀ > 0`; meaningful for timelike and null vectors.
    pub future: bool,
    pub degenerate_metric: bool,
}

pub fn classify_tangent(g: &SymForm4, v: &Vec4) -> TangentClass {
    let value = g.quad(v);
    let class = if value.abs() <= NULL_TOL {
        VectorClass::Null
    } else if value < 0.0 {
        VectorClass::Timelike
    } else {
        VectorClass::Spacelike
    };
    TangentClass {
        class,
        value,
        future: v[0] > 0.0,
        degenerate_metric: g.determinant().abs() < DEGENERATE_TOL,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalClass {
    Timelike,
    Null,
    Spacelike,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalProfile {
    pub class: CausalClass,
    /// `g(γ̇, γ̇)` per node; `None` where the node lies on the axis.
    pub values: Vec<Option<f64>>,
    /// Nodes skipped because the metric is undefined there.
    pub skipped: Vec<usize>,
    /// Every classified tangent is future-directed.
    pub future: bool,
}

impl CausalProfile {
    pub fn is_timelike(&self) -> bool {
        self.class == CausalClass::Timelike
    }

    /// `g(γ̇, γ̇) ≤ tol` at every evaluated node.
    pub fn is_causal_within(&self, tol: f64) -> bool {
        self.values.iter().flatten().all(|&v| v <= tol)
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Classifies every node tangent of `curve`; axis nodes are skipped.
pub fn curve_causal_profile(
    curve: &SampledCurve,
    field: &(impl MetricField + ?Sized),
) -> Result<CausalProfile> {
    let mut values = Vec::with_capacity(curve.len());
    let mut skipped = Vec::new();
    let mut classes = Vec::new();
    let mut future = true;
    for (i, (p, v)) in curve.points().iter().zip(curve.tangents()).enumerate() {
        match field.metric(&SpacetimePoint::from_array(*p)) {
            Ok(g) => {
                let c = classify_tangent(&g, v);
                values.push(Some(c.value));
                classes.push(c.class);
                future &= c.future;
            }
            Err(Error::OnAxis { .. }) => {
                values.push(None);
                skipped.push(i);
            }
            Err(e) => return Err(e),
        }
    }
    if classes.is_empty() {
        return Err(Error::Domain("curve lies entirely on the axis".into()));
    }
    let first = classes[0];
    let class = if classes.iter().all(|&c| c == first) {
        match first {
            VectorClass::Timelike => CausalClass::Timelike,
            VectorClass::Null => CausalClass::Null,
            VectorClass::Spacelike => CausalClass::Spacelike,
        }
    } else {
        CausalClass::Mixed
    };
    Ok(CausalProfile {
        class,
        values,
        skipped,
        future,
    })
}

/// Fritsch–Carlson limited slopes; the Hermite interpolant through
/// monotone data with these slopes is monotone.
fn monotone_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let delta: Vec<f64> = (0..n - 1)
        .map(|k| (y[k + 1] - y[k]) / (x[k + 1] - x[k]))
        .collect();
    let mut m = vec![0.0; n];
    m[0] = delta[0];
    m[n - 1] = delta[n - 2];
    for k in 1..n - 1 {
        m[k] = if delta[k - 1] * delta[k] <= 0.0 {
            0.0
        } else {
            0.5 * (delta[k - 1] + delta[k])
        };
    }
    for k in 0..n - 1 {
        if delta[k] == 0.0 {
            m[k] = 0.0;
            m[k + 1] = 0.0;
            continue;
        }
        let a = m[k] / delta[k];
        let b = m[k + 1] / delta[k];
        let s = a * a + b * b;
        if s > 9.0 {
            let t = 3.0 / s.sqrt();
            m[k] = t * a * delta[k];
            m[k + 1] = t * b * delta[k];
        }
    }
    m
}

fn hermite1(x0: f64, x1: f64, y0: f64, y1: f64, m0: f64, m1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * h * m0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * h * m1
}

/// Roots of `γ₀(s) = t0` on the monotone interpolant of the node times.
pub fn time_roots(curve: &SampledCurve, t0: f64) -> Vec<f64> {
    let s = curve.params();
    let y: Vec<f64> = curve.points().iter().map(|p| p[0] - t0).collect();
    let m = monotone_slopes(s, &y);
    let mut roots = Vec::new();
    for k in 0..s.len() {
        if y[k] == 0.0 {
            roots.push(s[k]);
            continue;
        }
        if k + 1 < s.len() && y[k + 1] != 0.0 && y[k] * y[k + 1] < 0.0 {
            let f = |x: f64| hermite1(s[k], s[k + 1], y[k], y[k + 1], m[k], m[k + 1], x);
            let (mut a, mut b) = (s[k], s[k + 1]);
            let fa = y[k];
            while b - a > ROOT_TOL {
                let mid = 0.5 * (a + b);
                let fm = f(mid);
                if fm == 0.0 {
                    a = mid;
                    b = mid;
                    break;
                }
                if (fm < 0.0) == (fa < 0.0) {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            roots.push(0.5 * (a + b));
        }
    }
    roots
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub t0: f64,
    pub roots: Vec<f64>,
    pub points: Vec<Vec4>,
    pub t0_in_range: bool,
    /// `γ₀` strictly monotone on the node grid.
    pub monotone_time: bool,
    /// Minimum over sampled pairs of `|γ₀(s) − γ₀(s₀)| − c ∫ ‖γ̇₁‖`.
    pub min_inequality_slack: f64,
    pub inequality_holds: bool,
}

impl CrossingReport {
    /// Exactly one root when `t0` is in range, none otherwise.
    pub fn is_unique_crossing(&self) -> bool {
        if self.t0_in_range {
            self.roots.len() == 1
        } else {
            self.roots.is_empty()
        }
    }
}

/// Crossings of a timelike curve with the slice `{t0} × R³`.
///
/// `spatial_coeff` is the constant `c` in `|Δγ₀| ≥ c ∫‖γ̇₁‖` (`α` for the
/// exact metric, `√min(β, 1)` for the regularized one).
pub fn cauchy_crossing(
    curve: &SampledCurve,
    t0: f64,
    field: &(impl MetricField + ?Sized),
    spatial_coeff: f64,
) -> Result<CrossingReport> {
    let profile = curve_causal_profile(curve, field)?;
    if !profile.is_timelike() {
        return Err(Error::Precondition(format!(
            "curve is not timelike (class {:?}, max g(v, v) = {})",
            profile.class,
            profile.max_value()
        )));
    }
    let times: Vec<f64> = curve.points().iter().map(|p| p[0]).collect();
    let monotone_time =
        times.windows(2).all(|w| w[1] > w[0]) || times.windows(2).all(|w| w[1] < w[0]);
    let (tmin, tmax) = times
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &t| {
            (a.min(t), b.max(t))
        });
    let roots = time_roots(curve, t0);
    let points = roots.iter().map(|&s| curve.eval(s)).collect();

    // cumulative ∫‖γ̇₁‖ on the nodes
    let rule = UnitRule::new(8);
    let s = curve.params();
    let mut cum = vec![0.0; s.len()];
    for k in 0..s.len() - 1 {
        let seg = rule.integrate(s[k], s[k + 1], |x| {
            let v = curve.tangent_on(k, x);
            (v[1] * v[1] + v[2] * v[2] + v[3] * v[3]).sqrt()
        });
        cum[k + 1] = cum[k] + seg;
    }
    let stride = (s.len() / 64).max(1);
    let idx: Vec<usize> = (0..s.len()).step_by(stride).chain([s.len() - 1]).collect();
    let mut slack = f64::INFINITY;
    for &i in &idx {
        for &j in &idx {
            if i < j {
                let lhs = (times[j] - times[i]).abs();
                slack = slack.min(lhs - spatial_coeff * (cum[j] - cum[i]));
            }
        }
    }
    let scale = cum.last().copied().unwrap_or(0.0).max(1.0);
    Ok(CrossingReport {
        t0,
        roots,
        points,
        t0_in_range: t0 >= tmin && t0 <= tmax,
        monotone_time,
        min_inequality_slack: slack,
        inequality_holds: slack >= -1e-9 * scale,
    })
}

/// Positive-definite metric used to measure curve length.
pub trait RiemannMetric {
    fn quad(&self, p: &Vec4, v: &Vec4) -> f64;
}

/// The Euclidean metric `e` on `R⁴`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Euclidean;

impl RiemannMetric for Euclidean {
    fn quad(&self, _p: &Vec4, v: &Vec4) -> f64 {
        v.iter().map(|c| c * c).sum()
    }
}

fn speed(metric: &impl RiemannMetric, p: &Vec4, v: &Vec4) -> Result<f64> {
    let q = metric.quad(p, v);
    if !(q > 0.0) {
        return Err(Error::Numerical(format!(
            "non-positive Riemannian norm {q} at {p:?}"
        )));
    }
    Ok(q.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arclength {
    /// Parameter `t₀` where `s(t₀) = 0`: the clamp of 0 to the domain.
    pub anchor: f64,
    /// `s(t_i)` at the curve nodes.
    pub values: Vec<f64>,
}

impl Arclength {
    pub fn total(&self) -> f64 {
        self.values.last().unwrap() - self.values[0]
    }
}

fn segment_length(
    curve: &SampledCurve,
    metric: &impl RiemannMetric,
    rule: &UnitRule,
    k: usize,
    a: f64,
    b: f64,
) -> Result<f64> {
    let mut acc = 0.0;
    for (x, w) in rule.on(a, b) {
        acc += w * speed(metric, &curve.eval_on(k, x), &curve.tangent_on(k, x))?;
    }
    Ok(acc)
}

fn cumulative_length(
    curve: &SampledCurve,
    metric: &impl RiemannMetric,
    rule: &UnitRule,
) -> Result<Vec<f64>> {
    let s = curve.params();
    let mut cum = vec![0.0; s.len()];
    for k in 0..s.len() - 1 {
        cum[k + 1] = cum[k] + segment_length(curve, metric, rule, k, s[k], s[k + 1])?;
    }
    Ok(cum)
}

/// `s(t) = ∫_{t₀}^t ‖γ̇‖_η` on the node grid.
pub fn arclength(curve: &SampledCurve, metric: &impl RiemannMetric) -> Result<Arclength> {
    let rule = UnitRule::new(10);
    let cum = cumulative_length(curve, metric, &rule)?;
    let (a, b) = curve.domain();
    let anchor = 0.0f64.clamp(a, b);
    let k = curve.segment(anchor);
    let offset = cum[k] + segment_length(curve, metric, &rule, k, curve.params()[k], anchor)?;
    Ok(Arclength {
        anchor,
        values: cum.iter().map(|c| c - offset).collect(),
    })
}

/// Inverts `t ↦ L(t)` on segment `k` where `L(t_k) = base`.
fn invert_length(
    curve: &SampledCurve,
    metric: &impl RiemannMetric,
    rule: &UnitRule,
    k: usize,
    base: f64,
    seg_len: f64,
    target: f64,
) -> Result<f64> {
    let (s0, s1) = (curve.params()[k], curve.params()[k + 1]);
    let want = target - base;
    if want <= 0.0 {
        return Ok(s0);
    }
    if want >= seg_len {
        return Ok(s1);
    }
    let (mut lo, mut hi) = (s0, s1);
    let mut t = s0 + (s1 - s0) * want / seg_len;
    for _ in 0..60 {
        let f = segment_length(curve, metric, rule, k, s0, t)? - want;
        if f > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        if f.abs() <= 1e-15 * seg_len.max(1.0) {
            break;
        }
        let sp = speed(metric, &curve.eval_on(k, t), &curve.tangent_on(k, t))?;
        let next = t - f / sp;
        t = if next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-15 * (s1 - s0) {
            break;
        }
    }
    Ok(t)
}

/// Reparametrizes by `η`-arclength measured from the anchor; the node count is
/// kept and nodes are equispaced in arclength. Polylines keep their vertices.
pub fn unit_speed_reparam(
    curve: &SampledCurve,
    metric: &impl RiemannMetric,
) -> Result<SampledCurve> {
    let al = arclength(curve, metric)?;
    if curve.interpolation() == Interpolation::Linear {
        return SampledCurve::polyline(al.values.clone(), curve.points().to_vec());
    }
    let rule = UnitRule::new(10);
    let n = curve.len();
    let (lo, hi) = (al.values[0], *al.values.last().unwrap());
    let mut params = Vec::with_capacity(n);
    let mut points = Vec::with_capacity(n);
    let mut tangents = Vec::with_capacity(n);
    let mut k = 0;
    for j in 0..n {
        let sigma = if j + 1 == n {
            hi
        } else {
            lo + (hi - lo) * j as f64 / (n - 1) as f64
        };
        while k + 2 < n && al.values[k + 1] < sigma {
            k += 1;
        }
        let seg = al.values[k + 1] - al.values[k];
        let t = invert_length(curve, metric, &rule, k, al.values[k], seg, sigma)?;
        let p = curve.eval_on(k, t);
        let v = curve.tangent_on(k, t);
        let sp = speed(metric, &p, &v)?;
        params.push(sigma);
        points.push(p);
        tangents.push(v.map(|c| c / sp));
    }
    SampledCurve::new(params, points, tangents)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtendibilityProxy {
    pub backward_length: f64,
    pub forward_length: f64,
    /// Length from the anchor to the end of the window grows at least 1.5×
    /// when the window doubles, on both sides.
    pub unbounded_on_window: bool,
}

/// Sampled proxy for `s(I) = R`: compares arclength over the full window with
/// the half window around the anchor.
pub fn extendibility_proxy(
    curve: &SampledCurve,
    metric: &impl RiemannMetric,
) -> Result<ExtendibilityProxy> {
    let al = arclength(curve, metric)?;
    let (a, b) = curve.domain();
    let half = |t: f64| {
        let mid = 0.5 * (al.anchor + t);
        let k = curve.segment(mid);
        let (s0, s1) = (curve.params()[k], curve.params()[k + 1]);
        let tau = (mid - s0) / (s1 - s0);
        al.values[k] + tau * (al.values[k + 1] - al.values[k])
    };
    let fwd = *al.values.last().unwrap();
    let bwd = -al.values[0];
    let grows = |full: f64, h: f64| h > 0.0 && full / h >= 1.5;
    Ok(ExtendibilityProxy {
        backward_length: bwd,
        forward_length: fwd,
        unbounded_on_window: grows(fwd, half(b)) && grows(bwd, -half(a)),
    })
}

/// An ε-indexed net of curves with a shared truncated parameter window.
#[derive(Debug, Clone)]
pub struct CurveFamily {
    members: Vec<(f64, SampledCurve)>,
    compact_radius: Option<f64>,
    c_bounded: bool,
}

fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Decides whether `max|·|` stays bounded along the net: inside `radius` if
/// one is given, otherwise by the growth rate in `1/ε` on the smaller half of
/// the ε values.
fn bounded_net(eps: &[f64], sizes: &[f64], radius: Option<f64>) -> bool {
    if let Some(r) = radius {
        return sizes.iter().all(|&s| s <= r);
    }
    let mut pairs: Vec<(f64, f64)> = eps.iter().copied().zip(sizes.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let tail = &pairs[..pairs.len().div_ceil(2).max(2).min(pairs.len())];
    if tail.len() < 2 {
        return true;
    }
    let xs: Vec<f64> = tail.iter().map(|p| (1.0 / p.0).ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|p| p.1.max(1e-300).ln()).collect();
    loglog_slope(&xs, &ys) <= 0.5
}

impl CurveFamily {
    pub fn new(members: Vec<(f64, SampledCurve)>, compact_radius: Option<f64>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Invalid("empty curve family".into()));
        }
        if let Some(&(e, _)) = members.iter().find(|(e, _)| !(*e > 0.0)) {
            return Err(Error::Invalid(format!(
                "family eps must be positive, got {e}"
            )));
        }
        let eps: Vec<f64> = members.iter().map(|m| m.0).collect();
        let sizes: Vec<f64> = members
            .iter()
            .map(|(_, c)| c.points().iter().map(norm).fold(0.0, f64::max))
            .collect();
        let c_bounded = bounded_net(&eps, &sizes, compact_radius);
        Ok(Self {
            members,
            compact_radius,
            c_bounded,
        })
    }

    pub fn members(&self) -> &[(f64, SampledCurve)] {
        &self.members
    }

    /// All images lie in one compact set.
    pub fn is_c_bounded(&self) -> bool {
        self.c_bounded
    }

    pub fn compact_radius(&self) -> Option<f64> {
        self.compact_radius
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberReport {
    pub eps: f64,
    pub beta: f64,
    pub s_eps: f64,
    pub p_eps: Vec4,
    /// Min over nodes of `γ̇₀²/β − ‖γ̇₁‖²`.
    pub cone_slack: f64,
    /// Min over nodes of `γ̇₀² − β/(2(β + 1))`.
    pub time_speed_slack: f64,
    pub c_bound: f64,
    pub cone_holds: bool,
    pub time_speed_holds: bool,
    pub c_bound_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub q_exponent: f64,
    pub members: Vec<MemberReport>,
    pub images_c_bounded: bool,
    pub points_c_bounded: bool,
    /// Componentwise range of the crossing points `p_ε`.
    pub point_min: Vec4,
    pub point_max: Vec4,
}

impl FamilyReport {
    pub fn all_bounds_hold(&self) -> bool {
        self.members
            .iter()
            .all(|m| m.cone_holds && m.time_speed_holds && m.c_bound_holds)
    }
}

const UNIT_SPEED_TOL: f64 = 1e-8;
const BOUND_TOL: f64 = 1e-12;

fn member_report(
    eps: f64,
    curve: &SampledCurve,
    field: &RegularizedField,
    q: f64,
) -> Result<MemberReport> {
    let beta = field.beta(eps).beta().ok_or_else(|| {
        Error::Precondition(format!("mollifier inadmissible for alpha at eps = {eps}"))
    })?;
    let b = beta.min(1.0);
    let bound = -eps.powf(q);
    let metric = field.at(eps)?;
    let mut cone_slack = f64::INFINITY;
    let mut time_speed_slack = f64::INFINITY;
    let floor = b / (2.0 * (b + 1.0));
    for ((s, p), v) in curve
        .params()
        .iter()
        .zip(curve.points())
        .zip(curve.tangents())
    {
        let e = norm(v);
        if (e * e - 1.0).abs() > UNIT_SPEED_TOL {
            return Err(Error::Precondition(format!(
                "member at eps = {eps} is not unit speed at s = {s}: e(v, v) = {}",
                e * e
            )));
        }
        let g = metric.metric(&SpacetimePoint::from_array(*p))?.quad(v);
        if g > bound {
            return Err(Error::NotUniformlyTimelike {
                eps,
                s: *s,
                value: g,
                bound,
            });
        }
        let v0 = v[0] * v[0];
        let v1 = v[1] * v[1] + v[2] * v[2] + v[3] * v[3];
        cone_slack = cone_slack.min(v0 / b - v1);
        time_speed_slack = time_speed_slack.min(v0 - floor);
    }
    let roots = time_roots(curve, 0.0);
    if roots.len() != 1 {
        return Err(Error::Numerical(format!(
            "expected one crossing of t = 0 at eps = {eps}, found {}",
            roots.len()
        )));
    }
    let s_eps = roots[0];
    let (a, bnd) = curve.domain();
    if !(a <= 0.0 && bnd >= 0.0) {
        return Err(Error::Precondition(format!(
            "parameter window [{a}, {bnd}] must contain 0"
        )));
    }
    let c_bound = curve.eval(0.0)[0].abs() * (2.0 * (b + 1.0) / b).sqrt();
    Ok(MemberReport {
        eps,
        beta,
        s_eps,
        p_eps: curve.eval(s_eps),
        cone_slack,
        time_speed_slack,
        c_bound,
        cone_holds: cone_slack >= -BOUND_TOL,
        time_speed_holds: time_speed_slack >= -BOUND_TOL,
        c_bound_holds: s_eps.abs() <= c_bound + ROOT_TOL,
    })
}

/// Crossing of `{t = 0}` by every member, with the cone bound, the time-speed
/// floor and the bound on `|s_ε|`.
pub fn generalized_crossing(
    family: &CurveFamily,
    field: &RegularizedField,
    q_exponent: f64,
) -> Result<FamilyReport> {
    let members: Vec<MemberReport> = family
        .members
        .par_iter()
        .map(|(eps, c)| member_report(*eps, c, field, q_exponent))
        .collect::<Result<_>>()?;
    let eps: Vec<f64> = members.iter().map(|m| m.eps).collect();
    let sizes: Vec<f64> = members.iter().map(|m| norm(&m.p_eps)).collect();
    let mut point_min = [f64::INFINITY; 4];
    let mut point_max = [f64::NEG_INFINITY; 4];
    for m in &members {
        for c in 0..4 {
            point_min[c] = point_min[c].min(m.p_eps[c]);
            point_max[c] = point_max[c].max(m.p_eps[c]);
        }
    }
    Ok(FamilyReport {
        q_exponent,
        points_c_bounded: bounded_net(&eps, &sizes, family.compact_radius),
        images_c_bounded: family.c_bounded,
        members,
        point_min,
        point_max,
    })
}

fn vertical_line(x: f64, window: f64, nodes: usize) -> Result<SampledCurve> {
    SampledCurve::from_fn(
        -window,
        window,
        nodes | 1,
        |s| [s, x, 0.0, 0.0],
        |_| [1.0, 0.0, 0.0, 0.0],
    )
}

/// `γ_ε(s) = (s, sin(1/ε), 0, 0)`: crossings accumulate on `{0} × [−1, 1] × {0}`.
pub fn oscillating_family(eps: &[f64], window: f64, nodes: usize) -> Result<CurveFamily> {
    let members = eps
        .iter()
        .map(|&e| Ok((e, vertical_line((1.0 / e).sin(), window, nodes)?)))
        .collect::<Result<_>>()?;
    CurveFamily::new(members, None)
}

/// `λ_ε(s) = (s, 1/ε, 0, 0)`: crossings exist but escape every compact set.
pub fn escaping_family(eps: &[f64], window: f64, nodes: usize) -> Result<CurveFamily> {
    let members = eps
        .iter()
        .map(|&e| Ok((e, vertical_line(1.0 / e, window, nodes)?)))
        .collect::<Result<_>>()?;
    CurveFamily::new(members, None)
}

/// `γ_ε(s) = (s, 1, 0, 0)` for every ε.
pub fn constant_family(eps: &[f64], window: f64, nodes: usize) -> Result<CurveFamily> {
    let members = eps
        .iter()
        .map(|&e| Ok((e, vertical_line(1.0, window, nodes)?)))
        .collect::<Result<_>>()?;
    CurveFamily::new(members, None)
}

/// Euclidean unit-speed helix `(a s + t_c, x_c + r cos(ωs + φ), y_c + r sin(ωs + φ), b s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Helix {
    pub time_speed: f64,
    pub center: [f64; 2],
    pub radius: f64,
    pub omega: f64,
    pub phase: f64,
    pub z_speed: f64,
    pub t_offset: f64,
}

impl Helix {
    pub fn position(&self, s: f64) -> Vec4 {
        let th = self.omega * s + self.phase;
        [
            self.t_offset + self.time_speed * s,
            self.center[0] + self.radius * th.cos(),
            self.center[1] + self.radius * th.sin(),
            self.z_speed * s,
        ]
    }

    pub fn velocity(&self, s: f64) -> Vec4 {
        let th = self.omega * s + self.phase;
        let w = self.radius * self.omega;
        [self.time_speed, -w * th.sin(), w * th.cos(), self.z_speed]
    }

    pub fn sample(&self, window: f64, nodes: usize) -> Result<SampledCurve> {
        SampledCurve::from_fn(
            -window,
            window,
            nodes,
            |s| self.position(s),
            |s| self.velocity(s),
        )
    }
}

/// Random unit-speed helices with `γ̇₀² ≥ min_time_speed²`; these are
/// timelike for every metric whose spatial part is bounded by
/// `min_time_speed² / (1 − min_time_speed²)`.
pub fn helix_corpus(count: usize, min_time_speed: f64, seed: u64) -> Vec<Helix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let a: f64 = rng.random_range(min_time_speed..1.0);
            let rest = (1.0 - a * a).sqrt();
            let split: f64 = rng.random_range(0.0..1.0);
            let radius: f64 = rng.random_range(0.05..1.5);
            let w = rest * split.sqrt();
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            Helix {
                time_speed: a,
                center: [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
                radius,
                omega: sign * w / radius,
                phase: rng.random_range(0.0..std::f64::consts::TAU),
                z_speed: rest * (1.0 - split).sqrt(),
                t_offset: rng.random_range(-0.5..0.5),
            }
        })
        .collect()
}
