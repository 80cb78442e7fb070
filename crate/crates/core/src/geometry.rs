//! Euclidean and conic geometry of finite constellations.
//!
//! The central objects are the [`Constellation`] itself, its
//! [`DistanceSpectrum`], and the recession cone
//! `K(x_i) = { u : uᵀ(x_j − x_i) ≤ 0 for all j ≠ i }` of each point's Voronoi
//! cell. In the plane the cone's trace on the unit circle is an arc,
//! represented by [`AngularPatch2D`]; in higher dimension its normalized
//! measure is estimated by sampling directions.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Two points closer than `DUPLICATE_RTOL * (1 + max norm)` are duplicates.
pub const DUPLICATE_RTOL: f64 = 1e-9;
/// Tolerance on the sum of priors.
pub const PRIOR_SUM_TOL: f64 = 1e-12;
/// Arcs shorter than this are measure zero.
pub const ARC_COLLAPSE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

/// An ordered finite set of distinct points in `R^d`, with optional labels
/// and symbol priors (equiprobable when absent).
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    points: Vec<Point>,
    labels: Option<Vec<String>>,
    priors: Option<Vec<f64>>,
}

impl Constellation {
    pub fn new<P: Into<Point>>(points: impl IntoIterator<Item = P>) -> Result<Self> {
        let points: Vec<Point> = points.into_iter().map(Into::into).collect();
        let first = points.first().ok_or(Error::EmptyConstellation)?;
        let dim = first.dim();
        if dim == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        for (index, p) in points.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
            }
            if p.0.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteCoordinate { index });
            }
        }
        let c = Constellation { points, labels: None, priors: None };
        c.check_duplicates()?;
        Ok(c)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::InvalidLabels { expected: self.len(), found: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_priors(mut self, priors: Vec<f64>) -> Result<Self> {
        if priors.len() != self.len() {
            return Err(Error::InvalidPriors(format!("expected {} priors, got {}", self.len(), priors.len())));
        }
        if priors.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidPriors("priors must be finite and nonnegative".into()));
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > PRIOR_SUM_TOL {
            return Err(Error::InvalidPriors(format!("priors sum to {total}, not 1")));
        }
        self.priors = Some(priors);
        Ok(self)
    }

    fn check_duplicates(&self) -> Result<()> {
        let tol = self.duplicate_tolerance();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let d = dist(self.point(i), self.point(j));
                if d < tol {
                    return Err(Error::DuplicatePoint { i, j, distance: d });
                }
            }
        }
        Ok(())
    }

    pub fn duplicate_tolerance(&self) -> f64 {
        let max_norm = self.points.iter().map(Point::norm).fold(0.0, f64::max);
        DUPLICATE_RTOL * (1.0 + max_norm)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i].0
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of point `i`; `P{i+1}` when no labels were given.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => format!("P{}", i + 1),
        }
    }

    /// Explicit priors, if any were supplied.
    pub fn explicit_priors(&self) -> Option<&[f64]> {
        self.priors.as_deref()
    }

    /// Priors with the equiprobable default filled in.
    pub fn priors(&self) -> Vec<f64> {
        match &self.priors {
            Some(p) => p.clone(),
            None => vec![1.0 / self.len() as f64; self.len()],
        }
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index, len: self.len() })
        }
    }

    pub fn require_points(&self, required: usize) -> Result<()> {
        if self.len() >= required {
            Ok(())
        } else {
            Err(Error::NotEnoughPoints { required, found: self.len() })
        }
    }

    /// Applies `f` to every point, keeping labels and priors.
    pub fn map_points(&self, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Result<Self> {
        let mut c = Constellation::new(self.points.iter().map(|p| f(&p.0)))?;
        c.labels = self.labels.clone();
        c.priors = self.priors.clone();
        Ok(c)
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        self.map_points(|p| p.iter().map(|v| v * s).collect())
    }

    /// `Σ_i p_i ‖x_i‖²`.
    pub fn average_power(&self) -> f64 {
        self.priors().iter().zip(&self.points).map(|(p, x)| p * dot(&x.0, &x.0)).sum()
    }

    pub fn min_distance(&self) -> Result<f64> {
        self.require_points(2)?;
        Ok(distance_spectrum(self)?.min())
    }

    /// Largest pairwise distance (0 for a single point).
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                d = d.max(dist(self.point(i), self.point(j)));
            }
        }
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairDistance {
    pub i: usize,
    pub j: usize,
    pub distance: f64,
}

/// All pairwise distances `d_ij`, stored once per unordered pair with `i < j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceSpectrum {
    pub entries: Vec<PairDistance>,
    len: usize,
}

impl DistanceSpectrum {
    pub fn min(&self) -> f64 {
        self.entries.iter().map(|e| e.distance).fold(f64::INFINITY, f64::min)
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        if a == b || b >= self.len {
            return None;
        }
        // entries are laid out row-major over the upper triangle
        let idx = a * (2 * self.len - a - 1) / 2 + (b - a - 1);
        Some(self.entries[idx].distance)
    }

    /// Distances from point `i` to every other point, in index order.
    pub fn row(&self, i: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).filter(move |&j| j != i).map(move |j| self.get(i, j).unwrap())
    }

    pub fn num_points(&self) -> usize {
        self.len
    }
}

pub fn distance_spectrum(c: &Constellation) -> Result<DistanceSpectrum> {
    let tol = c.duplicate_tolerance();
    let m = c.len();
    let mut entries = Vec::with_capacity(m * m.saturating_sub(1) / 2);
    for i in 0..m {
        for j in i + 1..m {
            let distance = dist(c.point(i), c.point(j));
            if distance < tol {
                return Err(Error::DuplicatePoint { i, j, distance });
            }
            entries.push(PairDistance { i, j, distance });
        }
    }
    Ok(DistanceSpectrum { entries, len: m })
}

/// Unit vector `(x_j − x_i)/‖x_j − x_i‖`.
pub fn pairwise_direction(c: &Constellation, i: usize, j: usize) -> Result<Vec<f64>> {
    c.check_index(i)?;
    c.check_index(j)?;
    let diff = sub(c.point(j), c.point(i));
    let n = norm(&diff);
    if i == j || n < c.duplicate_tolerance() {
        return Err(Error::DuplicatePoint { i, j, distance: n });
    }
    Ok(diff.into_iter().map(|v| v / n).collect())
}

/// Membership of `u` in the recession cone of point `i`; the boundary counts
/// as inside.
pub fn cone_contains(c: &Constellation, i: usize, u: &[f64]) -> Result<bool> {
    c.check_index(i)?;
    if u.len() != c.dim() {
        return Err(Error::DimensionMismatch { expected: c.dim(), found: u.len() });
    }
    Ok(cone_contains_unchecked(c, i, u))
}

pub(crate) fn cone_contains_unchecked(c: &Constellation, i: usize, u: &[f64]) -> bool {
    let xi = c.point(i);
    (0..c.len())
        .filter(|&j| j != i)
        .all(|j| c.point(j).iter().zip(xi).zip(u).map(|((a, b), w)| w * (a - b)).sum::<f64>() <= 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatchKind {
    Empty,
    DegenerateRay,
    Arc,
    FullCircle,
}

/// Trace of a planar recession cone on the unit circle.
///
/// Arcs are stored as `(start_angle, arc_length)` running counter-clockwise,
/// with angles canonicalized to `[0, 2π)`. A cone that is a full line (a
/// middle point of a collinear constellation) is reported as a degenerate ray
/// with the antipodal direction in `second_ray`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularPatch2D {
    pub kind: PatchKind,
    pub start_angle: f64,
    pub arc_length: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_ray: Option<f64>,
}

impl AngularPatch2D {
    pub fn empty() -> Self {
        Self { kind: PatchKind::Empty, start_angle: 0.0, arc_length: 0.0, second_ray: None }
    }

    pub fn full_circle() -> Self {
        Self { kind: PatchKind::FullCircle, start_angle: 0.0, arc_length: TAU, second_ray: None }
    }

    /// Normalized arc measure `arc_length / 2π`.
    pub fn fraction(&self) -> f64 {
        self.arc_length / TAU
    }

    pub fn end_angle(&self) -> f64 {
        canonical_angle(self.start_angle + self.arc_length)
    }

    /// Circular distance from direction `theta` to the patch (0 inside,
    /// infinity for an empty patch).
    pub fn angular_distance(&self, theta: f64) -> f64 {
        match self.kind {
            PatchKind::Empty => f64::INFINITY,
            PatchKind::FullCircle => 0.0,
            PatchKind::DegenerateRay => {
                let d = circular_distance(theta, self.start_angle);
                match self.second_ray {
                    Some(r) => d.min(circular_distance(theta, r)),
                    None => d,
                }
            }
            PatchKind::Arc => {
                if canonical_angle(theta - self.start_angle) <= self.arc_length {
                    0.0
                } else {
                    circular_distance(theta, self.start_angle)
                        .min(circular_distance(theta, self.start_angle + self.arc_length))
                }
            }
        }
    }
}

pub fn canonical_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = canonical_angle(a - b);
    d.min(TAU - d)
}

#[derive(Debug, Clone, Copy)]
struct ArcPiece {
    start: f64,
    len: f64,
}

/// Intersection of `a` (length ≤ π) with `b`; at most two pieces, which only
/// happens for two touching half-circles.
fn intersect_arcs(a: ArcPiece, b: ArcPiece, out: &mut Vec<ArcPiece>) {
    let off = canonical_angle(b.start - a.start);
    for shift in [off, off - TAU] {
        let lo = shift.max(0.0);
        let hi = (shift + b.len).min(a.len);
        if hi - lo >= -ARC_COLLAPSE_TOL {
            let piece = ArcPiece { start: canonical_angle(a.start + lo), len: (hi - lo).max(0.0) };
            let dup = out.iter().any(|p| {
                circular_distance(p.start, piece.start) < ARC_COLLAPSE_TOL && p.len.max(piece.len) < ARC_COLLAPSE_TOL
            });
            if !dup {
                out.push(piece);
            }
        }
    }
}

/// Exact recession-cone arc of point `i` in a planar constellation, built by
/// intersecting the closed half-circles `{θ : cos(θ − φ_j) ≤ 0}`.
pub fn angular_patch_2d(c: &Constellation, i: usize) -> Result<AngularPatch2D> {
    if c.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: c.dim() });
    }
    c.check_index(i)?;
    if c.len() == 1 {
        return Ok(AngularPatch2D::full_circle());
    }
    let xi = c.point(i);
    let mut region: Option<Vec<ArcPiece>> = None;
    for j in (0..c.len()).filter(|&j| j != i) {
        let xj = c.point(j);
        let phi = (xj[1] - xi[1]).atan2(xj[0] - xi[0]);
        let half = ArcPiece { start: canonical_angle(phi + PI / 2.0), len: PI };
        region = Some(match region {
            None => vec![half],
            Some(pieces) => {
                let mut next = Vec::with_capacity(2);
                for p in pieces {
                    intersect_arcs(p, half, &mut next);
                }
                next
            }
        });
        if region.as_ref().is_some_and(Vec::is_empty) {
            return Ok(AngularPatch2D::empty());
        }
    }
    let pieces = region.unwrap_or_default();
    let widest = pieces.iter().copied().fold(None::<ArcPiece>, |acc, p| match acc {
        Some(a) if a.len >= p.len => Some(a),
        _ => Some(p),
    });
    let Some(widest) = widest else {
        return Ok(AngularPatch2D::empty());
    };
    if widest.len >= ARC_COLLAPSE_TOL {
        return Ok(AngularPatch2D {
            kind: PatchKind::Arc,
            start_angle: widest.start,
            arc_length: widest.len,
            second_ray: None,
        });
    }
    let mut rays: Vec<f64> = pieces.iter().map(|p| canonical_angle(p.start + p.len / 2.0)).collect();
    rays.sort_by(f64::total_cmp);
    Ok(AngularPatch2D {
        kind: PatchKind::DegenerateRay,
        start_angle: rays[0],
        arc_length: 0.0,
        second_ray: rays.get(1).copied(),
    })
}

/// How to evaluate the normalized angular measure of a recession cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum AngularMethod {
    Exact2d,
    SphereMc { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularFraction {
    pub value: f64,
    /// Binomial standard error; zero for the exact planar computation.
    pub std_error: f64,
    pub samples: Option<usize>,
    pub hits: Option<usize>,
}

pub fn angular_fraction(c: &Constellation, i: usize, method: AngularMethod) -> Result<AngularFraction> {
    match method {
        AngularMethod::Exact2d => {
            let patch = angular_patch_2d(c, i)?;
            Ok(AngularFraction { value: patch.fraction(), std_error: 0.0, samples: None, hits: None })
        }
        AngularMethod::SphereMc { samples, seed } => {
            c.check_index(i)?;
            if samples == 0 {
                return Err(Error::InvalidSampleCount { min: 1, found: 0 });
            }
            let mut rng = RngStream::new(seed, i as u64).rng();
            let mut u = vec![0.0; c.dim()];
            let mut hits = 0usize;
            for _ in 0..samples {
                uniform_direction(&mut rng, &mut u);
                if cone_contains_unchecked(c, i, &u) {
                    hits += 1;
                }
            }
            let p = hits as f64 / samples as f64;
            Ok(AngularFraction {
                value: p,
                std_error: (p * (1.0 - p) / samples as f64).sqrt(),
                samples: Some(samples),
                hits: Some(hits),
            })
        }
    }
}

/// Fills `u` with a direction drawn uniformly from the unit sphere.
pub fn uniform_direction<R: Rng + ?Sized>(rng: &mut R, u: &mut [f64]) {
    loop {
        for v in u.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let n = norm(u);
        if n > 0.0 {
            u.iter_mut().for_each(|v| *v /= n);
            return;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum HullTag {
    Vertex { exterior_angle: f64 },
    EdgeInterior,
    Interior,
}

/// Convex-hull role of every point of a planar constellation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullClass {
    pub tags: Vec<HullTag>,
    /// True when the hull has zero area (one point or all points collinear).
    pub degenerate: bool,
}

impl HullClass {
    pub fn is_vertex(&self, i: usize) -> bool {
        matches!(self.tags[i], HullTag::Vertex { .. })
    }

    pub fn exterior_angle(&self, i: usize) -> Option<f64> {
        match self.tags[i] {
            HullTag::Vertex { exterior_angle } => Some(exterior_angle),
            _ => None,
        }
    }
}

fn cross(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Tags hull vertices (with exterior angles), points on hull edges, and
/// interior points. Zero-area hulls tag the two extreme points as vertices
/// with exterior angle π and every other point as interior.
pub fn hull_classify(c: &Constellation) -> Result<HullClass> {
    if c.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: c.dim() });
    }
    let m = c.len();
    if m == 1 {
        return Ok(HullClass { tags: vec![HullTag::Vertex { exterior_angle: TAU }], degenerate: true });
    }
    let scale = 1.0 + c.points().iter().map(Point::norm).fold(0.0, f64::max);
    let tol = 1e-12 * scale * scale;

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        let (pa, pb) = (c.point(a), c.point(b));
        pa[0].total_cmp(&pb[0]).then(pa[1].total_cmp(&pb[1]))
    });

    // Andrew's monotone chain, dropping collinear points from the hull.
    let mut hull: Vec<usize> = Vec::with_capacity(2 * m);
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &usize>> =
            if pass == 0 { Box::new(order.iter()) } else { Box::new(order.iter().rev()) };
        for &k in iter {
            while hull.len() >= start + 2
                && cross(c.point(hull[hull.len() - 2]), c.point(hull[hull.len() - 1]), c.point(k)) <= tol
            {
                hull.pop();
            }
            hull.push(k);
        }
        hull.pop();
    }

    if hull.len() < 3 {
        let mut tags = vec![HullTag::Interior; m];
        tags[order[0]] = HullTag::Vertex { exterior_angle: PI };
        tags[order[m - 1]] = HullTag::Vertex { exterior_angle: PI };
        return Ok(HullClass { tags, degenerate: true });
    }

    let h = hull.len();
    let mut tags = vec![HullTag::Interior; m];
    for k in 0..h {
        let prev = c.point(hull[(k + h - 1) % h]);
        let v = c.point(hull[k]);
        let next = c.point(hull[(k + 1) % h]);
        let e1 = [v[0] - prev[0], v[1] - prev[1]];
        let e2 = [next[0] - v[0], next[1] - v[1]];
        let turn = (e1[0] * e2[1] - e1[1] * e2[0]).atan2(e1[0] * e2[0] + e1[1] * e2[1]);
        tags[hull[k]] = HullTag::Vertex { exterior_angle: turn };
    }
    for (p, tag) in tags.iter_mut().enumerate() {
        if matches!(tag, HullTag::Vertex { .. }) {
            continue;
        }
        let x = c.point(p);
        let on_edge = (0..h).any(|k| {
            let a = c.point(hull[k]);
            let b = c.point(hull[(k + 1) % h]);
            let ab = [b[0] - a[0], b[1] - a[1]];
            let len2 = ab[0] * ab[0] + ab[1] * ab[1];
            let t = ((x[0] - a[0]) * ab[0] + (x[1] - a[1]) * ab[1]) / len2;
            cross(a, b, x).abs() <= tol * len2.sqrt().max(1.0) && (0.0..=1.0).contains(&t)
        });
        if on_edge {
            *tag = HullTag::EdgeInterior;
        }
    }
    Ok(HullClass { tags, degenerate: false })
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn asym4() -> Constellation {
        catalog::catalog_get("asym4").unwrap().constellation
    }

    #[test]
    fn spectrum_of_asym4() {
        let s = distance_spectrum(&asym4()).unwrap();
        let want = [1.0, 1.0, 1.0, 2f64.sqrt(), 2f64.sqrt(), 2.0];
        let got: Vec<f64> = s.entries.iter().map(|e| e.distance).collect();
        for (g, w) in got.iter().zip(want) {
            assert_abs_diff_eq!(*g, w, epsilon = 1e-15);
        }
        assert_eq!(s.get(3, 2), Some(2.0));
        assert_eq!(s.get(1, 1), None);
    }

    #[test]
    fn spectrum_of_345() {
        let c = Constellation::new(vec![vec![0.0, 0.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(distance_spectrum(&c).unwrap().entries[0].distance, 5.0);
    }

    #[test]
    fn spectrum_of_qam4() {
        let c = catalog::catalog_get("qam4").unwrap().constellation;
        let mut d: Vec<f64> = distance_spectrum(&c).unwrap().entries.iter().map(|e| e.distance).collect();
        d.sort_by(f64::total_cmp);
        let r8 = 8f64.sqrt();
        for (g, w) in d.iter().zip([2.0, 2.0, 2.0, 2.0, r8, r8]) {
            assert_abs_diff_eq!(*g, w, epsilon = 1e-15);
        }
    }

    #[test]
    fn duplicates_rejected() {
        let err = Constellation::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1e-12, 0.0]]).unwrap_err();
        assert!(matches!(err, Error::DuplicatePoint { i: 0, j: 2, .. }));
    }

    #[test]
    fn invalid_inputs() {
        assert_eq!(Constellation::new(Vec::<Vec<f64>>::new()).unwrap_err(), Error::EmptyConstellation);
        assert!(matches!(
            Constellation::new(vec![vec![0.0, 0.0], vec![1.0]]).unwrap_err(),
            Error::DimensionMismatch { .. }
        ));
        assert!(matches!(
            Constellation::new(vec![vec![f64::NAN, 0.0]]).unwrap_err(),
            Error::NonFiniteCoordinate { index: 0 }
        ));
        let c = Constellation::new(vec![vec![0.0], vec![1.0]]).unwrap();
        assert!(c.clone().with_priors(vec![0.5, 0.6]).is_err());
        assert!(c.clone().with_priors(vec![-0.5, 1.5]).is_err());
        assert!(c.clone().with_priors(vec![0.25, 0.75]).is_ok());
        assert!(c.with_labels(vec!["a".into()]).is_err());
    }

    #[test]
    fn directions() {
        let c = asym4();
        assert_eq!(pairwise_direction(&c, 0, 1).unwrap(), vec![1.0, 0.0]);
        assert_eq!(pairwise_direction(&c, 1, 0).unwrap(), vec![-1.0, 0.0]);
        assert_eq!(pairwise_direction(&c, 0, 2).unwrap(), vec![0.0, 1.0]);
        let u = pairwise_direction(&c, 1, 2).unwrap();
        assert_abs_diff_eq!(norm(&u), 1.0, epsilon = 1e-12);
        assert!(matches!(pairwise_direction(&c, 0, 9), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(pairwise_direction(&c, 1, 1), Err(Error::DuplicatePoint { .. })));
    }

    #[test]
    fn cone_membership_at_p2() {
        let c = asym4();
        assert!(cone_contains(&c, 1, &[1.0, 0.0]).unwrap());
        assert!(!cone_contains(&c, 1, &[0.0, 1.0]).unwrap());
        assert!(cone_contains(&c, 1, &[1.0, 1.0]).unwrap());
        assert!(matches!(cone_contains(&c, 1, &[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn asym4_patches() {
        let c = asym4();
        let p1 = angular_patch_2d(&c, 0).unwrap();
        assert_eq!(p1.kind, PatchKind::DegenerateRay);
        assert_abs_diff_eq!(p1.start_angle, PI, epsilon = 1e-12);
        assert_eq!(p1.arc_length, 0.0);

        let p2 = angular_patch_2d(&c, 1).unwrap();
        assert_eq!(p2.kind, PatchKind::Arc);
        assert_abs_diff_eq!(p2.start_angle, 7.0 * PI / 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p2.arc_length, PI / 2.0, epsilon = 1e-12);

        let p3 = angular_patch_2d(&c, 2).unwrap();
        assert_abs_diff_eq!(p3.start_angle, PI / 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p3.end_angle(), PI, epsilon = 1e-12);
        assert_abs_diff_eq!(p3.arc_length, 3.0 * PI / 4.0, epsilon = 1e-12);

        let p4 = angular_patch_2d(&c, 3).unwrap();
        assert_abs_diff_eq!(p4.start_angle, PI, epsilon = 1e-12);
        assert_abs_diff_eq!(p4.arc_length, 3.0 * PI / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn special_patches() {
        let single = Constellation::new(vec![vec![0.3, 0.1]]).unwrap();
        assert_eq!(angular_patch_2d(&single, 0).unwrap().kind, PatchKind::FullCircle);

        let cross = catalog::catalog_get("cross5").unwrap().constellation;
        assert_eq!(angular_patch_2d(&cross, 0).unwrap().kind, PatchKind::Empty);

        let line = Constellation::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]]).unwrap();
        let mid = angular_patch_2d(&line, 1).unwrap();
        assert_eq!(mid.kind, PatchKind::DegenerateRay);
        assert_abs_diff_eq!(mid.start_angle, PI / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mid.second_ray.unwrap(), 3.0 * PI / 2.0, epsilon = 1e-12);
        let end = angular_patch_2d(&line, 0).unwrap();
        assert_abs_diff_eq!(end.arc_length, PI, epsilon = 1e-12);

        let three_d = Constellation::new(vec![vec![0.0, 0.0, 0.0]]).unwrap();
        assert!(matches!(angular_patch_2d(&three_d, 0), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn fractions() {
        let c = asym4();
        assert_abs_diff_eq!(angular_fraction(&c, 2, AngularMethod::Exact2d).unwrap().value, 0.375, epsilon = 1e-12);
        let pent = catalog::catalog_get("pentagon5").unwrap().constellation;
        for i in 0..5 {
            assert_abs_diff_eq!(
                angular_fraction(&pent, i, AngularMethod::Exact2d).unwrap().value,
                0.2,
                epsilon = 1e-12
            );
        }
        let mc = angular_fraction(&c, 0, AngularMethod::SphereMc { samples: 100_000, seed: 1 }).unwrap();
        assert_eq!(mc.value, 0.0);
        assert_eq!(mc.std_error, 0.0);
        assert!(matches!(
            angular_fraction(&c, 0, AngularMethod::SphereMc { samples: 0, seed: 1 }),
            Err(Error::InvalidSampleCount { .. })
        ));
    }

    #[test]
    fn sphere_mc_in_three_dimensions() {
        // Octant corners of a cube: each cone is an octant, measure 1/8.
        let mut pts = Vec::new();
        for s in 0..8u32 {
            pts.push((0..3).map(|k| if s >> k & 1 == 1 { 1.0 } else { -1.0 }).collect::<Vec<f64>>());
        }
        let c = Constellation::new(pts).unwrap();
        let f = angular_fraction(&c, 0, AngularMethod::SphereMc { samples: 200_000, seed: 9 }).unwrap();
        assert!((f.value - 0.125).abs() < 4.0 * f.std_error, "{f:?}");
    }

    #[test]
    fn hull_tags() {
        let cross = catalog::catalog_get("cross5").unwrap().constellation;
        let h = hull_classify(&cross).unwrap();
        assert_eq!(h.tags[0], HullTag::Interior);
        for i in 1..5 {
            assert_abs_diff_eq!(h.exterior_angle(i).unwrap(), PI / 2.0, epsilon = 1e-12);
        }

        let rect = catalog::catalog_get("rect4").unwrap().constellation;
        let h = hull_classify(&rect).unwrap();
        for i in 0..4 {
            assert_abs_diff_eq!(h.exterior_angle(i).unwrap(), PI / 2.0, epsilon = 1e-12);
        }

        // Kite oracle: exterior angle = π − arccos of the normalized edge vectors.
        let kite = catalog::catalog_get("kite4").unwrap().constellation;
        let h = hull_classify(&kite).unwrap();
        let interior = |v: [f64; 2], a: [f64; 2], b: [f64; 2]| {
            let e1 = [a[0] - v[0], a[1] - v[1]];
            let e2 = [b[0] - v[0], b[1] - v[1]];
            (dot(&e1, &e2) / (norm(&e1) * norm(&e2))).acos()
        };
        let top = PI - interior([0.0, 1.0], [0.5, 0.0], [-0.5, 0.0]);
        let side = PI - interior([0.5, 0.0], [0.0, 1.0], [0.0, -1.0]);
        assert_abs_diff_eq!(top, 2.214297435588181, epsilon = 1e-12);
        assert_abs_diff_eq!(side, 0.927295218001612, epsilon = 1e-12);
        assert_abs_diff_eq!(h.exterior_angle(0).unwrap(), top, epsilon = 1e-12);
        assert_abs_diff_eq!(h.exterior_angle(1).unwrap(), side, epsilon = 1e-12);
        assert_abs_diff_eq!(h.exterior_angle(2).unwrap(), top, epsilon = 1e-12);
        assert_abs_diff_eq!(h.exterior_angle(3).unwrap(), side, epsilon = 1e-12);
    }

    #[test]
    fn hull_edge_and_collinear() {
        let c = Constellation::new(vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let h = hull_classify(&c).unwrap();
        assert_eq!(h.tags[2], HullTag::EdgeInterior);
        assert!(!h.degenerate);

        let line = Constellation::new(vec![vec![1.0, 1.0], vec![0.0, 0.0], vec![2.0, 2.0]]).unwrap();
        let h = hull_classify(&line).unwrap();
        assert!(h.degenerate);
        assert_eq!(h.tags[0], HullTag::Interior);
        assert_eq!(h.exterior_angle(1), Some(PI));
        assert_eq!(h.exterior_angle(2), Some(PI));
    }

    #[test]
    fn power_and_dmin() {
        let rect = catalog::catalog_get("rect4").unwrap().constellation;
        let kite = catalog::catalog_get("kite4").unwrap().constellation;
        assert_abs_diff_eq!(rect.average_power(), 0.625, epsilon = 1e-15);
        assert_abs_diff_eq!(kite.average_power(), 0.625, epsilon = 1e-15);
        assert_abs_diff_eq!(rect.min_distance().unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(kite.min_distance().unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(asym4().min_distance().unwrap(), 1.0);
        let origin = Constellation::new(vec![vec![0.0, 0.0]]).unwrap();
        assert_eq!(origin.average_power(), 0.0);
        assert!(matches!(origin.min_distance(), Err(Error::NotEnoughPoints { .. })));
    }

    fn random_planar(max_m: usize) -> impl Strategy<Value = Constellation> {
        prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..=max_m)
            .prop_filter_map("distinct", |pts| Constellation::new(pts.into_iter().map(|(x, y)| vec![x, y])).ok())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn directions_partition_the_circle(c in random_planar(10)) {
            let total: f64 = (0..c.len()).map(|i| angular_fraction(&c, i, AngularMethod::Exact2d).unwrap().value).sum();
            prop_assert!((total - 1.0).abs() < 1e-9, "total {}", total);
        }

        #[test]
        fn fractions_match_exterior_angles(c in random_planar(10)) {
            let h = hull_classify(&c).unwrap();
            prop_assume!(!h.degenerate);
            let sum: f64 = (0..c.len()).filter_map(|i| h.exterior_angle(i)).sum();
            prop_assert!((sum - TAU).abs() < 1e-9);
            for i in 0..c.len() {
                let a = angular_fraction(&c, i, AngularMethod::Exact2d).unwrap().value;
                let want = h.exterior_angle(i).map_or(0.0, |phi| phi / TAU);
                prop_assert!((a - want).abs() < 1e-9, "point {}: {} vs {}", i, a, want);
            }
        }

        #[test]
        fn rigid_motion_and_scale(c in random_planar(8), theta in 0.0..TAU, tx in -3.0f64..3.0, ty in -3.0f64..3.0, s in 0.1f64..10.0) {
            let (sn, cs) = theta.sin_cos();
            let moved = c.map_points(|p| vec![cs * p[0] - sn * p[1] + tx, sn * p[0] + cs * p[1] + ty]).unwrap();
            let scaled = c.scaled(s).unwrap();
            for i in 0..c.len() {
                let a = angular_fraction(&c, i, AngularMethod::Exact2d).unwrap().value;
                prop_assert!((a - angular_fraction(&moved, i, AngularMethod::Exact2d).unwrap().value).abs() < 1e-9);
                prop_assert!((a - angular_fraction(&scaled, i, AngularMethod::Exact2d).unwrap().value).abs() < 1e-9);
            }
            if c.len() >= 2 {
                let (d0, d1, d2) = (distance_spectrum(&c).unwrap(), distance_spectrum(&moved).unwrap(), distance_spectrum(&scaled).unwrap());
                for k in 0..d0.entries.len() {
                    prop_assert!((d0.entries[k].distance - d1.entries[k].distance).abs() < 1e-9);
                    prop_assert!((s * d0.entries[k].distance - d2.entries[k].distance).abs() < 1e-9 * s.max(1.0));
                }
                prop_assert!((c.min_distance().unwrap() - moved.min_distance().unwrap()).abs() < 1e-9);
            }
        }

        #[test]
        fn cone_membership_scale_free(c in random_planar(6), ux in -1.0f64..1.0, uy in -1.0f64..1.0, lambda in 1e-3f64..1e3) {
            for i in 0..c.len() {
                prop_assert_eq!(
                    cone_contains(&c, i, &[ux, uy]).unwrap(),
                    cone_contains(&c, i, &[lambda * ux, lambda * uy]).unwrap()
                );
            }
        }
    }
}
