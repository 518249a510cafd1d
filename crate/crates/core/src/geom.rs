//! Euclidean and spherical primitives plus the closed-form constants of the
//! sphere bound (regular simplex edge lengths, the antipodal-distance bound
//! and the Jung–Dekster left-hand side).

use std::f64::consts::{FRAC_PI_2, PI};

use microlp::{ComparisonOp, OptimizationDirection, Problem, SolveOutcome};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::NelderMead;
use crate::tolerance::Tolerances;

/// A point of ℝᵐ. Coordinates are finite and there is at least one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Invalid("point with no coordinates".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Invalid("non-finite coordinate".into()));
        }
        Ok(Self(coords))
    }

    pub fn origin(dim: usize) -> Self {
        Self(vec![0.0; dim.max(1)])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Sphere with `radius = 0` standing for the coincidence case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sphere {
    pub center: Point,
    pub radius: f64,
}

impl Sphere {
    /// Signed distance of `p` from the sphere: negative inside.
    pub fn signed_distance(&self, p: &[f64]) -> f64 {
        dist(self.center.coords(), p) - self.radius
    }
}

/// Angular diameter and angular circumradius of a point set on a sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngularPair {
    pub diam_a: f64,
    pub circ_a: f64,
}

/// Dense row-major storage of equally sized points.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            coords: Vec::new(),
        }
    }

    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || !coords.len().is_multiple_of(dim) {
            return Err(Error::Invalid(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Invalid("non-finite coordinate".into()));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows
            .first()
            .map(|r| r.as_ref().len())
            .ok_or_else(|| Error::Invalid("empty point list".into()))?;
        let mut coords = Vec::with_capacity(dim * rows.len());
        for r in rows {
            if r.as_ref().len() != dim {
                return Err(Error::Invalid("ragged point list".into()));
            }
            coords.extend_from_slice(r.as_ref());
        }
        Self::from_flat(dim, coords)
    }

    pub fn push(&mut self, p: &[f64]) {
        debug_assert_eq!(p.len(), self.dim);
        self.coords.extend_from_slice(p);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn get(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.iter().map(<[f64]>::to_vec).collect()
    }

    /// Diagonal of the axis-aligned bounding box: between the diameter and
    /// √dim times the diameter. Used as the scale of an image set.
    pub fn extent(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.iter() {
            for k in 0..self.dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        dist(&lo, &hi)
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Angle between two unit vectors, accurate near 0 and π.
pub fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    let mut d = 0.0;
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        d += (x - y) * (x - y);
        s += (x + y) * (x + y);
    }
    2.0 * d.sqrt().atan2(s.sqrt())
}

/// Smallest sphere through 2 ≤ k ≤ m+1 points of ℝᵐ, centered in their affine
/// hull.
///
/// The first point is moved to the origin and the Gram system of the edge
/// vectors is solved by Cholesky; a pivot below `tau_rank` times the largest
/// squared edge means the points are affinely dependent.
pub fn circumsphere<P: AsRef<[f64]>>(points: &[P], tau_rank: f64) -> Result<Sphere> {
    let k = points.len();
    if k < 2 {
        return Err(Error::Invalid("circumsphere needs at least two points".into()));
    }
    let p0 = points[0].as_ref();
    let m = p0.len();
    if points.iter().any(|p| p.as_ref().len() != m) {
        return Err(Error::Invalid("points of mixed dimension".into()));
    }
    if k > m + 1 {
        return Err(Error::Degenerate(format!("{k} points in dimension {m}")));
    }
    let edges: Vec<Vec<f64>> = points[1..]
        .iter()
        .map(|p| p.as_ref().iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    let r = k - 1;
    let mut gram = vec![0.0; r * r];
    let mut rhs = vec![0.0; r];
    for i in 0..r {
        for j in 0..=i {
            let g = dot(&edges[i], &edges[j]);
            gram[i * r + j] = g;
            gram[j * r + i] = g;
        }
        rhs[i] = 0.5 * gram[i * r + i];
    }
    let scale = (0..r).map(|i| gram[i * r + i]).fold(0.0, f64::max);
    if scale == 0.0 {
        if k == 2 {
            return Ok(Sphere {
                center: Point(p0.to_vec()),
                radius: 0.0,
            });
        }
        return Err(Error::Degenerate("coincident points".into()));
    }
    let lambda = cholesky_solve(&mut gram, &mut rhs, r, tau_rank * scale)
        .ok_or_else(|| Error::Degenerate("affinely dependent points".into()))?;
    let mut offset = vec![0.0; m];
    for (l, e) in lambda.iter().zip(&edges) {
        for (o, v) in offset.iter_mut().zip(e) {
            *o += l * v;
        }
    }
    let radius = norm(&offset);
    let center = p0.iter().zip(&offset).map(|(a, b)| a + b).collect();
    Ok(Sphere {
        center: Point(center),
        radius,
    })
}

// In-place Cholesky of an r×r SPD matrix followed by two triangular solves.
// Returns None when a pivot drops below `min_pivot`.
fn cholesky_solve(a: &mut [f64], b: &mut [f64], r: usize, min_pivot: f64) -> Option<Vec<f64>> {
    for j in 0..r {
        let mut d = a[j * r + j];
        for k in 0..j {
            d -= a[j * r + k] * a[j * r + k];
        }
        if d <= min_pivot {
            return None;
        }
        let d = d.sqrt();
        a[j * r + j] = d;
        for i in j + 1..r {
            let mut s = a[i * r + j];
            for k in 0..j {
                s -= a[i * r + k] * a[j * r + k];
            }
            a[i * r + j] = s / d;
        }
    }
    for i in 0..r {
        let mut s = b[i];
        for k in 0..i {
            s -= a[i * r + k] * b[k];
        }
        b[i] = s / a[i * r + i];
    }
    for i in (0..r).rev() {
        let mut s = b[i];
        for k in i + 1..r {
            s -= a[k * r + i] * b[k];
        }
        b[i] = s / a[i * r + i];
    }
    Some(b.to_vec())
}

const ANGLE_SLACK: f64 = 1e-12;

/// Chord length on the unit sphere subtended by angle `theta`.
pub fn chord_from_angle(theta: f64) -> Result<f64> {
    if !(-ANGLE_SLACK..=PI + ANGLE_SLACK).contains(&theta) {
        return Err(Error::OutOfRange(format!("angle {theta} not in [0, π]")));
    }
    Ok(2.0 * (theta.clamp(0.0, PI) / 2.0).sin())
}

/// Inverse of [`chord_from_angle`] on `[0, 2]`.
pub fn angle_from_chord(chord: f64) -> Result<f64> {
    if !(-ANGLE_SLACK..=2.0 + ANGLE_SLACK).contains(&chord) {
        return Err(Error::OutOfRange(format!("chord {chord} not in [0, 2]")));
    }
    Ok(2.0 * (chord.clamp(0.0, 2.0) / 2.0).asin())
}

/// Euclidean and angular edge length of the regular triangulation of Sⁿ
/// obtained from an inscribed regular (n+1)-simplex.
pub fn regular_edge_lengths(n: usize) -> Result<(f64, f64)> {
    if n < 1 {
        return Err(Error::OutOfRange("sphere dimension must be at least 1".into()));
    }
    let n = n as f64;
    let d_eu = (2.0 * (n + 2.0) / (n + 1.0)).sqrt();
    let d_a = 2.0 * ((n + 2.0) / (2.0 * (n + 1.0))).sqrt().asin();
    Ok((d_eu, d_a))
}

/// Lower bound √((n+2)/n) on the largest distance between neighbors of a map
/// out of Sⁿ into a contractible space.
pub fn thm2_bound(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::OutOfRange("sphere dimension must be at least 1".into()));
    }
    let n = n as f64;
    Ok(((n + 2.0) / n).sqrt())
}

/// Left-hand side `2·asin(√((n+1)/(2n))·sin circ)` of the Jung–Dekster
/// inequality on Sⁿ; it never exceeds the angular diameter of a set with
/// angular circumradius `circ_a`.
pub fn dekster_lhs(n: usize, circ_a: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::OutOfRange("Dekster bound is stated for n ≥ 2".into()));
    }
    if !(-ANGLE_SLACK..=FRAC_PI_2 + ANGLE_SLACK).contains(&circ_a) {
        return Err(Error::OutOfRange(format!("circumradius {circ_a} not in [0, π/2]")));
    }
    let n = n as f64;
    let arg = ((n + 1.0) / (2.0 * n)).sqrt() * circ_a.clamp(0.0, FRAC_PI_2).sin();
    if arg > 1.0 + 1e-12 {
        return Err(Error::OutOfRange(format!("arcsin argument {arg} exceeds 1")));
    }
    Ok(2.0 * arg.min(1.0).asin())
}

/// Largest pairwise angle of a set of unit vectors.
pub fn angular_diameter<P: AsRef<[f64]>>(points: &[P]) -> f64 {
    let mut d = 0.0f64;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            d = d.max(angle_between(points[i].as_ref(), points[j].as_ref()));
        }
    }
    d
}

pub fn angular_pair<P: AsRef<[f64]>>(points: &[P], tol: &Tolerances) -> Result<AngularPair> {
    let (_, circ_a) = min_enclosing_ball_angular(points, tol)?;
    Ok(AngularPair {
        diam_a: angular_diameter(points),
        circ_a,
    })
}

fn max_angle_from<P: AsRef<[f64]>>(center: &[f64], points: &[P]) -> f64 {
    points
        .iter()
        .map(|p| angle_between(center, p.as_ref()))
        .fold(0.0, f64::max)
}

fn normalized(v: &[f64]) -> Option<Vec<f64>> {
    let n = norm(v);
    (n > 1e-12).then(|| v.iter().map(|x| x / n).collect())
}

// Enumeration stops adding subsets past this count; the local search still runs.
const MAX_SUBSETS: usize = 200_000;

/// Smallest angular ball on Sⁿ containing all `points`.
///
/// Candidate centers are the spherical circumcenters of every subset of at
/// most n+1 points (while the subset count stays moderate), followed by a
/// simplex-search refinement of the best candidate in tangent coordinates.
pub fn min_enclosing_ball_angular<P: AsRef<[f64]>>(points: &[P], tol: &Tolerances) -> Result<(Point, f64)> {
    let first = points
        .first()
        .ok_or_else(|| Error::Invalid("empty point set".into()))?
        .as_ref();
    let d = first.len();
    for p in points {
        let p = p.as_ref();
        if p.len() != d {
            return Err(Error::Invalid("points of mixed dimension".into()));
        }
        if (norm(p) - 1.0).abs() > tol.unit {
            return Err(Error::Invalid("point is not on the unit sphere".into()));
        }
    }
    if points.len() == 1 {
        return Ok((Point(first.to_vec()), 0.0));
    }
    if !in_closed_hemisphere(points, tol.ball) {
        return Err(Error::NotInHemisphere);
    }

    let mut best_center: Option<Vec<f64>> = None;
    let mut best_radius = f64::INFINITY;
    let consider = |c: Vec<f64>, best_center: &mut Option<Vec<f64>>, best_radius: &mut f64| {
        let r = max_angle_from(&c, points);
        if r < *best_radius {
            *best_radius = r;
            *best_center = Some(c);
        }
    };

    let max_size = d.min(points.len());
    let mut budget = MAX_SUBSETS;
    for size in 1..=max_size {
        let mut subset: Vec<usize> = (0..size).collect();
        loop {
            if budget == 0 {
                break;
            }
            budget -= 1;
            let chosen: Vec<&[f64]> = subset.iter().map(|&i| points[i].as_ref()).collect();
            for c in spherical_circumcenters(&chosen, tol) {
                consider(c, &mut best_center, &mut best_radius);
            }
            if !next_combination(&mut subset, points.len()) {
                break;
            }
        }
    }

    let centroid: Vec<f64> = (0..d)
        .map(|k| points.iter().map(|p| p.as_ref()[k]).sum::<f64>())
        .collect();
    if let Some(c) = normalized(&centroid) {
        consider(c, &mut best_center, &mut best_radius);
    }
    let start = best_center.clone().unwrap_or_else(|| first.to_vec());

    // Refine in an orthonormal tangent frame at the incumbent.
    let frame = tangent_frame(&start);
    let nm = NelderMead::default()
        .with_budget(400 * d)
        .with_step(best_radius.clamp(1e-3, 0.5) * 0.25);
    let m = nm.minimize(
        |t| {
            let mut c = start.clone();
            for (ti, e) in t.iter().zip(&frame) {
                for (ck, ek) in c.iter_mut().zip(e) {
                    *ck += ti * ek;
                }
            }
            match normalized(&c) {
                Some(c) => max_angle_from(&c, points),
                None => f64::INFINITY,
            }
        },
        &vec![0.0; d - 1],
    );
    if m.value < best_radius {
        let mut c = start.clone();
        for (ti, e) in m.x.iter().zip(&frame) {
            for (ck, ek) in c.iter_mut().zip(e) {
                *ck += ti * ek;
            }
        }
        if let Some(c) = normalized(&c) {
            consider(c, &mut best_center, &mut best_radius);
        }
    }

    let center = best_center.ok_or(Error::NotInHemisphere)?;
    Ok((Point(center), best_radius))
}

// Directions equidistant (angularly) from all chosen points.
fn spherical_circumcenters(chosen: &[&[f64]], tol: &Tolerances) -> Vec<Vec<f64>> {
    if chosen.len() == 1 {
        return vec![chosen[0].to_vec()];
    }
    let Ok(s) = circumsphere(chosen, tol.rank) else {
        return Vec::new();
    };
    // For points on the unit sphere the affine circumcenter is the foot of the
    // perpendicular from the origin, so it already points toward the set.
    if let Some(c) = normalized(s.center.coords()) {
        return vec![c];
    }
    // Affine hull through the origin: only a codimension-one span fixes the
    // center up to sign.
    let d = chosen[0].len();
    if chosen.len() + 1 != d {
        return Vec::new();
    }
    let normal = orthogonal_complement_unit(chosen, d);
    match normal {
        Some(nv) => {
            let neg = nv.iter().map(|x| -x).collect();
            vec![nv, neg]
        }
        None => Vec::new(),
    }
}

fn orthogonal_complement_unit(rows: &[&[f64]], d: usize) -> Option<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for r in rows {
        let mut v = r.to_vec();
        for b in &basis {
            let p = dot(&v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
        }
        if let Some(u) = normalized(&v) {
            basis.push(u);
        }
    }
    for k in 0..d {
        let mut v = vec![0.0; d];
        v[k] = 1.0;
        for b in &basis {
            let p = dot(&v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
        }
        if norm(&v) > 1e-6 {
            return normalized(&v);
        }
    }
    None
}

/// Orthonormal basis of the tangent space at unit vector `c`.
pub fn tangent_frame(c: &[f64]) -> Vec<Vec<f64>> {
    let d = c.len();
    let mut basis: Vec<Vec<f64>> = vec![c.to_vec()];
    let mut out = Vec::with_capacity(d.saturating_sub(1));
    for k in 0..d {
        if out.len() + 1 == d {
            break;
        }
        let mut v = vec![0.0; d];
        v[k] = 1.0;
        for b in &basis {
            let p = dot(&v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
        }
        if let Some(u) = normalized(&v).filter(|_| norm(&v) > 1e-6) {
            basis.push(u.clone());
            out.push(u);
        }
    }
    out
}

/// Whether some closed hemisphere contains every point. A nonzero normal can
/// be scaled so one coordinate is ±1, so it suffices to solve the LP
/// `max s  s.t. ⟨c, p⟩ ≥ s, |c_j| ≤ 1, c_k = ±1` for every k and sign.
pub fn in_closed_hemisphere<P: AsRef<[f64]>>(points: &[P], slack: f64) -> bool {
    let d = points[0].as_ref().len();
    for k in 0..d {
        for sign in [1.0, -1.0] {
            let mut lp = Problem::new(OptimizationDirection::Maximize);
            let c: Vec<_> = (0..d)
                .map(|j| {
                    let bounds = if j == k { (sign, sign) } else { (-1.0, 1.0) };
                    lp.add_var(0.0, bounds)
                })
                .collect();
            let s = lp.add_var(1.0, (f64::NEG_INFINITY, 1.0));
            for p in points {
                let mut expr: Vec<_> = c.iter().zip(p.as_ref()).map(|(&v, &x)| (v, x)).collect();
                expr.push((s, -1.0));
                lp.add_constraint(expr, ComparisonOp::Ge, 0.0);
            }
            if let Ok(SolveOutcome::Solution(sol)) = lp.solve() {
                if sol.objective() >= -slack {
                    return true;
                }
            }
        }
    }
    false
}

/// Advance `idx` to the next k-combination of `0..n` in lexicographic order.
pub(crate) fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    if k == 0 {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn circumsphere_right_isoceles() {
        let s = circumsphere(&[[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]], 1e-9).unwrap();
        assert_abs_diff_eq!(s.center.coords()[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.center.coords()[1], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.radius, 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn circumsphere_pair_and_coincident_pair() {
        let s = circumsphere(&[[0.0, 0.0], [2.0, 0.0]], 1e-9).unwrap();
        assert_eq!(s.center.coords(), &[1.0, 0.0]);
        assert_eq!(s.radius, 1.0);
        let s = circumsphere(&[[3.0, 4.0], [3.0, 4.0]], 1e-9).unwrap();
        assert_eq!(s.radius, 0.0);
    }

    #[test]
    fn circumsphere_collinear_is_degenerate() {
        let r = circumsphere(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], 1e-9);
        assert!(matches!(r, Err(Error::Degenerate(_))));
        let r = circumsphere(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]], 1e-9);
        assert!(matches!(r, Err(Error::Degenerate(_))));
    }

    #[test]
    fn circumsphere_triangle_in_space_is_centered_in_its_plane() {
        let pts = [[1.0, 0.0, 5.0], [0.0, 1.0, 5.0], [-1.0, 0.0, 5.0]];
        let s = circumsphere(&pts, 1e-9).unwrap();
        assert_abs_diff_eq!(s.center.coords()[2], 5.0, epsilon = 1e-12);
        for p in &pts {
            assert_abs_diff_eq!(dist(s.center.coords(), p), s.radius, epsilon = 1e-12);
        }
    }

    #[test]
    fn chord_angle_examples() {
        assert_abs_diff_eq!(chord_from_angle(PI).unwrap(), 2.0, epsilon = 1e-15);
        assert_eq!(chord_from_angle(0.0).unwrap(), 0.0);
        let d1a = 2.0 * (0.75f64).sqrt().asin();
        assert_abs_diff_eq!(chord_from_angle(d1a).unwrap(), 3f64.sqrt(), epsilon = 1e-12);
        assert!(chord_from_angle(-0.1).is_err());
        assert!(chord_from_angle(3.5).is_err());
        assert!(angle_from_chord(2.1).is_err());
    }

    #[test]
    fn edge_lengths_and_bound() {
        let (e1, _) = regular_edge_lengths(1).unwrap();
        assert_abs_diff_eq!(e1, 3f64.sqrt(), epsilon = 1e-12);
        let (e2, _) = regular_edge_lengths(2).unwrap();
        assert_abs_diff_eq!(e2, (8.0f64 / 3.0).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(thm2_bound(1).unwrap(), 3f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(thm2_bound(2).unwrap(), 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(thm2_bound(10).unwrap(), 1.2f64.sqrt(), epsilon = 1e-15);
        assert!(thm2_bound(0).is_err());
        assert!(regular_edge_lengths(0).is_err());
    }

    #[test]
    fn dekster_examples_and_range() {
        assert_eq!(dekster_lhs(2, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(dekster_lhs(2, FRAC_PI_2).unwrap(), 2.0 * PI / 3.0, epsilon = 1e-12);
        assert!(dekster_lhs(1, 0.3).is_err());
        assert!(dekster_lhs(3, 2.0).is_err());
    }

    #[test]
    fn enclosing_ball_single_and_pair() {
        let tol = Tolerances::default();
        let (c, r) = min_enclosing_ball_angular(&[[0.0, 0.0, 1.0]], &tol).unwrap();
        assert_eq!(c.coords(), &[0.0, 0.0, 1.0]);
        assert_eq!(r, 0.0);

        let a = [1.0, 0.0, 0.0];
        let b = [0.0, 1.0, 0.0];
        let (c, r) = min_enclosing_ball_angular(&[a, b], &tol).unwrap();
        let h = 0.5f64.sqrt();
        assert_abs_diff_eq!(c.coords()[0], h, epsilon = 1e-9);
        assert_abs_diff_eq!(c.coords()[1], h, epsilon = 1e-9);
        assert_abs_diff_eq!(r, PI / 4.0, epsilon = 1e-9);
    }

    #[test]
    fn enclosing_ball_great_circle_triangle() {
        // Three points 120° apart on the equator: closed hemisphere only.
        let tol = Tolerances::default();
        let pts: Vec<[f64; 3]> = (0..3)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / 3.0;
                [t.cos(), t.sin(), 0.0]
            })
            .collect();
        let (_, r) = min_enclosing_ball_angular(&pts, &tol).unwrap();
        assert_abs_diff_eq!(r, FRAC_PI_2, epsilon = 1e-9);
    }

    #[test]
    fn enclosing_ball_rejects_spread_sets() {
        let tol = Tolerances::default();
        let pts = [
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
        ];
        assert!(matches!(
            min_enclosing_ball_angular(&pts, &tol),
            Err(Error::NotInHemisphere)
        ));
    }

    #[test]
    fn combinations_enumerate_binomial() {
        let mut idx = vec![0, 1, 2];
        let mut count = 1;
        while next_combination(&mut idx, 6) {
            count += 1;
        }
        assert_eq!(count, 20);
    }

    #[test]
    fn point_rejects_non_finite() {
        assert!(Point::new(vec![]).is_err());
        assert!(Point::new(vec![f64::NAN]).is_err());
        let p: Result<Point, _> = serde_json::from_str("[1.0, 2.0]");
        assert_eq!(p.unwrap().coords(), &[1.0, 2.0]);
    }
}
