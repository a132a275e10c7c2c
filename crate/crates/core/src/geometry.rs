//! Kendall pre-shape space primitives.
//!
//! A pointset becomes a *pre-shape* by removing translation (centering) and
//! scale (normalizing the centroid size to a fixed radius `rho`). Pre-shapes
//! live on a hypersphere inside the centered subspace of `R^{T·D}`; rotation
//! is the remaining similarity and is handled by explicit alignment. This
//! module provides the projections, the sphere exponential map, optimal
//! rotations, and generalized Procrustes alignment of whole collections.

use nalgebra::{DMatrix, DVector, SVD};

use crate::{convert, Error, Result, Scalar};

/// Relative tolerance for the centering and norm invariants of [`PreShape`].
pub const PRESHAPE_TOL: f64 = 1e-9;

/// Centered sizes below this count as degenerate.
pub const DEGENERATE_SIZE: f64 = 1e-12;

/// An ordered list of points in `R^D`, one point per matrix row.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet<T: Scalar> {
    points: DMatrix<T>,
}

impl<T: Scalar> PointSet<T> {
    /// Wrap a `T_points x D` matrix of coordinates.
    pub fn new(points: DMatrix<T>) -> Result<Self> {
        if points.nrows() == 0 {
            return Err(Error::InvalidInput("pointset has no points".into()));
        }
        if points.ncols() < 2 {
            return Err(Error::InvalidInput(format!(
                "pointset dimension must be >= 2, got {}",
                points.ncols()
            )));
        }
        Ok(Self { points })
    }

    /// Build from per-point coordinate rows, checking that all rows share
    /// one dimension.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::InvalidInput("pointset has no points".into()));
        };
        let dim = first.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "point {i} has dimension {}, expected {dim}",
                    r.len()
                )));
            }
        }
        Self::new(DMatrix::from_fn(rows.len(), dim, |t, d| rows[t][d]))
    }

    /// Rebuild from a flattened vector laid out point-major:
    /// `[p0_x, p0_y, ..., p1_x, p1_y, ...]`.
    pub fn from_flat(flat: &DVector<T>, dim: usize) -> Result<Self> {
        if dim == 0 || flat.len() % dim != 0 {
            return Err(Error::InvalidInput(format!(
                "flat length {} is not a multiple of dimension {dim}",
                flat.len()
            )));
        }
        let n = flat.len() / dim;
        Self::new(DMatrix::from_fn(n, dim, |t, d| flat[t * dim + d]))
    }

    pub fn n_points(&self) -> usize {
        self.points.nrows()
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn points(&self) -> &DMatrix<T> {
        &self.points
    }

    /// Coordinates of point `t`.
    pub fn point(&self, t: usize) -> DVector<T> {
        self.points.row(t).transpose()
    }

    pub fn centroid(&self) -> DVector<T> {
        let n = convert::<T>(self.n_points() as f64);
        DVector::from_fn(self.dim(), |d, _| self.points.column(d).sum() / n)
    }

    /// Frobenius size about the centroid.
    pub fn centroid_size(&self) -> T {
        let c = self.centroid();
        let mut s = T::zero();
        for t in 0..self.n_points() {
            for d in 0..self.dim() {
                let r = self.points[(t, d)] - c[d];
                s += r * r;
            }
        }
        s.sqrt()
    }

    /// Point-major flattening into a `T·D` vector.
    pub fn flatten(&self) -> DVector<T> {
        let d = self.dim();
        DVector::from_fn(self.n_points() * d, |i, _| self.points[(i / d, i % d)])
    }
}

/// Subtract the centroid from every point.
pub fn center<T: Scalar>(p: &PointSet<T>) -> PointSet<T> {
    let c = p.centroid();
    let mut m = p.points().clone();
    for t in 0..m.nrows() {
        for d in 0..m.ncols() {
            m[(t, d)] -= c[d];
        }
    }
    PointSet { points: m }
}

/// A centered pointset of fixed Frobenius size `rho`: a point on the
/// pre-shape sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct PreShape<T: Scalar> {
    points: PointSet<T>,
    rho: T,
}

impl<T: Scalar> PreShape<T> {
    pub fn radius(&self) -> T {
        self.rho
    }

    pub fn point_set(&self) -> &PointSet<T> {
        &self.points
    }

    pub fn points(&self) -> &DMatrix<T> {
        self.points.points()
    }

    pub fn n_points(&self) -> usize {
        self.points.n_points()
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    pub fn flatten(&self) -> DVector<T> {
        self.points.flatten()
    }

    /// Whether the centering and norm invariants hold within `tol * rho`.
    pub fn satisfies_invariants(&self, tol: T) -> bool {
        let c = self.points.centroid();
        let n = convert::<T>(self.n_points() as f64);
        // centroid * n = vector sum of the points
        if (c.norm() * n) > tol * self.rho {
            return false;
        }
        let size = self.points.flatten().norm();
        (size - self.rho).abs() <= tol * self.rho
    }
}

/// Center `p` and rescale it to Frobenius size `rho`.
pub fn to_preshape<T: Scalar>(p: &PointSet<T>, rho: T) -> Result<PreShape<T>> {
    if rho <= T::zero() {
        return Err(Error::InvalidInput("rho must be positive".into()));
    }
    let centered = center(p);
    let size = centered.points.norm();
    if size < convert::<T>(DEGENERATE_SIZE) {
        return Err(Error::DegenerateShape(format!(
            "centered size {:?} below {DEGENERATE_SIZE}",
            size.to_f64()
        )));
    }
    let scaled = &centered.points * (rho / size);
    Ok(PreShape {
        points: PointSet { points: scaled },
        rho,
    })
}

/// Re-project an arbitrary flattened configuration back onto the pre-shape
/// sphere of radius `rho`.
pub fn project_to_preshape<T: Scalar>(flat: &DVector<T>, dim: usize, rho: T) -> Result<PreShape<T>> {
    to_preshape(&PointSet::from_flat(flat, dim)?, rho)
}

/// A vector in the tangent space of the pre-shape sphere at `base`:
/// translation-free and orthogonal to the base configuration.
#[derive(Debug, Clone)]
pub struct TangentVector<T: Scalar> {
    components: DVector<T>,
    base: PreShape<T>,
}

impl<T: Scalar> TangentVector<T> {
    /// Flattened `T·D` components.
    pub fn components(&self) -> &DVector<T> {
        &self.components
    }

    pub fn base(&self) -> &PreShape<T> {
        &self.base
    }

    pub fn norm(&self) -> T {
        self.components.norm()
    }
}

/// Remove the translation component of `g` (its per-coordinate mean over
/// points), then the radial component along `u`. Used to restrict gradients
/// and momenta to the pre-shape tangent space.
///
/// Panics if `g` does not have `T·D` entries.
pub fn project_gradient<T: Scalar>(g: &DVector<T>, u: &PreShape<T>) -> TangentVector<T> {
    let (n, d) = (u.n_points(), u.dim());
    assert_eq!(g.len(), n * d, "gradient length must be T*D");
    let mut r = g.clone();
    let nf = convert::<T>(n as f64);
    for j in 0..d {
        let mut mean = T::zero();
        for t in 0..n {
            mean += r[t * d + j];
        }
        mean /= nf;
        for t in 0..n {
            r[t * d + j] -= mean;
        }
    }
    let uf = u.flatten();
    let coef = r.dot(&uf) / (u.radius() * u.radius());
    r.axpy(-coef, &uf, T::one());
    TangentVector {
        components: r,
        base: u.clone(),
    }
}

/// Walk along the great circle from `u` in direction `v`:
/// `cos(|v|/rho)·u + rho·sin(|v|/rho)·v/|v|`. A zero tangent returns `u`.
pub fn exp_map<T: Scalar>(u: &PreShape<T>, v: &TangentVector<T>) -> PreShape<T> {
    let vn = v.components.norm();
    if vn == T::zero() {
        return u.clone();
    }
    let rho = u.radius();
    let theta = vn / rho;
    let mut out = u.flatten() * theta.cos();
    out.axpy(rho * theta.sin() / vn, &v.components, T::one());
    // Tangency keeps the result centered and on the sphere up to rounding;
    // re-project so invariants hold exactly enough for long trajectories.
    project_to_preshape(&out, u.dim(), rho).expect("exp_map image cannot be degenerate")
}

/// Geodesic (great-circle) distance between two pre-shapes of equal radius.
pub fn geodesic_distance<T: Scalar>(a: &PreShape<T>, b: &PreShape<T>) -> T {
    let rho = a.radius();
    let c = (a.flatten().dot(&b.flatten()) / (rho * rho)).clamp(-T::one(), T::one());
    rho * c.acos()
}

/// Proper rotation `R` (det +1) minimizing `sum_t |R s_t - x_t|^2` for
/// centered pointsets of equal cardinality.
///
/// D = 2 is solved in closed form from the cross-covariance angle; higher
/// dimensions go through an SVD with determinant correction. Under exact
/// rotational symmetry the factorization's deterministic output is returned;
/// the minimizer is not unique in that case.
pub fn optimal_rotation<T: Scalar>(
    source: &PointSet<T>,
    target: &PointSet<T>,
) -> Result<DMatrix<T>> {
    if source.n_points() != target.n_points() || source.dim() != target.dim() {
        return Err(Error::InvalidInput(format!(
            "rotation needs matching shapes, got {}x{} vs {}x{}",
            source.n_points(),
            source.dim(),
            target.n_points(),
            target.dim()
        )));
    }
    let d = source.dim();
    let scale = source.points().norm() * target.points().norm();
    let thresh = convert::<T>(1e-12) * scale + convert::<T>(DEGENERATE_SIZE);
    if d == 2 {
        let (s, x) = (source.points(), target.points());
        let mut dot = T::zero();
        let mut cross = T::zero();
        for t in 0..s.nrows() {
            dot += s[(t, 0)] * x[(t, 0)] + s[(t, 1)] * x[(t, 1)];
            cross += s[(t, 0)] * x[(t, 1)] - s[(t, 1)] * x[(t, 0)];
        }
        let mag = (dot * dot + cross * cross).sqrt();
        if mag <= thresh {
            return Err(Error::DegenerateShape(
                "cross-covariance numerically zero".into(),
            ));
        }
        let phi = cross.atan2(dot);
        let (c, sn) = (phi.cos(), phi.sin());
        return Ok(DMatrix::from_row_slice(2, 2, &[c, -sn, sn, c]));
    }
    // H = sum_t s_t x_t'; maximize tr(R H) over SO(D).
    let h = source.points().transpose() * target.points();
    if h.norm() <= thresh {
        return Err(Error::DegenerateShape(
            "cross-covariance numerically zero".into(),
        ));
    }
    let svd = SVD::new(h, true, true);
    let u = svd.u.expect("svd with u requested");
    let vt = svd.v_t.expect("svd with v_t requested");
    let mut r = vt.transpose() * u.transpose();
    if r.determinant() < T::zero() {
        // flip the weakest singular direction to stay in SO(D)
        let mut v = vt.transpose();
        let last = v.ncols() - 1;
        for i in 0..v.nrows() {
            v[(i, last)] = -v[(i, last)];
        }
        r = v * u.transpose();
    }
    Ok(r)
}

/// Apply a rotation to every point (rows `p` become `p Rᵀ`).
pub fn rotate_points<T: Scalar>(points: &DMatrix<T>, r: &DMatrix<T>) -> DMatrix<T> {
    points * r.transpose()
}

/// Rotate `p` onto `reference` with the optimal proper rotation.
pub fn align_rotation<T: Scalar>(p: &PreShape<T>, reference: &PreShape<T>) -> Result<PreShape<T>> {
    let r = optimal_rotation(p.point_set(), reference.point_set())?;
    let rotated = rotate_points(p.points(), &r);
    Ok(PreShape {
        points: PointSet { points: rotated },
        rho: p.rho,
    })
}

const GPA_TOL: f64 = 1e-8;
const GPA_MAX_ITERS: usize = 100;

/// Generalized Procrustes alignment: center and scale every set to `rho`,
/// then iteratively rotate the sets onto their running mean until the mean
/// stops moving. The common frame is anchored to the first set of the
/// majority point count.
///
/// Sets whose point count differs from the majority are centered and scaled
/// only; no point-to-point rotation residual exists for them, and any
/// remaining rotation is absorbed downstream by rotational alignment inside
/// the sampler updates.
pub fn procrustes_align<T: Scalar>(sets: &[PointSet<T>], rho: T) -> Result<Vec<PreShape<T>>> {
    if sets.is_empty() {
        return Ok(Vec::new());
    }
    let dim = sets[0].dim();
    for s in sets {
        if s.dim() != dim {
            return Err(Error::InvalidInput(
                "all sets must share one dimension".into(),
            ));
        }
    }
    // majority point count, ties broken by first appearance
    let mut counts: Vec<(usize, usize)> = Vec::new();
    for s in sets {
        match counts.iter_mut().find(|(t, _)| *t == s.n_points()) {
            Some((_, c)) => *c += 1,
            None => counts.push((s.n_points(), 1)),
        }
    }
    let modal_t = counts.iter().max_by_key(|(_, c)| *c).map(|(t, _)| *t).unwrap();

    let mut out: Vec<Option<PreShape<T>>> = vec![None; sets.len()];
    let mut main: Vec<usize> = Vec::new();
    for (i, s) in sets.iter().enumerate() {
        out[i] = Some(to_preshape(s, rho)?);
        if s.n_points() == modal_t {
            main.push(i);
        }
    }

    if main.len() > 1 {
        let mut mean = out[main[0]].clone().unwrap();
        let tol = convert::<T>(GPA_TOL);
        for _ in 0..GPA_MAX_ITERS {
            for &i in &main {
                let aligned = align_rotation(out[i].as_ref().unwrap(), &mean)?;
                out[i] = Some(aligned);
            }
            let mut acc = DMatrix::<T>::zeros(modal_t, dim);
            for &i in &main {
                acc += out[i].as_ref().unwrap().points();
            }
            acc /= convert::<T>(main.len() as f64);
            let new_mean = to_preshape(&PointSet { points: acc }, rho)?;
            let movement = (new_mean.flatten() - mean.flatten()).norm();
            mean = new_mean;
            if movement < tol {
                break;
            }
        }
        for &i in &main {
            out[i] = Some(align_rotation(out[i].as_ref().unwrap(), &mean)?);
        }
    }
    Ok(out.into_iter().map(Option::unwrap).collect())
}
