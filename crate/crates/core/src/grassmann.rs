//! Geometry of the Grassmannian G(D, d) and of the product space G(D, d)^K.
//!
//! A [`Subspace`] is stored as a D×d matrix with orthonormal columns. All
//! distances are built on principal angles, computed from the cosine matrix
//! `BᵀC` and the sine matrix `(I − BBᵀ)C` together so that both small and
//! near-orthogonal angles keep full precision.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum entry of `|BᵀB − I|` accepted for a basis.
pub const ORTHONORMAL_TOL: f64 = 1e-10;
/// Relative singular-value threshold for rank and intersection decisions.
pub const RANK_TOL: f64 = 1e-8;
/// Principal angles this close to π/2 make the connecting geodesic ambiguous.
pub const CUT_LOCUS_TOL: f64 = 1e-9;
/// Largest K for which permutation matching is enumerated exhaustively.
pub const MAX_MATCHING_K: usize = 10;

/// A linear subspace of R^D given by an orthonormal basis.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SubspaceRepr", into = "SubspaceRepr")]
pub struct Subspace {
    basis: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubspaceRepr {
    ambient_dim: usize,
    dim: usize,
    /// Column-major basis entries.
    basis: Vec<f64>,
}

impl TryFrom<SubspaceRepr> for Subspace {
    type Error = Error;

    fn try_from(r: SubspaceRepr) -> Result<Self> {
        if r.basis.len() != r.ambient_dim * r.dim {
            return Err(Error::Shape(format!(
                "basis has {} entries, expected {}x{}",
                r.basis.len(),
                r.ambient_dim,
                r.dim
            )));
        }
        Subspace::from_basis(DMatrix::from_column_slice(r.ambient_dim, r.dim, &r.basis))
    }
}

impl From<Subspace> for SubspaceRepr {
    fn from(s: Subspace) -> Self {
        SubspaceRepr {
            ambient_dim: s.ambient_dim(),
            dim: s.dim(),
            basis: s.basis.as_slice().to_vec(),
        }
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(D={}, d={}, basis={:?})", self.ambient_dim(), self.dim(), self.basis.as_slice())
    }
}

fn orthonormality_defect(basis: &DMatrix<f64>) -> f64 {
    let gram = basis.transpose() * basis;
    let mut worst: f64 = 0.0;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - target).abs());
        }
    }
    worst
}

impl Subspace {
    /// Wraps a basis that must already be orthonormal within [`ORTHONORMAL_TOL`].
    pub fn from_basis(basis: DMatrix<f64>) -> Result<Self> {
        let (ambient, dim) = basis.shape();
        if dim == 0 || dim > ambient {
            return Err(Error::Shape(format!("need 1 <= d <= D, got d={dim}, D={ambient}")));
        }
        let defect = orthonormality_defect(&basis);
        if !(defect <= ORTHONORMAL_TOL) {
            return Err(Error::Shape(format!("basis is not orthonormal (defect {defect:.3e})")));
        }
        Ok(Subspace { basis })
    }

    /// Orthonormalizes the columns of `spanning`; they must be linearly independent.
    pub fn from_spanning(spanning: DMatrix<f64>) -> Result<Self> {
        let (ambient, dim) = spanning.shape();
        if dim == 0 || dim > ambient {
            return Err(Error::Shape(format!("need 1 <= d <= D, got d={dim}, D={ambient}")));
        }
        let (u, sv, _) = thin_svd(&spanning);
        let top = sv[0];
        if !(top > 0.0) || sv[dim - 1] <= RANK_TOL * top {
            return Err(Error::Rank(format!(
                "spanning set of {dim} vectors has numerical rank below {dim}"
            )));
        }
        Ok(Subspace::from_drifting(u))
    }

    /// The line spanned by `direction`.
    pub fn line(direction: &[f64]) -> Result<Self> {
        Self::from_spanning(DMatrix::from_column_slice(direction.len(), 1, direction))
    }

    /// The line in R² at planar angle `angle` (radians) from the x-axis.
    pub fn line_2d(angle: f64) -> Self {
        Subspace { basis: DMatrix::from_column_slice(2, 1, &[angle.cos(), angle.sin()]) }
    }

    /// Span of the given coordinate axes (0-based) of R^D.
    pub fn coordinate(ambient_dim: usize, axes: &[usize]) -> Result<Self> {
        let mut basis = DMatrix::zeros(ambient_dim, axes.len());
        for (col, &axis) in axes.iter().enumerate() {
            if axis >= ambient_dim {
                return Err(Error::Shape(format!("axis {axis} outside R^{ambient_dim}")));
            }
            basis[(axis, col)] = 1.0;
        }
        Self::from_basis(basis)
    }

    /// Re-orthonormalizes `basis` when it has drifted past [`ORTHONORMAL_TOL`].
    fn from_drifting(basis: DMatrix<f64>) -> Self {
        if orthonormality_defect(&basis) <= ORTHONORMAL_TOL {
            Subspace { basis }
        } else {
            let dim = basis.ncols();
            let q = basis.qr().q();
            Subspace { basis: q.columns(0, dim).into_owned() }
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Orthogonal projector `BBᵀ`.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    /// Orthonormal basis of the orthogonal complement, a D×(D−d) matrix.
    pub fn complement_basis(&self) -> DMatrix<f64> {
        let ambient = self.ambient_dim();
        let dim = self.dim();
        let residual = DMatrix::identity(ambient, ambient) - self.projector();
        if dim == ambient {
            return DMatrix::zeros(ambient, 0);
        }
        // The residual projector has eigenvalue 1 on the complement and 0 on the span.
        let eig = residual.symmetric_eigen();
        let mut order: Vec<usize> = (0..ambient).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let mut comp = DMatrix::zeros(ambient, ambient - dim);
        for (col, &idx) in order.iter().take(ambient - dim).enumerate() {
            comp.set_column(col, &eig.eigenvectors.column(idx));
        }
        comp.qr().q().columns(0, ambient - dim).into_owned()
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.ambient_dim() {
            return Err(Error::Shape(format!(
                "point has length {}, subspace lives in R^{}",
                x.len(),
                self.ambient_dim()
            )));
        }
        Ok(())
    }

    /// Orthogonal projection `BBᵀx`.
    pub fn project(&self, x: &[f64]) -> Result<DVector<f64>> {
        self.check_point(x)?;
        let x = DVector::from_column_slice(x);
        Ok(&self.basis * (self.basis.transpose() * x))
    }

    /// Euclidean distance from `x` to the subspace.
    pub fn dist_point(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        Ok(self.dist_point_unchecked(x))
    }

    /// Distance without the length check; `x` must have length D.
    #[inline]
    pub(crate) fn dist_point_unchecked(&self, x: &[f64]) -> f64 {
        let ambient = self.ambient_dim();
        let mut norm2 = 0.0;
        let mut proj2 = 0.0;
        for &v in x {
            norm2 += v * v;
        }
        for col in 0..self.dim() {
            let b = &self.basis.as_slice()[col * ambient..(col + 1) * ambient];
            let c: f64 = b.iter().zip(x).map(|(a, b)| a * b).sum();
            proj2 += c * c;
        }
        let diff = norm2 - proj2;
        // Cancellation guard: recompute the residual explicitly when it is tiny.
        if diff > 1e-6 * norm2 {
            diff.sqrt()
        } else {
            let mut r = x.to_vec();
            for col in 0..self.dim() {
                let b = &self.basis.as_slice()[col * ambient..(col + 1) * ambient];
                let c: f64 = b.iter().zip(x).map(|(a, b)| a * b).sum();
                for (ri, bi) in r.iter_mut().zip(b) {
                    *ri -= c * bi;
                }
            }
            r.iter().map(|v| v * v).sum::<f64>().sqrt()
        }
    }

    /// Point on the geodesic leaving this subspace with horizontal tangent
    /// `tangent` (D×d, `Bᵀ·tangent = 0`) at time `t`. Arc length is
    /// `t·‖tangent‖_F` while that stays below the injectivity radius.
    pub fn exp(&self, tangent: &DMatrix<f64>, t: f64) -> Result<Subspace> {
        if tangent.shape() != self.basis.shape() {
            return Err(Error::Shape("tangent shape differs from basis shape".into()));
        }
        let horizontal = tangent - &self.basis * (self.basis.transpose() * tangent);
        let (u, sigma, v) = thin_svd(&horizontal);
        let start = &self.basis * v;
        Ok(Subspace::from_drifting(rotate_columns(&start, &u, &sigma, t)))
    }

    /// Plain-text form: `D d` on the first line, then column-major entries at
    /// 17 significant digits, one per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.ambient_dim(), self.dim());
        for v in self.basis.as_slice() {
            out.push_str(&format!("{v:.16e}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let mut next_usize = |what: &str| -> Result<usize> {
            tokens
                .next()
                .ok_or_else(|| Error::Parse(format!("missing {what}")))?
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("{what}: {e}")))
        };
        let ambient = next_usize("ambient dimension")?;
        let dim = next_usize("dimension")?;
        let entries: Vec<f64> = text
            .split_whitespace()
            .skip(2)
            .map(|t| t.parse::<f64>().map_err(|e| Error::Parse(format!("basis entry {t:?}: {e}"))))
            .collect::<Result<_>>()?;
        SubspaceRepr { ambient_dim: ambient, dim, basis: entries }.try_into()
    }
}

/// Columns `start_i·cos(σ_i t) + dir_i·sin(σ_i t)`.
fn rotate_columns(start: &DMatrix<f64>, dirs: &DMatrix<f64>, sigma: &[f64], t: f64) -> DMatrix<f64> {
    let mut out = start.clone();
    for (i, &s) in sigma.iter().enumerate() {
        let (sn, cs) = (s * t).sin_cos();
        let col = start.column(i) * cs + dirs.column(i) * sn;
        out.set_column(i, &col);
    }
    out
}

/// Thin SVD `m = U·diag(σ)·Vᵀ` of a tall matrix by one-sided Jacobi
/// rotations, σ descending. Accurate for rank-deficient inputs, where the
/// factors from nalgebra's bidiagonal SVD can be off by ~1e-2. Columns of
/// `U` for zero σ are an orthonormal completion.
pub(crate) fn thin_svd(m: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let (rows, cols) = m.shape();
    debug_assert!(rows >= cols);
    let mut a = m.clone();
    let mut v = DMatrix::<f64>::identity(cols, cols);
    for _sweep in 0..60 {
        let mut rotated = false;
        for i in 0..cols {
            for j in i + 1..cols {
                let alpha = a.column(i).norm_squared();
                let beta = a.column(j).norm_squared();
                let gamma = a.column(i).dot(&a.column(j));
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for mat in [&mut a, &mut v] {
                    let ci = mat.column(i).into_owned();
                    let cj = mat.column(j).into_owned();
                    mat.set_column(i, &(&ci * c - &cj * s));
                    mat.set_column(j, &(&ci * s + &cj * c));
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..cols).collect();
    let norms: Vec<f64> = (0..cols).map(|i| a.column(i).norm()).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let top = norms.iter().copied().fold(0.0, f64::max);
    let mut u = DMatrix::zeros(rows, cols);
    let mut vs = DMatrix::zeros(cols, cols);
    let mut sigma = Vec::with_capacity(cols);
    let mut axis = 0;
    for (out, &src) in order.iter().enumerate() {
        vs.set_column(out, &v.column(src));
        sigma.push(norms[src]);
        if norms[src] > f64::EPSILON * top.max(f64::MIN_POSITIVE) * rows as f64 {
            u.set_column(out, &(a.column(src) / norms[src]));
            continue;
        }
        // complete with the first axis not yet spanned
        loop {
            let mut e = DVector::zeros(rows);
            e[axis] = 1.0;
            axis += 1;
            for k in 0..out {
                let proj = u.column(k).dot(&e);
                e -= u.column(k) * proj;
            }
            let n = e.norm();
            if n > 0.5 {
                u.set_column(out, &(e / n));
                break;
            }
        }
    }
    (u, sigma, vs)
}

/// An ordered K-tuple of subspaces sharing (D, d).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Subspace>", into = "Vec<Subspace>")]
pub struct SubspaceTuple {
    subspaces: Vec<Subspace>,
}

impl TryFrom<Vec<Subspace>> for SubspaceTuple {
    type Error = Error;
    fn try_from(v: Vec<Subspace>) -> Result<Self> {
        SubspaceTuple::new(v)
    }
}

impl From<SubspaceTuple> for Vec<Subspace> {
    fn from(t: SubspaceTuple) -> Self {
        t.subspaces
    }
}

impl SubspaceTuple {
    pub fn new(subspaces: Vec<Subspace>) -> Result<Self> {
        let first = subspaces
            .first()
            .ok_or_else(|| Error::Shape("a subspace tuple needs K >= 1".into()))?;
        let shape = (first.ambient_dim(), first.dim());
        if let Some(bad) = subspaces.iter().find(|s| (s.ambient_dim(), s.dim()) != shape) {
            return Err(Error::Shape(format!(
                "tuple mixes G({},{}) with G({},{})",
                shape.0,
                shape.1,
                bad.ambient_dim(),
                bad.dim()
            )));
        }
        Ok(SubspaceTuple { subspaces })
    }

    /// Tuple of lines in R² at the given planar angles.
    pub fn lines_2d(angles: &[f64]) -> Result<Self> {
        Self::new(angles.iter().map(|&a| Subspace::line_2d(a)).collect())
    }

    pub fn k(&self) -> usize {
        self.subspaces.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.subspaces[0].ambient_dim()
    }

    pub fn dim(&self) -> usize {
        self.subspaces[0].dim()
    }

    pub fn subspaces(&self) -> &[Subspace] {
        &self.subspaces
    }

    pub fn get(&self, i: usize) -> &Subspace {
        &self.subspaces[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Subspace> {
        self.subspaces.iter()
    }

    /// The tuple `(self[perm[0]], …, self[perm[K-1]])`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.k() {
            return Err(Error::Shape("permutation length differs from K".into()));
        }
        Self::new(perm.iter().map(|&i| self.subspaces[i].clone()).collect())
    }

    pub fn replace(&self, i: usize, s: Subspace) -> Result<Self> {
        let mut v = self.subspaces.clone();
        v[i] = s;
        Self::new(v)
    }

    fn check_compatible(&self, other: &SubspaceTuple) -> Result<()> {
        if self.k() != other.k() {
            return Err(Error::Shape(format!("K mismatch: {} vs {}", self.k(), other.k())));
        }
        if (self.ambient_dim(), self.dim()) != (other.ambient_dim(), other.dim()) {
            return Err(Error::Shape("tuples live on different Grassmannians".into()));
        }
        Ok(())
    }
}

/// Principal angles in radians, ascending, each within [0, π/2].
#[derive(Clone, Debug, PartialEq)]
pub struct PrincipalAngles(pub Vec<f64>);

impl PrincipalAngles {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn largest(&self) -> f64 {
        *self.0.last().expect("d >= 1")
    }

    pub fn smallest(&self) -> f64 {
        self.0[0]
    }
}

fn check_same_grassmannian(f: &Subspace, g: &Subspace) -> Result<()> {
    if f.ambient_dim() != g.ambient_dim() || f.dim() != g.dim() {
        return Err(Error::Shape(format!(
            "G({},{}) vs G({},{})",
            f.ambient_dim(),
            f.dim(),
            g.ambient_dim(),
            g.dim()
        )));
    }
    Ok(())
}

/// Principal angles between `f` and `g`.
///
/// Cosines come from the singular values of `F ᵀG` and sines from those of
/// `(I − FFᵀ)G`; pairing them (cosines descending, sines ascending) and taking
/// `atan2` gives the same angles as a clamped arccos but without losing
/// precision near 0.
pub fn principal_angles(f: &Subspace, g: &Subspace) -> Result<PrincipalAngles> {
    check_same_grassmannian(f, g)?;
    // a fixed argument order makes the result exactly symmetric
    let lexicographic = f.basis.iter().zip(g.basis.iter()).map(|(a, b)| a.total_cmp(b)).find(|o| o.is_ne());
    let (f, g) = if lexicographic == Some(std::cmp::Ordering::Greater) { (g, f) } else { (f, g) };
    let cross = f.basis.transpose() * &g.basis;
    let (_, cosines, _) = thin_svd(&cross);
    let residual = &g.basis - &f.basis * &cross;
    let (_, mut sines, _) = thin_svd(&residual);
    sines.sort_by(f64::total_cmp);
    let mut cos_sorted: Vec<f64> = cosines.iter().map(|c| c.clamp(0.0, 1.0)).collect();
    cos_sorted.sort_by(|a, b| b.total_cmp(a));
    let mut angles: Vec<f64> = cos_sorted
        .iter()
        .zip(&sines)
        .map(|(&c, &s)| s.clamp(0.0, 1.0).atan2(c).clamp(0.0, FRAC_PI_2))
        .collect();
    angles.sort_by(f64::total_cmp);
    Ok(PrincipalAngles(angles))
}

/// Geodesic distance `sqrt(Σ θ_i²)`.
pub fn dist_grassmann(f: &Subspace, g: &Subspace) -> Result<f64> {
    let angles = principal_angles(f, g)?;
    Ok(angles.0.iter().map(|a| a * a).sum::<f64>().sqrt())
}

/// The l∞ product distance on G(D, d)^K.
pub fn dist_tuple(a: &SubspaceTuple, b: &SubspaceTuple) -> Result<f64> {
    a.check_compatible(b)?;
    let mut worst: f64 = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        worst = worst.max(dist_grassmann(x, y)?);
    }
    Ok(worst)
}

/// Rearranges `perm` into the next permutation in lexicographic order.
fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Distance between unordered tuples: the minimum over permutations `π` of
/// `dist_tuple((a[π(0)], …), b)`. Returns the lexicographically first
/// minimizing permutation (0-based).
pub fn recovery_distance(a: &SubspaceTuple, b: &SubspaceTuple) -> Result<(f64, Vec<usize>)> {
    a.check_compatible(b)?;
    let k = a.k();
    if k > MAX_MATCHING_K {
        return Err(Error::Capability(format!(
            "exhaustive matching supports K <= {MAX_MATCHING_K}, got {k}"
        )));
    }
    // Pairwise distances once, then K! cheap maxima.
    let mut table = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            table[i * k + j] = dist_grassmann(a.get(i), b.get(j))?;
        }
    }
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = f64::INFINITY;
    let mut best_perm = perm.clone();
    loop {
        let value = perm
            .iter()
            .enumerate()
            .map(|(slot, &src)| table[src * k + slot])
            .fold(0.0_f64, f64::max);
        if value < best {
            best = value;
            best_perm.copy_from_slice(&perm);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok((best, best_perm))
}

/// Arc-length parametrized geodesic between two subspaces.
#[derive(Clone, Debug)]
pub struct Geodesic {
    start: DMatrix<f64>,
    directions: DMatrix<f64>,
    /// Principal angles, so that the endpoint is reached at s = 1.
    angles: Vec<f64>,
    length: f64,
    origin: Subspace,
}

impl Geodesic {
    /// Builds the geodesic from `f` to `g`; fails when some principal angle
    /// is within [`CUT_LOCUS_TOL`] of π/2.
    pub fn between(f: &Subspace, g: &Subspace) -> Result<Self> {
        check_same_grassmannian(f, g)?;
        let cross = f.basis.transpose() * &g.basis;
        let largest = principal_angles(f, g)?.largest();
        if FRAC_PI_2 - largest < CUT_LOCUS_TOL {
            return Err(Error::DegenerateGeodesic { angle: largest, tol: CUT_LOCUS_TOL });
        }
        let inv = cross
            .clone()
            .try_inverse()
            .ok_or(Error::DegenerateGeodesic { angle: largest, tol: CUT_LOCUS_TOL })?;
        // H = (I − FFᵀ) G (FᵀG)⁻¹ = U tan(Θ) Vᵀ
        let h = (&g.basis - &f.basis * &cross) * inv;
        let (u, sigma, v) = thin_svd(&h);
        let angles: Vec<f64> = sigma.iter().map(|s| s.atan()).collect();
        let length = angles.iter().map(|a| a * a).sum::<f64>().sqrt();
        Ok(Geodesic {
            start: &f.basis * v,
            directions: u,
            angles,
            length,
            origin: f.clone(),
        })
    }

    /// Total length, equal to `dist_grassmann(f, g)`.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// The subspace at arc length `t`; `t` may exceed the length to
    /// extrapolate along the same great circle.
    pub fn at(&self, t: f64) -> Subspace {
        if self.length == 0.0 {
            return self.origin.clone();
        }
        let s = t / self.length;
        Subspace::from_drifting(rotate_columns(&self.start, &self.directions, &self.angles, s))
    }
}

/// `geodesic(F, G, t)` for `t ∈ [0, dist_grassmann(F, G)]`.
pub fn geodesic(f: &Subspace, g: &Subspace, t: f64) -> Result<Subspace> {
    let path = Geodesic::between(f, g)?;
    let slack = 1e-12 * (1.0 + path.length());
    if !(t >= -slack && t <= path.length() + slack) {
        return Err(Error::Domain(format!("t = {t} outside [0, {}]", path.length())));
    }
    Ok(path.at(t.clamp(0.0, path.length())))
}

/// Orthonormal principal vectors of `of` relative to `other`, with the sine
/// of each angle, ordered by ascending angle.
fn principal_vectors_by_sine(of: &Subspace, other: &Subspace) -> (DMatrix<f64>, Vec<f64>) {
    let residual = &of.basis - &other.basis * (other.basis.transpose() * &of.basis);
    let (_, sines, v) = thin_svd(&residual);
    let vectors = &of.basis * v;
    // SVD sorts descending; flip so the smallest angle comes first.
    let d = sines.len();
    let mut cols = DMatrix::zeros(of.ambient_dim(), d);
    let mut ordered = Vec::with_capacity(d);
    for (out, src) in (0..d).rev().enumerate() {
        cols.set_column(out, &vectors.column(src));
        ordered.push(sines[src]);
    }
    (cols, ordered)
}

/// Dimension of `f ∩ g`, decided with threshold [`RANK_TOL`].
pub fn intersection_dim(f: &Subspace, g: &Subspace) -> Result<usize> {
    if f.ambient_dim() != g.ambient_dim() {
        return Err(Error::Shape("subspaces live in different ambient spaces".into()));
    }
    let (_, sines) = principal_vectors_by_sine(f, g);
    Ok(sines.iter().filter(|&&s| s < RANK_TOL).count())
}

/// `L* ⊖ L = L* ∩ (L ∩ L*)^⊥`; `None` when the result is {0}.
///
/// `lstar` and `l` may have different dimensions but must share D.
pub fn orthogonal_subtraction(lstar: &Subspace, l: &Subspace) -> Result<Option<Subspace>> {
    if lstar.ambient_dim() != l.ambient_dim() {
        return Err(Error::Shape("subspaces live in different ambient spaces".into()));
    }
    let (vectors, sines) = principal_vectors_by_sine(lstar, l);
    let shared = sines.iter().filter(|&&s| s < RANK_TOL).count();
    let rest = lstar.dim() - shared;
    if rest == 0 {
        return Ok(None);
    }
    let basis = vectors.columns(shared, rest).into_owned();
    Ok(Some(Subspace::from_drifting(basis)))
}

/// The `d*`-th largest principal angle, `d* = min(d, D − d)`: the smallest
/// angle that is generically nonzero.
pub fn theta_dstar(f: &Subspace, g: &Subspace) -> Result<f64> {
    let angles = principal_angles(f, g)?;
    let d = f.dim();
    let dstar = d.min(f.ambient_dim() - d);
    if dstar == 0 {
        return Ok(0.0);
    }
    Ok(angles.0[d - dstar])
}

/// A draw from the rotation-invariant distribution on G(D, d).
pub fn random_subspace<R: Rng + ?Sized>(ambient_dim: usize, dim: usize, rng: &mut R) -> Result<Subspace> {
    if dim == 0 || dim > ambient_dim {
        return Err(Error::Shape(format!("need 1 <= d <= D, got d={dim}, D={ambient_dim}")));
    }
    loop {
        let gauss = DMatrix::from_fn(ambient_dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        if let Ok(s) = Subspace::from_spanning(gauss) {
            return Ok(s);
        }
    }
}

/// `K` independent draws from the uniform distribution on G(D, d).
pub fn random_tuple<R: Rng + ?Sized>(k: usize, ambient_dim: usize, dim: usize, rng: &mut R) -> Result<SubspaceTuple> {
    SubspaceTuple::new((0..k).map(|_| random_subspace(ambient_dim, dim, rng)).collect::<Result<_>>()?)
}

/// Gaussian horizontal tangent at `l` with unit Frobenius norm, or `None`
/// when the tangent space is trivial (d = D).
pub fn random_unit_tangent<R: Rng + ?Sized>(l: &Subspace, rng: &mut R) -> Option<DMatrix<f64>> {
    if l.dim() == l.ambient_dim() {
        return None;
    }
    for _ in 0..100 {
        let gauss = DMatrix::from_fn(l.ambient_dim(), l.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
        let horizontal = &gauss - &l.basis * (l.basis.transpose() * &gauss);
        let norm = horizontal.norm();
        if norm > 1e-12 {
            return Some(horizontal / norm);
        }
    }
    None
}
