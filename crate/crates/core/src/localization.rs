//! Anchor-free localization from the phase-difference matrix.
//!
//! Near synchronization the start-time contribution to the matrix is
//! skew-symmetric and the propagation-delay contribution is symmetric, so the
//! two are separated by taking the skew and symmetric parts. The symmetric part
//! scales to pairwise delays, delays to distances, and classical
//! (Torgerson) multidimensional scaling turns distances into relative
//! coordinates. Estimates are compared with ground truth after an orthogonal
//! Procrustes alignment.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, Matrix3, Matrix3xX};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{PositionSet, SPEED_OF_LIGHT};
use crate::node::PhaseDiffMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LocalizationError {
    #[error("matrix is not symmetric (entry ({row}, {col}) differs from its transpose)")]
    NotSymmetric { row: usize, col: usize },
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("embedding dimension {0} is not supported (1..=3)")]
    Dimension(usize),
    #[error("point sets have {reference} and {estimate} points")]
    SizeMismatch { reference: usize, estimate: usize },
    #[error("reference point set has zero spread; relative error undefined")]
    DegenerateReference,
}

/// Skew-symmetric (start-time) and symmetric (delay) parts of a phase matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecomposedPhases {
    pub skew: DMatrix<f64>,
    pub symmetric: DMatrix<f64>,
}

/// `skew = (m - mᵀ)/2`, `symmetric = (m + mᵀ)/2`.
pub fn decompose(m: &PhaseDiffMatrix) -> DecomposedPhases {
    decompose_matrix(m.matrix())
}

pub fn decompose_matrix(m: &DMatrix<f64>) -> DecomposedPhases {
    let n = m.nrows();
    let mut skew = DMatrix::zeros(n, n);
    let mut symmetric = DMatrix::zeros(n, n);
    for i in 0..n {
        symmetric[(i, i)] = m[(i, i)];
        for j in i + 1..n {
            let (a, b) = (m[(i, j)], m[(j, i)]);
            let k = 0.5 * (a - b);
            let s = 0.5 * (a + b);
            skew[(i, j)] = k;
            skew[(j, i)] = -k;
            symmetric[(i, j)] = s;
            symmetric[(j, i)] = s;
        }
    }
    DecomposedPhases { skew, symmetric }
}

/// Symmetric P×P matrix of one-way propagation delays, seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayMatrix(pub DMatrix<f64>);

impl DelayMatrix {
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    /// Number of off-diagonal entries below zero.
    pub fn negative_entries(&self) -> usize {
        let n = self.dim();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && self.0[(i, j)] < 0.0)
            .count()
    }

    pub fn from_positions(positions: &PositionSet) -> Self {
        let n = positions.len();
        Self(DMatrix::from_fn(n, n, |i, j| {
            crate::geometry::propagation_delay(&positions.position(i), &positions.position(j))
        }))
    }
}

/// Inverts `Θ = 2π δ / (S T)` entrywise; diagonal forced to zero.
pub fn delays_from_symmetric(
    symmetric: &DMatrix<f64>,
    sampling_factor: u32,
    own_duration: f64,
) -> DelayMatrix {
    let scale = sampling_factor as f64 * own_duration / TAU;
    let mut d = symmetric * scale;
    d.fill_diagonal(0.0);
    DelayMatrix(d)
}

/// Relative coordinates produced by classical MDS, with quality flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdsEmbedding {
    pub positions: PositionSet,
    /// Fraction of total eigenvalue magnitude carried by negative eigenvalues.
    pub clamped_mass_fraction: f64,
    /// Negative input delays that were folded to their magnitude.
    pub negative_delays: usize,
}

/// Classical multidimensional scaling of a delay matrix into `dim` ≤ 3
/// dimensions. Unused coordinate rows are zero; the output is centered.
pub fn classical_mds(delays: &DelayMatrix, dim: usize) -> Result<MdsEmbedding, LocalizationError> {
    let m = &delays.0;
    let (rows, cols) = m.shape();
    if rows != cols {
        return Err(LocalizationError::NotSquare { rows, cols });
    }
    if dim == 0 || dim > 3 {
        return Err(LocalizationError::Dimension(dim));
    }
    let n = rows;
    let scale = m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    for i in 0..n {
        for j in i + 1..n {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
                return Err(LocalizationError::NotSymmetric { row: i, col: j });
            }
        }
    }
    let negative_delays = delays.negative_entries();
    if n == 0 {
        return Ok(MdsEmbedding {
            positions: PositionSet::zeros(0),
            clamped_mass_fraction: 0.0,
            negative_delays,
        });
    }

    let squared = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            let d = m[(i, j)].abs() * SPEED_OF_LIGHT;
            d * d
        }
    });
    let b = double_center(&squared);

    let eigen = b.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    // stable sort: equal eigenvalues keep ascending index
    order.sort_by(|&x, &y| eigen.eigenvalues[y].total_cmp(&eigen.eigenvalues[x]));

    let total: f64 = eigen.eigenvalues.iter().map(|v| v.abs()).sum();
    let negative: f64 = eigen.eigenvalues.iter().filter(|v| **v < 0.0).map(|v| -v).sum();
    let clamped_mass_fraction = if total > 0.0 { negative / total } else { 0.0 };

    let mut coords = Matrix3xX::zeros(n);
    for (row, &k) in order.iter().take(dim).enumerate() {
        let lambda = eigen.eigenvalues[k].max(0.0);
        let s = lambda.sqrt();
        for i in 0..n {
            coords[(row, i)] = s * eigen.eigenvectors[(i, k)];
        }
    }
    let positions = PositionSet(coords).centered();
    Ok(MdsEmbedding {
        positions,
        clamped_mass_fraction,
        negative_delays,
    })
}

/// `B = -½ J D² J` with `J = I - 11ᵀ/n`.
fn double_center(squared: &DMatrix<f64>) -> DMatrix<f64> {
    let n = squared.nrows();
    let nf = n as f64;
    let row_means: Vec<f64> = (0..n).map(|i| squared.row(i).sum() / nf).collect();
    let col_means: Vec<f64> = (0..n).map(|j| squared.column(j).sum() / nf).collect();
    let grand = row_means.iter().sum::<f64>() / nf;
    let b = DMatrix::from_fn(n, n, |i, j| {
        -0.5 * (squared[(i, j)] - row_means[i] - col_means[j] + grand)
    });
    // symmetrize away rounding so the eigen-solver sees an exactly symmetric input
    (&b + b.transpose()) * 0.5
}

/// Orthogonal `R` minimizing `‖reference - R·estimate‖_F` (reflections allowed).
/// Both sets are expected to be centered. Returns identity when the cross
/// covariance vanishes.
pub fn procrustes_align(
    reference: &PositionSet,
    estimate: &PositionSet,
) -> Result<Matrix3<f64>, LocalizationError> {
    if reference.len() != estimate.len() {
        return Err(LocalizationError::SizeMismatch {
            reference: reference.len(),
            estimate: estimate.len(),
        });
    }
    let cross: Matrix3<f64> = reference.matrix() * estimate.matrix().transpose();
    if cross.iter().all(|v| *v == 0.0) {
        return Ok(Matrix3::identity());
    }
    let svd = cross.svd(true, true);
    match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => Ok(u * v_t),
        _ => Ok(Matrix3::identity()),
    }
}

/// `‖X_c - R·X̂_c‖_F / ‖X_c‖_F` after centering both sets.
pub fn relative_position_error(
    reference: &PositionSet,
    estimate: &PositionSet,
) -> Result<f64, LocalizationError> {
    if reference.len() != estimate.len() {
        return Err(LocalizationError::SizeMismatch {
            reference: reference.len(),
            estimate: estimate.len(),
        });
    }
    let x = reference.centered();
    let norm = x.matrix().norm();
    if norm == 0.0 {
        return Err(LocalizationError::DegenerateReference);
    }
    let y = estimate.centered();
    let r = procrustes_align(&x, &y)?;
    let residual = x.matrix() - r * y.matrix();
    Ok(residual.norm() / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Position;
    use nalgebra::{Rotation3, Vector3};

    fn reference_positions() -> PositionSet {
        PositionSet::from_positions(&[
            Position::new(0.0, 0.0, 0.0),
            Position::new(30.0, 10.0, 0.0),
            Position::new(10.0, -30.0, -10.0),
            Position::new(20.0, -25.0, 20.0),
        ])
    }

    #[test]
    fn zero_matrix_has_zero_parts() {
        let d = decompose(&PhaseDiffMatrix::zeros(3));
        assert_eq!(d.skew, DMatrix::zeros(3, 3));
        assert_eq!(d.symmetric, DMatrix::zeros(3, 3));
    }

    #[test]
    fn symmetric_input_has_no_skew_part() {
        let m = DMatrix::from_row_slice(3, 3, &[0.0, 0.5, 1.5, 0.5, 0.0, -2.0, 1.5, -2.0, 0.0]);
        let d = decompose(&PhaseDiffMatrix::from_matrix(m.clone()));
        assert_eq!(d.skew, DMatrix::zeros(3, 3));
        assert_eq!(d.symmetric, m);
    }

    #[test]
    fn two_by_two_closed_form() {
        let (a, b) = (0.75, -0.25);
        let d = decompose_matrix(&DMatrix::from_row_slice(2, 2, &[0.0, a, b, 0.0]));
        assert_eq!(d.skew, DMatrix::from_row_slice(2, 2, &[0.0, (a - b) / 2.0, (b - a) / 2.0, 0.0]));
        assert_eq!(
            d.symmetric,
            DMatrix::from_row_slice(2, 2, &[0.0, (a + b) / 2.0, (a + b) / 2.0, 0.0])
        );
    }

    #[test]
    fn zero_phase_gives_zero_delay() {
        let d = delays_from_symmetric(&DMatrix::zeros(3, 3), 8, 133.78e-9);
        assert_eq!(d.0, DMatrix::zeros(3, 3));
    }

    #[test]
    fn delay_round_trip() {
        let (s, t, delay) = (8u32, 133.78e-9, 105.48e-9);
        let theta = TAU / (s as f64 * t) * delay;
        let sym = DMatrix::from_row_slice(2, 2, &[0.0, theta, theta, 0.0]);
        let d = delays_from_symmetric(&sym, s, t);
        assert!((d.get(0, 1) - delay).abs() <= 1e-12 * delay);
        assert_eq!(d.get(1, 1), 0.0);
    }

    #[test]
    fn zero_delays_collapse_to_origin() {
        let e = classical_mds(&DelayMatrix(DMatrix::zeros(4, 4)), 3).unwrap();
        assert_eq!(e.positions.0, Matrix3xX::zeros(4));
    }

    #[test]
    fn equilateral_triangle_distances() {
        let side = 30.0;
        let delay = side / SPEED_OF_LIGHT;
        assert!((delay - 100.069e-9).abs() < 0.001e-9);
        let d = DelayMatrix(DMatrix::from_fn(3, 3, |i, j| if i == j { 0.0 } else { delay }));
        let e = classical_mds(&d, 3).unwrap();
        let dist = e.positions.distance_matrix();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 0.0 } else { side };
                assert!((dist[i][j] - expected).abs() < 1e-9, "{} vs {}", dist[i][j], expected);
            }
        }
        assert!(e.positions.0.column_sum().norm() < 1e-9);
    }

    #[test]
    fn reference_geometry_distances_round_trip() {
        let truth = reference_positions();
        let e = classical_mds(&DelayMatrix::from_positions(&truth), 3).unwrap();
        let want = truth.distance_matrix();
        let got = e.positions.distance_matrix();
        for i in 0..4 {
            for j in 0..4 {
                assert!((got[i][j] - want[i][j]).abs() <= 1e-9 * want[i][j].max(1.0));
            }
        }
        assert!(e.clamped_mass_fraction < 1e-12);
        assert!(relative_position_error(&truth, &e.positions).unwrap() < 1e-6);
    }

    #[test]
    fn asymmetric_delays_rejected() {
        let mut m = DMatrix::zeros(3, 3);
        m[(0, 1)] = 1e-7;
        assert_eq!(
            classical_mds(&DelayMatrix(m), 3),
            Err(LocalizationError::NotSymmetric { row: 0, col: 1 })
        );
    }

    #[test]
    fn negative_delays_flagged() {
        let truth = reference_positions();
        let mut d = DelayMatrix::from_positions(&truth);
        d.0[(0, 1)] = -d.0[(0, 1)];
        d.0[(1, 0)] = -d.0[(1, 0)];
        let e = classical_mds(&d, 3).unwrap();
        assert_eq!(e.negative_delays, 2);
        assert!(relative_position_error(&truth, &e.positions).unwrap() < 1e-6);
    }

    #[test]
    fn identical_sets_align_with_identity() {
        let x = reference_positions().centered();
        let r = procrustes_align(&x, &x).unwrap();
        assert!((r - Matrix3::identity()).norm() < 1e-12);
    }

    #[test]
    fn recovers_known_rotation() {
        let x = reference_positions().centered();
        let q = Rotation3::from_axis_angle(&Vector3::y_axis(), 0.7).into_inner()
            * Rotation3::from_axis_angle(&Vector3::x_axis(), -1.1).into_inner();
        let est = PositionSet(q.transpose() * x.matrix());
        let r = procrustes_align(&x, &est).unwrap();
        assert!((r - q).norm() < 1e-9);
        assert!((r * r.transpose() - Matrix3::identity()).norm() < 1e-12);
    }

    #[test]
    fn degenerate_alignment_is_identity() {
        let z = PositionSet::zeros(4);
        assert_eq!(procrustes_align(&z, &z).unwrap(), Matrix3::identity());
    }

    #[test]
    fn error_examples() {
        let x = reference_positions();
        assert!(relative_position_error(&x, &x).unwrap() < 1e-15);

        let q = Rotation3::from_euler_angles(0.3, -0.2, 2.0).into_inner();
        let rotated = PositionSet(q * x.matrix());
        assert!(relative_position_error(&x, &rotated).unwrap() < 1e-12);

        let scaled = PositionSet(x.centered().matrix() * 1.10);
        let e = relative_position_error(&x, &scaled).unwrap();
        assert!((e - 0.10).abs() < 1e-12, "{e}");
    }

    #[test]
    fn error_needs_spread_and_matching_sizes() {
        let z = PositionSet::zeros(3);
        assert_eq!(
            relative_position_error(&z, &z),
            Err(LocalizationError::DegenerateReference)
        );
        assert!(matches!(
            relative_position_error(&reference_positions(), &z),
            Err(LocalizationError::SizeMismatch { .. })
        ));
    }
}
