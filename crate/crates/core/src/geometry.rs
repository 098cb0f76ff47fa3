//! Host coordinates and line-of-sight propagation delays.

use nalgebra::{Matrix3xX, Vector3};
use serde::{Deserialize, Serialize};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub type Position = Vector3<f64>;

/// One-way line-of-sight delay between two points, seconds.
pub fn propagation_delay(a: &Position, b: &Position) -> f64 {
    (a - b).norm() / SPEED_OF_LIGHT
}

/// Coordinates of `P` hosts stored as the columns of a 3×P matrix, meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionSet(pub Matrix3xX<f64>);

impl PositionSet {
    pub fn from_positions(points: &[Position]) -> Self {
        Self(Matrix3xX::from_columns(points))
    }

    pub fn zeros(hosts: usize) -> Self {
        Self(Matrix3xX::zeros(hosts))
    }

    pub fn len(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.0.ncols() == 0
    }

    pub fn matrix(&self) -> &Matrix3xX<f64> {
        &self.0
    }

    pub fn position(&self, host: usize) -> Position {
        self.0.column(host).into_owned()
    }

    pub fn centroid(&self) -> Position {
        if self.is_empty() {
            return Position::zeros();
        }
        self.0.column_sum() / self.len() as f64
    }

    /// Copy translated so that the columns sum to zero.
    pub fn centered(&self) -> Self {
        let c = self.centroid();
        let mut m = self.0.clone();
        for mut col in m.column_iter_mut() {
            col -= c;
        }
        Self(m)
    }

    /// Pairwise Euclidean distances, meters.
    pub fn distance_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (self.0.column(i) - self.0.column(j)).norm())
                    .collect()
            })
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}
