//! Scattering matrices and the circuit architectures that constrain them.

use std::ops::Range;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    ensure_finite, ensure_square, haar_random_unitary_with, seeded_rng, unitarity_report, CMatrix,
    UnitarityReport, C64,
};

/// Tolerance on `||Phi^H Phi - I||_F` for (block-)unitary architectures.
pub const UNITARY_TOLERANCE: f64 = 1e-9;

/// Tolerance on `| |Phi_kk| - 1 |` for the single-connected architecture.
pub const UNIT_MODULUS_TOLERANCE: f64 = 1e-12;

/// Inter-element wiring of the surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Architecture {
    /// Every port connected to every other: any unitary.
    FullyConnected,
    /// Block-diagonal with unitary blocks of `group_size` contiguous elements.
    GroupConnected { group_size: usize },
    /// Conventional surface: diagonal with unit-modulus entries.
    SingleConnected,
}

impl Architecture {
    /// Canonical architecture for a group size on an `n`-element surface.
    pub fn from_group_size(group_size: usize, n: usize) -> Result<Self> {
        if group_size == 0 || n == 0 || !n.is_multiple_of(group_size) {
            return Err(Error::InvalidGroupSize { group_size, n });
        }
        Ok(if group_size == n {
            Architecture::FullyConnected
        } else if group_size == 1 {
            Architecture::SingleConnected
        } else {
            Architecture::GroupConnected { group_size }
        })
    }

    pub fn group_size(&self, n: usize) -> usize {
        match *self {
            Architecture::FullyConnected => n,
            Architecture::GroupConnected { group_size } => group_size,
            Architecture::SingleConnected => 1,
        }
    }

    /// Contiguous index ranges of the diagonal blocks.
    pub fn blocks(&self, n: usize) -> Vec<Range<usize>> {
        let g = self.group_size(n).max(1);
        (0..n / g).map(|b| b * g..(b + 1) * g).collect()
    }

    pub fn label(&self) -> String {
        match *self {
            Architecture::FullyConnected => "fully-connected".into(),
            Architecture::GroupConnected { group_size } => format!("group-connected({group_size})"),
            Architecture::SingleConnected => "single-connected".into(),
        }
    }
}

/// An `N_R x N_R` scattering matrix together with its architecture.
///
/// Construction validates the architecture's invariant, so a value of this
/// type is always feasible.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringMatrix {
    matrix: CMatrix,
    architecture: Architecture,
}

impl ScatteringMatrix {
    pub fn new(matrix: CMatrix, architecture: Architecture) -> Result<Self> {
        let n = ensure_square(&matrix)?;
        ensure_finite(&matrix)?;
        let g = architecture.group_size(n);
        if g == 0 || !n.is_multiple_of(g) {
            return Err(Error::InvalidGroupSize { group_size: g, n });
        }
        match architecture {
            Architecture::FullyConnected => {
                let drift = unitarity_report(&matrix).frobenius_drift;
                if drift > UNITARY_TOLERANCE {
                    return Err(Error::NonUnitary { drift });
                }
            }
            Architecture::GroupConnected { .. } | Architecture::SingleConnected => {
                for (i, j) in (0..n).flat_map(|i| (0..n).map(move |j| (i, j))) {
                    if i / g != j / g && matrix[(i, j)] != C64::new(0.0, 0.0) {
                        return Err(Error::InvalidArgument(format!(
                            "entry ({i}, {j}) lies outside the diagonal blocks of size {g}"
                        )));
                    }
                }
                for range in architecture.blocks(n) {
                    let block = matrix
                        .view((range.start, range.start), (g, g))
                        .into_owned();
                    if g == 1 {
                        let dev = (block[(0, 0)].norm() - 1.0).abs();
                        if dev > UNIT_MODULUS_TOLERANCE {
                            return Err(Error::NonUnitary { drift: dev });
                        }
                    } else {
                        let drift = unitarity_report(&block).frobenius_drift;
                        if drift > UNITARY_TOLERANCE {
                            return Err(Error::NonUnitary { drift });
                        }
                    }
                }
            }
        }
        Ok(Self {
            matrix,
            architecture,
        })
    }

    pub fn fully_connected(matrix: CMatrix) -> Result<Self> {
        Self::new(matrix, Architecture::FullyConnected)
    }

    pub fn identity(n: usize, architecture: Architecture) -> Result<Self> {
        Self::new(CMatrix::identity(n, n), architecture)
    }

    /// Diagonal surface with the given phase shifts.
    pub fn diagonal(phases: &[f64]) -> Result<Self> {
        let n = phases.len();
        let mut m = CMatrix::zeros(n, n);
        for (k, &p) in phases.iter().enumerate() {
            m[(k, k)] = C64::from_polar(1.0, p);
        }
        Self::new(m, Architecture::SingleConnected)
    }

    /// Block-diagonal Haar sample; blocks are drawn in order from one stream,
    /// so a single-block architecture reproduces
    /// [`haar_random_unitary`](crate::linalg::haar_random_unitary) for the same seed.
    pub fn random(n: usize, architecture: Architecture, seed: u64) -> Result<Self> {
        let mut rng = seeded_rng(seed);
        Self::random_with(n, architecture, &mut rng)
    }

    pub fn random_with<R: Rng + ?Sized>(
        n: usize,
        architecture: Architecture,
        rng: &mut R,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        let g = architecture.group_size(n);
        if g == 0 || !n.is_multiple_of(g) {
            return Err(Error::InvalidGroupSize { group_size: g, n });
        }
        let mut m = CMatrix::zeros(n, n);
        for range in architecture.blocks(n) {
            let block = haar_random_unitary_with(g, rng)?;
            m.view_mut((range.start, range.start), (g, g))
                .copy_from(&block);
        }
        Self::new(m, architecture)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn architecture(&self) -> Architecture {
        self.architecture
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn unitarity(&self) -> UnitarityReport {
        unitarity_report(&self.matrix)
    }

    /// `e^{j psi} Phi`.
    pub fn with_global_phase(&self, psi: f64) -> Self {
        Self {
            matrix: &self.matrix * C64::from_polar(1.0, psi),
            architecture: self.architecture,
        }
    }

    pub(crate) fn from_parts_unchecked(matrix: CMatrix, architecture: Architecture) -> Self {
        Self {
            matrix,
            architecture,
        }
    }
}
