use crate::pencil::BidiagonalPencil;
use crate::spectral::LogSpectralData;

/// Lattice states on a time grid.
///
/// `log_b[k][n]` is `ln b_{n+1}(times[k])`. Far out in time the `b` entries
/// fall below the `f64` range; the matching sample then stores 0.0 while
/// `log_b` keeps the exact value.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub samples: Vec<BidiagonalPencil>,
    pub log_b: Vec<Vec<f64>>,
    /// Spectral data per time, when the trajectory came from the spectral route.
    pub spectra: Option<Vec<LogSpectralData>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Lattice size shared by every sample.
    pub fn size(&self) -> usize {
        self.samples.first().map_or(0, BidiagonalPencil::len)
    }

    /// Largest componentwise absolute difference against another trajectory
    /// on the same grid.
    pub fn max_abs_deviation(&self, other: &Trajectory) -> f64 {
        assert_eq!(self.len(), other.len(), "trajectories have different grids");
        self.samples
            .iter()
            .zip(&other.samples)
            .flat_map(|(x, y)| {
                let da = x.a().iter().zip(y.a()).map(|(p, q)| (p - q).abs());
                let db = x.b().iter().zip(y.b()).map(|(p, q)| (p - q).abs());
                da.chain(db).collect::<Vec<_>>()
            })
            .fold(0.0, f64::max)
    }
}
