//! Gaussian-blob datasets for experiments without external files.

use featcomp_core::linalg::Matrix;
use featcomp_core::rng;
use featcomp_core::special::normal_quantile;
use featcomp_core::Dataset;

/// Blobs with `clusters` centers. Coordinates are scaled by `1/√p` so that
/// squared distances, and hence RBF kernel values at a fixed `γ`, do not
/// drift with the dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlobSpec {
    pub n: usize,
    pub p: usize,
    pub clusters: usize,
    /// Spread of the centers.
    pub center_scale: f64,
    /// Spread of points around their center.
    pub noise_scale: f64,
    pub seed: u64,
}

impl BlobSpec {
    pub fn new(n: usize, p: usize, seed: u64) -> Self {
        Self {
            n,
            p,
            clusters: 4,
            center_scale: 0.5,
            noise_scale: 0.35,
            seed,
        }
    }

    /// Points as a dense matrix plus cluster labels.
    pub fn generate(&self) -> (Matrix, Vec<f64>) {
        let clusters = self.clusters.max(1);
        let per = 1.0 / (self.p.max(1) as f64).sqrt();
        let mut r = rng::stream(rng::derive_seed(self.seed, "synthetic"), 0);
        let mut gauss = || normal_quantile(rng::open_unit(&mut r));
        let centers: Vec<Vec<f64>> = (0..clusters)
            .map(|_| (0..self.p).map(|_| self.center_scale * per * gauss()).collect())
            .collect();
        let mut data = Vec::with_capacity(self.n * self.p);
        let mut labels = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let c = i % clusters;
            labels.push(c as f64);
            for &mu in &centers[c] {
                data.push(mu + self.noise_scale * per * gauss());
            }
        }
        (Matrix::from_vec(self.n, self.p, data).expect("sized buffer"), labels)
    }

    pub fn dataset(&self) -> Dataset {
        let (x, y) = self.generate();
        Dataset::from_dense(&x, Some(y)).expect("labels match rows")
    }
}
