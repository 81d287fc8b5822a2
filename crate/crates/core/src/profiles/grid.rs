//! Radialization of `|f̂|` sampled on a Cartesian frequency lattice.
//!
//! Lattice point `i` along an axis of length `N` sits at `(i − N/2)·dxi`.
//! Points are binned into geometric shells, 8 per octave, and each shell
//! becomes one node of a sampled profile: the node radius is the rms radius
//! of the lattice points in the shell and the node value their rms
//! magnitude. The origin is dropped, so nothing below the fundamental
//! `min dxi` is represented and low-frequency limits from grids should not
//! be trusted.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{Component, RadialProfile, SampledRadial};
use crate::error::{Error, Result};
use crate::numerics::LogScalar;

pub const SHELLS_PER_OCTAVE: u32 = 8;

/// Sidecar describing a row-major lattice of samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CartesianGrid {
    pub n: u32,
    pub shape: Vec<usize>,
    pub dxi: Vec<f64>,
}

impl CartesianGrid {
    pub fn validate(&self) -> Result<usize> {
        if !(1..=3).contains(&self.n) {
            return Err(Error::InvalidInput(format!("grid dimension must be 1, 2 or 3, got {}", self.n)));
        }
        let n = self.n as usize;
        if self.shape.len() != n || self.dxi.len() != n {
            return Err(Error::InvalidInput("shape and dxi must have one entry per axis".into()));
        }
        if self.shape.contains(&0) {
            return Err(Error::InvalidInput("grid axes must be nonempty".into()));
        }
        if self.dxi.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(Error::InvalidInput("dxi must be positive and finite".into()));
        }
        self.shape
            .iter()
            .try_fold(1usize, |acc, &s| acc.checked_mul(s))
            .ok_or_else(|| Error::Capacity("grid size overflows".into()))
    }
}

#[derive(Default)]
struct Shell {
    count: f64,
    sum_sq_mag: f64,
    sum_sq_rad: f64,
}

/// Bins `samples` (row-major, last axis fastest) into a one-component
/// sampled profile.
pub fn bin_cartesian_grid(grid: &CartesianGrid, samples: &[f64]) -> Result<RadialProfile> {
    let total = grid.validate()?;
    if samples.len() != total {
        return Err(Error::InvalidInput(format!(
            "payload has {} samples but the header declares {}",
            samples.len(),
            total
        )));
    }
    if let Some(i) = samples.iter().position(|x| x.is_nan()) {
        return Err(Error::InvalidInput(format!("NaN in payload at sample {i}")));
    }
    if let Some(i) = samples.iter().position(|x| x.is_infinite()) {
        return Err(Error::InvalidInput(format!("infinite value in payload at sample {i}")));
    }
    let n = grid.n as usize;
    let mut shells: BTreeMap<i64, Shell> = BTreeMap::new();
    let mut idx = alloc::vec![0usize; n];
    for &v in samples {
        let mut rad2 = 0.0;
        for k in 0..n {
            let x = (idx[k] as f64 - (grid.shape[k] / 2) as f64) * grid.dxi[k];
            rad2 += x * x;
        }
        if rad2 > 0.0 {
            let s = libm::floor(0.5 * libm::log2(rad2) * SHELLS_PER_OCTAVE as f64) as i64;
            let sh = shells.entry(s).or_default();
            sh.count += 1.0;
            sh.sum_sq_mag += v * v;
            sh.sum_sq_rad += rad2;
        }
        for k in (0..n).rev() {
            idx[k] += 1;
            if idx[k] < grid.shape[k] {
                break;
            }
            idx[k] = 0;
        }
    }
    if shells.len() < 2 {
        return Err(Error::InvalidInput("grid spans fewer than 2 radial shells".into()));
    }
    let (nodes, mags): (Vec<f64>, Vec<LogScalar>) = shells
        .values()
        .map(|s| {
            let rad = libm::sqrt(s.sum_sq_rad / s.count);
            let mag = libm::sqrt(s.sum_sq_mag / s.count);
            (libm::log2(rad), LogScalar::from_f64(mag))
        })
        .unzip();
    let sampled = SampledRadial::new(nodes, mags)?;
    RadialProfile::new(
        grid.n,
        alloc::vec![Component { segments: Vec::new(), sampled: Some(sampled) }],
        "cartesian grid, rms shell binning",
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lattice(n: usize, dxi: f64, f: impl Fn(f64) -> f64) -> (CartesianGrid, Vec<f64>) {
        let grid = CartesianGrid { n: 3, shape: alloc::vec![n; 3], dxi: alloc::vec![dxi; 3] };
        let mut out = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let c = |a: usize| (a as f64 - (n / 2) as f64) * dxi;
                    out.push(f(libm::sqrt(c(i) * c(i) + c(j) * c(j) + c(k) * c(k))));
                }
            }
        }
        (grid, out)
    }

    #[test]
    fn constant_field_gives_unit_shells() {
        let (g, s) = lattice(16, 0.1, |_| 1.0);
        let p = bin_cartesian_grid(&g, &s).unwrap();
        let sr = p.components()[0].sampled.as_ref().unwrap();
        assert!(sr.magnitudes.iter().all(|m| (m.to_f64() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn single_sample_gives_single_shell() {
        let (g, mut s) = lattice(16, 0.1, |_| 0.0);
        // index (8, 8, 13) sits at |ξ| = 0.5
        s[8 * 256 + 8 * 16 + 13] = 1.0;
        let p = bin_cartesian_grid(&g, &s).unwrap();
        let sr = p.components()[0].sampled.as_ref().unwrap();
        assert_eq!(sr.magnitudes.iter().filter(|m| !m.is_zero()).count(), 1);
    }

    #[test]
    fn gaussian_shells_track_the_radial_function() {
        let (g, s) = lattice(64, 0.15, |l| libm::exp(-l * l / 2.0));
        let p = bin_cartesian_grid(&g, &s).unwrap();
        let sr = p.components()[0].sampled.as_ref().unwrap();
        let mut sq = 0.0;
        for (u, m) in sr.log2_nodes.iter().zip(&sr.magnitudes) {
            let l = libm::exp2(*u);
            let d = m.to_f64() - libm::exp(-l * l / 2.0);
            sq += d * d;
        }
        let rms = libm::sqrt(sq / sr.log2_nodes.len() as f64);
        assert!(rms < 1e-3, "rms {rms}");
    }

    #[test]
    fn size_mismatch_and_nan_rejected() {
        let (g, mut s) = lattice(4, 0.1, |_| 1.0);
        assert!(bin_cartesian_grid(&g, &s[1..]).is_err());
        s[3] = f64::NAN;
        assert!(bin_cartesian_grid(&g, &s).is_err());
    }
}
