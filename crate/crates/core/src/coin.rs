//! Coin operators and per-vertex angle fields.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::rng;

/// Coin angle policy: one fixed angle, or an i.i.d. uniform `[0, pi]` field
/// keyed by `(seed, vertex index)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThetaPolicy {
    Fixed(f64),
    RandomField { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoinParams {
    pub theta_policy: ThetaPolicy,
    /// 1 = fully directed y motion; r >= 2 adds a directed coin with r - 1
    /// self-loops per vertex.
    pub r: u32,
}

impl CoinParams {
    pub fn fixed(theta: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::AngleOutOfRange(theta));
        }
        Ok(CoinParams {
            theta_policy: ThetaPolicy::Fixed(theta),
            r: 1,
        })
    }

    pub fn random_field(seed: u64) -> Self {
        CoinParams {
            theta_policy: ThetaPolicy::RandomField { seed },
            r: 1,
        }
    }

    pub fn with_r(mut self, r: u32) -> Result<Self> {
        if r < 1 {
            return Err(Error::SelfLoopCountOutOfRange(r));
        }
        self.r = r;
        Ok(self)
    }

    /// Same policy with the field seed replaced; fixed angles are unchanged.
    /// Ensemble runs use this to give every realization its own angle field.
    pub fn with_field_seed(mut self, seed: u64) -> Self {
        if let ThetaPolicy::RandomField { .. } = self.theta_policy {
            self.theta_policy = ThetaPolicy::RandomField { seed };
        }
        self
    }
}

/// A 2x2 operator on the internal space, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coin2x2 {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Coin2x2 {
    #[inline]
    pub fn apply(&self, down: Complex64, up: Complex64) -> (Complex64, Complex64) {
        (self.a * down + self.b * up, self.c * down + self.d * up)
    }

    /// Max-norm of `C^dagger C - I`.
    pub fn unitarity_defect(&self) -> f64 {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let m00 = a.conj() * a + c.conj() * c - 1.0;
        let m01 = a.conj() * b + c.conj() * d;
        let m10 = b.conj() * a + d.conj() * c;
        let m11 = b.conj() * b + d.conj() * d - 1.0;
        m00.norm().max(m01.norm()).max(m10.norm()).max(m11.norm())
    }
}

/// Coin for the x substep: `[[cos t, -i sin t], [-i sin t, cos t]]`.
pub fn coin_theta(theta: f64) -> Result<Coin2x2> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::AngleOutOfRange(theta));
    }
    let (sin, cos) = theta.sin_cos();
    let off = Complex64::new(0.0, -sin);
    Ok(Coin2x2 {
        a: Complex64::new(cos, 0.0),
        b: off,
        c: off,
        d: Complex64::new(cos, 0.0),
    })
}

/// Directed coin on the effective `{|+>, |loop>}` space for r - 1 self-loops:
/// `[[a, b], [b, -a]]` with `a = 1/sqrt(r)`, `b = sqrt((r-1)/r)`.
pub fn coin_y(r: u32) -> Result<Coin2x2> {
    if r < 2 {
        return Err(Error::CoinRankOutOfRange(r));
    }
    let rf = r as f64;
    let alpha = 1.0 / rf.sqrt();
    let beta = ((rf - 1.0) / rf).sqrt();
    Ok(Coin2x2 {
        a: Complex64::new(alpha, 0.0),
        b: Complex64::new(beta, 0.0),
        c: Complex64::new(beta, 0.0),
        d: Complex64::new(-alpha, 0.0),
    })
}

/// Per-vertex coin angles over an `n_x` x `n_y` region, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaField {
    pub n_x: usize,
    pub n_y: usize,
    pub values: Vec<f64>,
}

impl ThetaField {
    #[inline]
    pub fn theta(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.n_x + x]
    }

    /// Precomputed (cos, sin) tables for the stepping kernels.
    pub fn tables(&self) -> (Vec<f64>, Vec<f64>) {
        let cos = self.values.iter().map(|t| t.cos()).collect();
        let sin = self.values.iter().map(|t| t.sin()).collect();
        (cos, sin)
    }
}

/// Builds the angle field for the given region dimensions. Random fields are
/// deterministic in `(seed, vertex index)`.
pub fn theta_field_dims(n_x: usize, n_y: usize, params: &CoinParams) -> ThetaField {
    let n = n_x * n_y;
    let values = match params.theta_policy {
        ThetaPolicy::Fixed(theta) => vec![theta; n],
        ThetaPolicy::RandomField { seed } => {
            (0..n).map(|i| rng::stream_unit(seed, i as u64) * PI).collect()
        }
    };
    ThetaField { n_x, n_y, values }
}

/// Angle field over the spec's own region (no padding).
pub fn theta_field(spec: &LatticeSpec, params: &CoinParams) -> ThetaField {
    theta_field_dims(spec.n_x, spec.n_y, params)
}
