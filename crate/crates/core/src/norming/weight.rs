use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::chain::{check_real, hub_radius, level_sums, CompactSet};
use crate::domain::Exhaustion;
use crate::numeric::ball_volume;
use crate::{error::invalid, Error, Point, Result};

/// Upper cap on the level ratios `b_j`.
pub const B_CAP: f64 = 1.0 - 1e-6;

/// A positive weight `φ` on a domain.
pub trait Weight: Send + Sync {
    fn value(&self, p: &Point) -> f64;
    fn label(&self) -> String;
}

/// `φ ≡ c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantWeight(pub f64);

impl Weight for ConstantWeight {
    fn value(&self, _: &Point) -> f64 {
        self.0
    }

    fn label(&self) -> String {
        alloc::format!("constant({})", self.0)
    }
}

/// The weight produced by [`build_weight`].
///
/// With `s` the gauge of a point about the anchor, `φ` equals
/// `v_j = 2^{-j} d_j` at `s = t_j`, is constant `v_1` on `D_1` and linear
/// in `s` in between. Past the last level the schedule continues
/// geometrically with the last ratio `b`. Values are kept as logarithms;
/// [`Weight::value`] floors the exponential at the smallest normal `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormingWeight {
    exhaustion: Exhaustion,
    hub_radius: f64,
    log_c: Vec<f64>,
    log_b: Vec<f64>,
    log_d: Vec<f64>,
    certified: Vec<(CompactSet, f64)>,
    epsilon_schedule: Vec<f64>,
}

/// Builds a norming weight from certified level constants.
///
/// For `j < L`: `c_j` is the pointwise-mass constant of `F = D_j` in
/// `D_{j+1}`, `b_j = min(|B₀| C_{j+1}, B_CAP)` with `B₀` the hub ball and
/// `C_{j+1}` its own constant in `D_{j+1}`, and `d_j = b_1 ⋯ b_{j-1}`.
pub fn build_weight(e: &Exhaustion) -> Result<NormingWeight> {
    check_real(e.domain())?;
    if e.len() < 3 {
        return Err(invalid("building a weight needs at least three levels"));
    }
    let hub_r = hub_radius(e);
    let hub = CompactSet::Ball {
        center: e.anchor(),
        radius: hub_r,
    };
    let log_hub = ball_volume(e.domain().ambient_dim(), hub_r).ln();
    let mut log_c = Vec::new();
    let mut log_b = Vec::new();
    let mut certified = Vec::new();
    for j in 1..e.len() {
        let sums = level_sums(e, j, &CompactSet::Level(j)).map_err(|err| match err {
            Error::CertificationFailed { .. } => err,
            other => Error::CertificationFailed {
                level: j,
                reason: alloc::format!("{other}"),
            },
        })?;
        let lc = sums.log_in - sums.log_out;
        if !lc.is_finite() {
            return Err(Error::CertificationFailed {
                level: j,
                reason: "constant is not finite".into(),
            });
        }
        log_c.push(lc);
        certified.push((CompactSet::Level(j), lc));
        let log_big_c = -sums.log_out;
        certified.push((hub, log_big_c));
        log_b.push((log_hub + log_big_c).min(B_CAP.ln()));
    }
    let mut log_d = alloc::vec![0.0];
    for lb in &log_b {
        let last = *log_d.last().unwrap();
        log_d.push(last + lb);
    }
    Ok(NormingWeight {
        exhaustion: e.clone(),
        hub_radius: hub_r,
        log_c,
        log_b,
        log_d,
        certified,
        epsilon_schedule: Vec::new(),
    })
}

impl NormingWeight {
    pub fn exhaustion(&self) -> &Exhaustion {
        &self.exhaustion
    }

    pub fn hub_radius(&self) -> f64 {
        self.hub_radius
    }

    /// `ln c_j`, `j = 1..L-1`.
    pub fn log_c(&self) -> &[f64] {
        &self.log_c
    }

    /// `ln b_j`, `j = 1..L-1`.
    pub fn log_b(&self) -> &[f64] {
        &self.log_b
    }

    /// `ln d_j`, `j = 1..L`.
    pub fn log_d(&self) -> &[f64] {
        &self.log_d
    }

    pub fn b(&self) -> Vec<f64> {
        self.log_b.iter().map(|x| x.exp()).collect()
    }

    pub fn d(&self) -> Vec<f64> {
        self.log_d.iter().map(|x| x.exp()).collect()
    }

    /// Certified `(F, ln C(F))` pairs.
    pub fn certified(&self) -> &[(CompactSet, f64)] {
        &self.certified
    }

    pub fn epsilon_schedule(&self) -> &[f64] {
        &self.epsilon_schedule
    }

    pub fn set_epsilon_schedule(&mut self, eps: Vec<f64>) {
        self.epsilon_schedule = eps;
    }

    /// `ln(2^{-j} d_j)`, the ceiling on `G_j`; continues past `L`.
    pub fn log_ceiling(&self, j: usize) -> f64 {
        let l = self.log_d.len();
        let j = j.max(1);
        let ln2 = core::f64::consts::LN_2;
        if j <= l {
            self.log_d[j - 1] - j as f64 * ln2
        } else {
            let lb = *self.log_b.last().unwrap();
            self.log_d[l - 1] - l as f64 * ln2 + (j - l) as f64 * (lb - ln2)
        }
    }

    /// Scale of level `j`, continued geometrically past the last level.
    fn scale(&self, j: usize) -> f64 {
        let ts = self.exhaustion.scales();
        let l = ts.len();
        if j <= l {
            ts[j - 1]
        } else {
            let q = (1.0 - ts[l - 1]) / (1.0 - ts[l - 2]);
            1.0 - (1.0 - ts[l - 1]) * q.powi((j - l) as i32)
        }
    }

    /// `ln φ(p)`.
    pub fn log_value(&self, p: &Point) -> f64 {
        let s = self.exhaustion.domain().gauge(&self.exhaustion.anchor(), p);
        let ts = self.exhaustion.scales();
        if s <= ts[0] {
            return self.log_ceiling(1);
        }
        let l = ts.len();
        let j = if s <= ts[l - 1] {
            ts.iter().take_while(|t| **t < s).count()
        } else {
            let q = (1.0 - ts[l - 1]) / (1.0 - ts[l - 2]);
            let m = ((1.0 - s) / (1.0 - ts[l - 1])).ln() / q.ln();
            let mut j = l + m.max(0.0) as usize;
            while self.scale(j + 1) < s {
                j += 1;
            }
            while j > l && self.scale(j) >= s {
                j -= 1;
            }
            j
        };
        let (t0, t1) = (self.scale(j), self.scale(j + 1));
        let lam = ((s - t0) / (t1 - t0)).clamp(0.0, 1.0);
        let (a, b) = (self.log_ceiling(j), self.log_ceiling(j + 1));
        a + ((1.0 - lam) + lam * (b - a).exp()).ln()
    }
}

impl Weight for NormingWeight {
    fn value(&self, p: &Point) -> f64 {
        self.log_value(p).exp().max(f64::MIN_POSITIVE)
    }

    fn label(&self) -> String {
        alloc::format!(
            "norming({}, {} levels)",
            self.exhaustion.domain().kind(),
            self.exhaustion.len()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;

    #[test]
    fn ceilings_and_monotone_products() {
        let e = Exhaustion::dyadic(Domain::unit_disk(), 4).unwrap();
        let w = build_weight(&e).unwrap();
        assert!(w.log_b.iter().all(|b| *b < 0.0));
        assert!(w.log_d.windows(2).all(|d| d[1] < d[0]));
        assert_eq!(w.value(&Point::origin(2)), 0.5);
        for k in 0..200 {
            let r = k as f64 / 200.0;
            let p = Point::xy(r, 0.0);
            let j = e.annulus_index(&p);
            assert!(w.log_value(&p) <= w.log_ceiling(j.max(1)) + 1e-12);
        }
    }

    #[test]
    fn needs_three_levels() {
        let e = Exhaustion::dyadic(Domain::unit_disk(), 2).unwrap();
        assert!(build_weight(&e).is_err());
    }
}
