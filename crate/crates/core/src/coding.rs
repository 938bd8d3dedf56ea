//! Gaussian population coding.
//!
//! A [`Bundle`] spreads one scalar over `n_l` neurons with evenly spaced
//! preferred values. Encoding produces one Gaussian activation per neuron;
//! decoding is the activity-weighted vote of the preferred values.

use crate::error::{ensure_finite, Error, Result};
use crate::izhikevich::{NeuronParams, NeuronState};

/// Default multiplier turning a unit activation into a supra-threshold current.
pub const DEFAULT_GAIN: f64 = 1.5;

/// A one-dimensional array of tuning-curve neurons encoding one scalar.
#[derive(Debug, Clone, PartialEq)]
pub struct Bundle {
    centers: Vec<f64>,
    sigma: f64,
    range: (f64, f64),
    pub params: NeuronParams,
    pub states: Vec<NeuronState>,
}

/// Builds a bundle with `sigma = (max - min) / n_l`.
pub fn make_bundle(range: (f64, f64), n_l: usize, params: NeuronParams) -> Result<Bundle> {
    Bundle::new(range, n_l, params, 1.0)
}

impl Bundle {
    /// `sigma_scale` multiplies the default width `(max - min) / n_l`.
    pub fn new(
        range: (f64, f64),
        n_l: usize,
        params: NeuronParams,
        sigma_scale: f64,
    ) -> Result<Self> {
        let (lo, hi) = range;
        ensure_finite(lo, "range minimum")?;
        ensure_finite(hi, "range maximum")?;
        if hi <= lo {
            return Err(Error::Config(format!("inverted or empty range [{lo}, {hi}]")));
        }
        if n_l < 2 {
            return Err(Error::Config(format!("a bundle needs at least 2 neurons, got {n_l}")));
        }
        if !(sigma_scale > 0.0 && sigma_scale.is_finite()) {
            return Err(Error::Config(format!("sigma_scale must be positive, got {sigma_scale}")));
        }
        let span = hi - lo;
        let last = (n_l - 1) as f64;
        let mut centers: Vec<f64> = (0..n_l).map(|i| lo + span * i as f64 / last).collect();
        centers[n_l - 1] = hi;
        Ok(Bundle {
            centers,
            sigma: sigma_scale * span / n_l as f64,
            range,
            params,
            states: vec![params.resting_state(); n_l],
        })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn range(&self) -> (f64, f64) {
        self.range
    }

    /// Width of one tuning bin, `range / n_l`.
    pub fn bin_width(&self) -> f64 {
        (self.range.1 - self.range.0) / self.len() as f64
    }

    pub fn reset_states(&mut self) {
        let rest = self.params.resting_state();
        self.states.iter_mut().for_each(|s| *s = rest);
    }

    /// Activations `exp(-(psi - c_i)^2 / (2 sigma^2))`.
    pub fn encode(&self, psi: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.len()];
        self.encode_into(psi, &mut out)?;
        Ok(out)
    }

    pub(crate) fn encode_into(&self, psi: f64, out: &mut [f64]) -> Result<()> {
        ensure_finite(psi, "encoded value")?;
        let inv = 1.0 / (2.0 * self.sigma * self.sigma);
        for (o, c) in out.iter_mut().zip(&self.centers) {
            let d = psi - c;
            *o = (-d * d * inv).exp();
        }
        Ok(())
    }

    /// Center-of-mass vote `sum(c_i a_i) / sum(a_i)`; `activity` may be analog
    /// activations or spike counts.
    pub fn decode(&self, activity: &[f64]) -> Result<f64> {
        if activity.len() != self.len() {
            return Err(Error::Contract(format!(
                "activity has {} entries, bundle has {} neurons",
                activity.len(),
                self.len()
            )));
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for (&a, &c) in activity.iter().zip(&self.centers) {
            if !(a >= 0.0) || !a.is_finite() {
                return Err(Error::NumericDomain(format!("activity entry {a} is not a finite non-negative value")));
            }
            num += a * c;
            den += a;
        }
        if den == 0.0 {
            return Err(Error::NoActivity);
        }
        Ok((num / den).clamp(self.centers[0], self.centers[self.len() - 1]))
    }

    /// Decodes integer spike counts.
    pub fn decode_counts(&self, counts: &[u32]) -> Result<f64> {
        let activity: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
        self.decode(&activity)
    }
}

/// Outer product of the two one-dimensional encodings, row-major `n_a x n_b`.
pub fn encode_joint_2d(a: &Bundle, b: &Bundle, psi_a: f64, psi_b: f64) -> Result<Vec<Vec<f64>>> {
    let ea = a.encode(psi_a)?;
    let eb = b.encode(psi_b)?;
    Ok(ea
        .iter()
        .map(|&x| eb.iter().map(|&y| x * y).collect())
        .collect())
}

/// Input current for an activation: `alpha * gain * i_star`.
///
/// With `gain > 1` a fully activated neuron fires tonically while weakly
/// activated neighbours stay below the rheobase `i_star`.
pub fn activation_to_current(alpha: f64, i_star: f64, gain: f64) -> f64 {
    alpha * gain * i_star
}

#[cfg(test)]
mod tests {
    use super::*;

    const FS: NeuronParams = NeuronParams::FAST_SPIKING;

    #[test]
    fn bundle_layout() {
        let b = make_bundle((0.0, 1.0), 36, FS).unwrap();
        assert_eq!(b.len(), 36);
        assert_eq!(b.centers()[0], 0.0);
        assert_eq!(b.centers()[35], 1.0);
        assert!((b.centers()[1] - 1.0 / 35.0).abs() < 1e-15);
        assert!((b.sigma() - 1.0 / 36.0).abs() < 1e-15);
        let spacing: Vec<f64> = b.centers().windows(2).map(|w| w[1] - w[0]).collect();
        assert!(spacing.iter().all(|s| (s - 1.0 / 35.0).abs() < 1e-12));

        let b = make_bundle((-1.0, 1.0), 2, FS).unwrap();
        assert_eq!(b.centers(), &[-1.0, 1.0]);
        assert_eq!(b.sigma(), 1.0);

        let b = make_bundle((0.0, 0.5), 5, FS).unwrap();
        assert!((b.sigma() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn bundle_rejects_bad_config() {
        assert!(matches!(make_bundle((1.0, 0.0), 10, FS), Err(Error::Config(_))));
        assert!(matches!(make_bundle((0.0, 1.0), 1, FS), Err(Error::Config(_))));
        assert!(make_bundle((0.0, f64::NAN), 10, FS).is_err());
    }

    #[test]
    fn encode_values() {
        let b = make_bundle((0.0, 1.0), 36, FS).unwrap();
        let k = 7;
        let a = b.encode(b.centers()[k]).unwrap();
        assert_eq!(a[k], 1.0);
        let a = b.encode(b.centers()[k] + b.sigma()).unwrap();
        assert!((a[k] - (-0.5f64).exp()).abs() < 1e-12);
        let a = b.encode(b.centers()[k] - b.sigma() * 2f64.sqrt()).unwrap();
        assert!((a[k] - (-1.0f64).exp()).abs() < 1e-12);
        assert!(b.encode(f64::NAN).is_err());
        // Out of range values are encoded with decaying tails.
        let a = b.encode(1.2).unwrap();
        assert!(a.iter().all(|x| x.is_finite() && *x < 1e-3));
    }

    #[test]
    fn joint_encoding() {
        let a = make_bundle((0.0, 1.0), 5, FS).unwrap();
        let b = make_bundle((0.0, 2.0), 4, FS).unwrap();
        let m = encode_joint_2d(&a, &b, a.centers()[2], b.centers()[1]).unwrap();
        assert_eq!(m.len(), 5);
        assert_eq!(m[0].len(), 4);
        assert_eq!(m[2][1], 1.0);
        let m = encode_joint_2d(&a, &b, a.centers()[2], b.centers()[1] + b.sigma()).unwrap();
        assert!((m[2][1] - (-0.5f64).exp()).abs() < 1e-12);
        let m = encode_joint_2d(&a, &b, 0.5, 1e6).unwrap();
        assert!(m.iter().flatten().all(|&x| x == 0.0));
    }

    #[test]
    fn decode_values() {
        let b = make_bundle((0.0, 1.0), 3, FS).unwrap();
        assert_eq!(b.decode(&[0.0, 0.0, 3.0]).unwrap(), 1.0);
        assert!((b.decode(&[0.0, 4.0, 4.0]).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(b.decode(&[2.0, 1.0, 2.0]).unwrap(), 0.5);
        assert_eq!(b.decode_counts(&[0, 4, 4]).unwrap(), 0.75);
        assert!(matches!(b.decode(&[0.0; 3]), Err(Error::NoActivity)));
        assert!(matches!(b.decode(&[1.0; 2]), Err(Error::Contract(_))));
        assert!(b.decode(&[1.0, -1.0, 0.0]).is_err());
    }

    #[test]
    fn current_mapping() {
        assert_eq!(activation_to_current(0.0, 4.0, 1.5), 0.0);
        assert!((activation_to_current(1.0, 4.0, 1.5) - 6.0).abs() < 1e-12);
        let i = activation_to_current((-0.5f64).exp(), 4.0, 1.5);
        assert!((i - 3.639).abs() < 1e-3 && i < 4.0);
    }
}
