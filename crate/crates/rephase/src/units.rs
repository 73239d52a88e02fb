//! Canonical scaling between physical quantities and the nondimensional
//! system in which the initial orbit radius and the gravitational parameter
//! are both one, so the nominal circular orbit has period 2 pi.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Conversion factors from canonical units back to SI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalScales {
    /// Initial circular-orbit radius, m.
    pub length_unit: f64,
    /// sqrt(radius^3 / mu), s. One canonical time unit; the orbit period is
    /// 2 pi of these.
    pub time_unit: f64,
    /// length_unit / time_unit^2 = mu / radius^2, m/s^2.
    pub accel_unit: f64,
}

/// Builds the canonical scales for a circular orbit of the given radius.
pub fn make_scales(radius: f64, mu: f64) -> Result<CanonicalScales> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Domain(format!("orbit radius must be positive, got {radius}")));
    }
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::Domain(format!("gravitational parameter must be positive, got {mu}")));
    }
    let time_unit = (radius.powi(3) / mu).sqrt();
    Ok(CanonicalScales {
        length_unit: radius,
        time_unit,
        accel_unit: radius / (time_unit * time_unit),
    })
}

impl CanonicalScales {
    pub fn accel_to_canonical(&self, accel_si: f64) -> f64 {
        accel_si / self.accel_unit
    }

    pub fn accel_to_physical(&self, accel_canonical: f64) -> f64 {
        accel_canonical * self.accel_unit
    }

    pub fn time_to_canonical(&self, seconds: f64) -> f64 {
        seconds / self.time_unit
    }

    pub fn time_to_physical(&self, time_canonical: f64) -> f64 {
        time_canonical * self.time_unit
    }
}

/// Converts a rephasing problem statement to canonical form.
///
/// The phase difference doubles as the prescribed final time difference in
/// canonical units. Phases outside [-pi, pi] are rejected rather than
/// wrapped; silent wrapping would hide sign errors in the time difference,
/// so callers wrap explicitly.
pub fn nondimensionalize_problem(
    phase_diff: f64,
    thrust_accel: f64,
    scales: &CanonicalScales,
) -> Result<(f64, f64)> {
    if !phase_diff.is_finite() || phase_diff.abs() > std::f64::consts::PI {
        return Err(Error::Domain(format!(
            "phase difference {phase_diff} rad outside [-pi, pi]; wrap before calling"
        )));
    }
    if !(thrust_accel > 0.0) || !thrust_accel.is_finite() {
        return Err(Error::Domain(format!(
            "thrust acceleration must be positive, got {thrust_accel}"
        )));
    }
    Ok((phase_diff, scales.accel_to_canonical(thrust_accel)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const MU_EARTH: f64 = 3.986_004_418e14;

    #[test]
    fn identity_scaling() {
        let s = make_scales(1.0, 1.0).unwrap();
        assert_eq!(s.time_unit, 1.0);
        assert_eq!(s.accel_unit, 1.0);
    }

    #[test]
    fn leo_accel_unit() {
        // ~530 km altitude circular orbit
        let s = make_scales(6.9e6, MU_EARTH).unwrap();
        assert!((s.accel_unit - 8.37).abs() < 0.01, "got {}", s.accel_unit);
    }

    #[test]
    fn geo_accel_unit() {
        let s = make_scales(42_164e3, MU_EARTH).unwrap();
        assert!((s.accel_unit - 0.224).abs() < 0.001, "got {}", s.accel_unit);
    }

    #[test]
    fn scale_consistency() {
        let s = make_scales(7.0e6, MU_EARTH).unwrap();
        assert_relative_eq!(
            s.accel_unit * s.time_unit * s.time_unit,
            s.length_unit,
            max_relative = 1e-14
        );
    }

    #[test]
    fn nondimensionalize_examples() {
        let s = make_scales(6.9e6, MU_EARTH).unwrap();
        let (dtf, amax) = nondimensionalize_problem(-0.005, 0.1 * s.accel_unit, &s).unwrap();
        assert_relative_eq!(dtf, -0.005, max_relative = 1e-14);
        assert_relative_eq!(amax, 0.1, max_relative = 1e-12);

        let (dtf, amax) = nondimensionalize_problem(0.0, 3.0, &s).unwrap();
        assert_eq!(dtf, 0.0);
        assert!(amax > 0.0);

        let (dtf, amax) = nondimensionalize_problem(-1.0, 0.001 * s.accel_unit, &s).unwrap();
        assert_relative_eq!(dtf, -1.0, max_relative = 1e-14);
        assert_relative_eq!(amax, 0.001, max_relative = 1e-12);
    }

    #[test]
    fn rejects_out_of_range_phase() {
        let s = make_scales(1.0, 1.0).unwrap();
        assert!(nondimensionalize_problem(3.2, 1.0, &s).is_err());
        assert!(nondimensionalize_problem(-4.0, 1.0, &s).is_err());
    }

    #[test]
    fn rejects_nonpositive_inputs() {
        assert!(make_scales(-1.0, 1.0).is_err());
        assert!(make_scales(1.0, 0.0).is_err());
        let s = make_scales(1.0, 1.0).unwrap();
        assert!(nondimensionalize_problem(0.1, -2.0, &s).is_err());
    }

    proptest! {
        #[test]
        fn physical_canonical_round_trip(
            radius in 1.0e6..1.0e9f64,
            mu in 1.0e12..1.0e17f64,
            accel in 1.0e-7..10.0f64,
            t in 1.0..1.0e7f64,
        ) {
            let s = make_scales(radius, mu).unwrap();
            let a2 = s.accel_to_physical(s.accel_to_canonical(accel));
            let t2 = s.time_to_physical(s.time_to_canonical(t));
            prop_assert!((a2 - accel).abs() <= 1e-14 * accel);
            prop_assert!((t2 - t).abs() <= 1e-14 * t);
        }
    }
}
