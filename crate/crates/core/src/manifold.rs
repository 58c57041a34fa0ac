//! Near-axis geometry of the normal form: decay along the z-axis, the local
//! stable and unstable manifold slopes, sector labels, and detection of
//! computed trajectories that cross the local stable surface.
//!
//! Near the z-axis the local manifolds are the planes x = A(z) y, where A is a
//! root of A^2 - 2 B(z) A + 1 = 0 with B(z) = 59.66 / z - 1. The smaller root
//! is the stable slope, the larger the unstable slope. Slopes are evaluated at
//! the instantaneous height of each sample.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::integrators::Trajectory;
use crate::systems::{State3, SystemId, NORMAL_FORM};

/// Numerator of B(z).
pub const B_NUMERATOR: f64 = 59.66;
/// Largest height with real slopes (B >= 1).
pub const SLOPE_Z_MAX: f64 = 29.83;
/// Height where the attractor splits; the linearization is not used above it.
pub const SPLIT_HEIGHT: f64 = 17.9;

pub const DEFAULT_ZONE_RADIUS: f64 = 0.5;
pub const DEFAULT_ZONE_Z_MAX: f64 = 15.0;

/// z(t) along the axis of the linearized system.
pub fn z_decay(z0: f64, t: f64) -> f64 {
    debug_assert!(z0 >= 0.0 && t >= 0.0);
    z0 * (-NORMAL_FORM.c_zz * t).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ManifoldSlopes {
    pub z: f64,
    pub b: f64,
    /// Stable slope: the local stable surface is x = a_minus * y.
    pub a_minus: f64,
    /// Unstable slope.
    pub a_plus: f64,
}

pub fn slopes(z: f64) -> Result<ManifoldSlopes> {
    if !(z > 0.0 && z <= SLOPE_Z_MAX) {
        return Err(LabError::Domain {
            what: "z",
            value: z,
            domain: "(0, 29.83]",
        });
    }
    Ok(slopes_unchecked(z))
}

fn slopes_unchecked(z: f64) -> ManifoldSlopes {
    let b = B_NUMERATOR / z - 1.0;
    // b - 1 is exact near the double root, unlike b * b - 1. The stable
    // root is the reciprocal since the roots multiply to 1.
    let a_plus = b + ((b - 1.0) * (b + 1.0)).max(0.0).sqrt();
    let a_minus = 1.0 / a_plus;
    ManifoldSlopes {
        z,
        b,
        a_minus,
        a_plus,
    }
}

/// Signed distance-like offset u = x - a_minus(z) y from the local stable surface.
pub fn stable_offset(state: State3) -> Result<f64> {
    let s = slopes(state.z)?;
    Ok(state.x - s.a_minus * state.y)
}

/// Offset w = x - a_plus(z) y from the local unstable surface.
pub fn unstable_offset(state: State3) -> Result<f64> {
    let s = slopes(state.z)?;
    Ok(state.x - s.a_plus * state.y)
}

/// Sector of the x-y plane at the state's height, from the signs of the
/// stable offset u and unstable offset w:
///
/// | sector | u | w | contains |
/// |--------|---|---|----------|
/// | 1 | + | + | +x axis |
/// | 2 | - | + | forbidden |
/// | 3 | - | - | -x axis |
/// | 4 | + | - | forbidden |
///
/// A zero offset resolves to the lower-numbered adjacent sector. Heights above
/// the split height are refused.
pub fn classify_sector(state: State3) -> Result<u8> {
    if !(state.z > 0.0 && state.z <= SPLIT_HEIGHT) {
        return Err(LabError::Domain {
            what: "z",
            value: state.z,
            domain: "(0, 17.9]",
        });
    }
    Ok(sector_unchecked(state))
}

fn sector_unchecked(state: State3) -> u8 {
    let s = slopes_unchecked(state.z);
    sector_from_offsets(state.x - s.a_minus * state.y, state.x - s.a_plus * state.y)
}

fn sector_from_offsets(u: f64, w: f64) -> u8 {
    if u == 0.0 {
        return if w >= 0.0 { 1 } else { 3 };
    }
    if w == 0.0 {
        return if u > 0.0 { 1 } else { 2 };
    }
    match (u > 0.0, w > 0.0) {
        (true, true) => 1,
        (false, true) => 2,
        (false, false) => 3,
        (true, false) => 4,
    }
}

/// Neighbourhood of the z-axis where the linearized picture is used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NearZone {
    pub radius: f64,
    pub z_max: f64,
}

impl Default for NearZone {
    fn default() -> Self {
        NearZone {
            radius: DEFAULT_ZONE_RADIUS,
            z_max: DEFAULT_ZONE_Z_MAX,
        }
    }
}

impl NearZone {
    pub fn new(radius: f64, z_max: f64) -> Result<Self> {
        let zone = NearZone { radius, z_max };
        zone.validate()?;
        Ok(zone)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(LabError::Domain {
                what: "zone radius",
                value: self.radius,
                domain: "(0, inf)",
            });
        }
        if !(self.z_max > 0.0 && self.z_max <= SPLIT_HEIGHT) {
            return Err(LabError::Domain {
                what: "zone z_max",
                value: self.z_max,
                domain: "(0, 17.9]",
            });
        }
        Ok(())
    }

    pub fn contains(&self, s: State3) -> bool {
        s.z > 0.0 && s.z <= self.z_max && s.x * s.x + s.y * s.y <= self.radius * self.radius
    }
}

/// A crossing of the local stable surface between two consecutive samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpEvent {
    /// Time of the later sample.
    pub t: f64,
    pub state_before: State3,
    pub state_after: State3,
    pub u_before: f64,
    pub u_after: f64,
    pub sector_before: u8,
    pub sector_after: u8,
}

/// Whether the near-axis picture is only a heuristic for this system's coordinates.
pub fn jumps_are_heuristic(system: SystemId) -> bool {
    system == SystemId::Standard
}

/// Incremental jump detector fed one sample at a time, so runs can be
/// scanned at every step without being stored.
#[derive(Debug, Clone)]
pub struct JumpScanner {
    zone: NearZone,
    prev: Option<(f64, State3)>,
}

impl JumpScanner {
    pub fn new(zone: NearZone) -> Self {
        JumpScanner { zone, prev: None }
    }

    /// Feeds the next sample; returns an event if the stable offset changed
    /// sign strictly between the previous sample and this one, both in the zone.
    pub fn push(&mut self, t: f64, state: State3) -> Option<JumpEvent> {
        let prev = self.prev.replace((t, state));
        let (_, before) = prev?;
        if !(self.zone.contains(before) && self.zone.contains(state)) {
            return None;
        }
        let sa = slopes_unchecked(before.z);
        let sb = slopes_unchecked(state.z);
        let u_before = before.x - sa.a_minus * before.y;
        let u_after = state.x - sb.a_minus * state.y;
        let flipped = (u_before > 0.0 && u_after < 0.0) || (u_before < 0.0 && u_after > 0.0);
        flipped.then(|| JumpEvent {
            t,
            state_before: before,
            state_after: state,
            u_before,
            u_after,
            sector_before: sector_unchecked(before),
            sector_after: sector_unchecked(state),
        })
    }
}

/// Scans consecutive sample pairs that both lie in `zone` and reports every
/// strict sign change of the stable offset, in time order.
pub fn detect_jumps(traj: &Trajectory, zone: &NearZone) -> Vec<JumpEvent> {
    let mut scanner = JumpScanner::new(*zone);
    traj.samples
        .iter()
        .filter_map(|s| scanner.push(s.t, s.state))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrators::Sample;
    use proptest::prelude::*;

    #[test]
    fn decay_values() {
        assert_eq!(z_decay(15.0, 0.0), 15.0);
        assert!((z_decay(15.0, 1.0) - 1.038_783_379_640_19).abs() < 1e-12);
        assert!(z_decay(15.0, 200.0) > 0.0);
    }

    #[test]
    fn double_root_at_the_top() {
        let s = slopes(29.83).unwrap();
        assert_eq!(s.b, 1.0);
        assert_eq!(s.a_minus, 1.0);
        assert_eq!(s.a_plus, 1.0);
    }

    #[test]
    fn slopes_at_b_equals_three() {
        let s = slopes(14.915).unwrap();
        assert!((s.b - 3.0).abs() < 1e-12);
        assert!((s.a_minus - 0.1715729).abs() < 1e-6);
        assert!((s.a_plus - 5.8284271).abs() < 1e-6);
        assert!((s.a_minus * s.a_plus - 1.0).abs() < 1e-12);
    }

    #[test]
    fn slopes_approach_the_axes_as_z_vanishes() {
        let s = slopes(1e-6).unwrap();
        assert!(s.a_minus < 1e-7);
        assert!(s.a_plus > 1e7);
    }

    #[test]
    fn slope_domain() {
        assert!(slopes(0.0).is_err());
        assert!(slopes(-1.0).is_err());
        assert!(slopes(29.84).is_err());
        assert!(slopes(f64::NAN).is_err());
        assert!(stable_offset(State3::new(1.0, 1.0, 40.0)).is_err());
    }

    #[test]
    fn stable_offset_values() {
        assert_eq!(stable_offset(State3::new(1e-4, 0.0, 10.0)).unwrap(), 1e-4);
        let a = slopes(10.0).unwrap().a_minus;
        assert!((a - 0.101_726_570_185_43).abs() < 1e-12);
        for y in [-3.0, 0.25, 1.0, 7.5] {
            assert!(stable_offset(State3::new(a * y, y, 10.0)).unwrap().abs() < 1e-15);
        }
        let u = stable_offset(State3::new(0.0, 1e-4, 10.0)).unwrap();
        assert!(u < 0.0);
        assert!((u + a * 1e-4).abs() < 1e-18);
    }

    #[test]
    fn sectors() {
        assert_eq!(classify_sector(State3::new(1.0, 0.0, 10.0)).unwrap(), 1);
        assert_eq!(classify_sector(State3::new(-1.0, 0.0, 10.0)).unwrap(), 3);
        let a = slopes(10.0).unwrap().a_minus;
        let y = 0.3;
        let eps = 1e-6;
        let above = classify_sector(State3::new(a * y + eps, y, 10.0)).unwrap();
        let below = classify_sector(State3::new(a * y - eps, y, 10.0)).unwrap();
        assert_ne!(above, below);
        assert!(classify_sector(State3::new(1.0, 0.0, 18.0)).is_err());
    }

    #[test]
    fn sector_ties_take_the_lower_neighbour() {
        assert_eq!(sector_from_offsets(0.0, 1.0), 1);
        assert_eq!(sector_from_offsets(0.0, -1.0), 3);
        assert_eq!(sector_from_offsets(1.0, 0.0), 1);
        assert_eq!(sector_from_offsets(-1.0, 0.0), 2);
        assert_eq!(sector_from_offsets(0.0, 0.0), 1);
        assert_eq!(sector_from_offsets(-1.0, 1.0), 2);
        assert_eq!(sector_from_offsets(1.0, -1.0), 4);
    }

    #[test]
    fn zone_validation() {
        assert!(NearZone::new(0.0, 10.0).is_err());
        assert!(NearZone::new(0.5, 18.0).is_err());
        assert!(NearZone::new(0.5, 17.9).is_ok());
        let z = NearZone::default();
        assert!(z.contains(State3::new(0.1, 0.1, 5.0)));
        assert!(!z.contains(State3::new(0.1, 0.1, 16.0)));
        assert!(!z.contains(State3::new(0.1, 0.1, 0.0)));
        assert!(!z.contains(State3::new(0.5, 0.5, 5.0)));
    }

    fn traj(points: &[State3]) -> Trajectory {
        let samples = points
            .iter()
            .enumerate()
            .map(|(k, s)| Sample {
                t: k as f64 * 0.01,
                state: *s,
            })
            .collect();
        Trajectory::from_samples(SystemId::NormalForm, 0.01, samples)
    }

    #[test]
    fn no_events_outside_the_zone() {
        let t = traj(&[State3::new(5.0, -5.0, 10.0), State3::new(-5.0, 5.0, 10.0)]);
        assert!(detect_jumps(&t, &NearZone::default()).is_empty());
    }

    #[test]
    fn one_constructed_crossing() {
        let a = slopes(10.0).unwrap().a_minus;
        let y = 0.1;
        let t = traj(&[
            State3::new(a * y + 1e-6, y, 10.0),
            State3::new(a * y - 1e-6, y, 10.0),
        ]);
        let events = detect_jumps(&t, &NearZone::default());
        assert_eq!(events.len(), 1);
        let e = events[0];
        assert!(e.u_before > 0.0 && e.u_after < 0.0);
        assert_eq!(e.t, 0.01);
        assert_ne!(e.sector_before, e.sector_after);
    }

    #[test]
    fn heuristic_flag() {
        assert!(jumps_are_heuristic(SystemId::Standard));
        assert!(!jumps_are_heuristic(SystemId::NormalForm));
    }

    proptest! {
        #[test]
        fn sector_symmetry(x in -5.0..5.0f64, y in -5.0..5.0f64, z in 0.01..17.9f64) {
            let s = State3::new(x, y, z);
            let u = stable_offset(s).unwrap();
            let w = unstable_offset(s).unwrap();
            prop_assume!(u != 0.0 && w != 0.0);
            let here = classify_sector(s).unwrap();
            let there = classify_sector(s.mirrored()).unwrap();
            prop_assert_eq!(there, (here + 1) % 4 + 1);
        }

        #[test]
        fn slopes_monotone(z in 0.001..29.82f64, dz in 1e-6..0.01f64) {
            let z2 = (z + dz).min(SLOPE_Z_MAX);
            let lo = slopes(z).unwrap();
            let hi = slopes(z2).unwrap();
            prop_assert!(hi.a_minus > lo.a_minus);
            prop_assert!(hi.a_plus < lo.a_plus);
        }

        #[test]
        fn detection_is_idempotent(ys in proptest::collection::vec(-0.3..0.3f64, 2..40)) {
            let points: Vec<State3> = ys.iter().enumerate()
                .map(|(k, &y)| State3::new(0.05 * ((k as f64) * 1.7).sin(), y, 8.0))
                .collect();
            let t = traj(&points);
            let once = detect_jumps(&t, &NearZone::default());
            let twice = detect_jumps(&t.clone(), &NearZone::default());
            prop_assert_eq!(once, twice);
        }
    }
}
