//! Vector fields: the standard Lorenz system, its normal form, and the
//! linearization of the normal form near the z-axis.
//!
//! Every component is evaluated in a fixed left-to-right order so that runs
//! are bit-reproducible on a given platform.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// A point (or a derivative vector) in phase space.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl State3 {
    pub const ORIGIN: State3 = State3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        State3 { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn max_norm(&self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// The image under the (x, y) -> (-x, -y) symmetry shared by all three systems.
    pub fn mirrored(self) -> Self {
        State3::new(-self.x, -self.y, self.z)
    }
}

impl From<[f64; 3]> for State3 {
    fn from(v: [f64; 3]) -> Self {
        State3::new(v[0], v[1], v[2])
    }
}

impl Add for State3 {
    type Output = State3;
    fn add(self, o: State3) -> State3 {
        State3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for State3 {
    type Output = State3;
    fn sub(self, o: State3) -> State3 {
        State3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for State3 {
    type Output = State3;
    fn mul(self, k: f64) -> State3 {
        State3::new(self.x * k, self.y * k, self.z * k)
    }
}

impl Neg for State3 {
    type Output = State3;
    fn neg(self) -> State3 {
        State3::new(-self.x, -self.y, -self.z)
    }
}

impl fmt::Display for State3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// Parameters of the standard Lorenz system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LorenzParams {
    pub s: f64,
    pub r: f64,
    pub b: f64,
}

impl Default for LorenzParams {
    fn default() -> Self {
        LorenzParams {
            s: 10.0,
            r: 28.0,
            b: 8.0 / 3.0,
        }
    }
}

impl LorenzParams {
    pub fn new(s: f64, r: f64, b: f64) -> Result<Self> {
        let p = LorenzParams { s, r, b };
        p.validate()?;
        Ok(p)
    }

    /// Same as the defaults but with a different `r`.
    pub fn with_r(r: f64) -> Result<Self> {
        let d = Self::default();
        Self::new(d.s, r, d.b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s.is_finite() && self.s > 0.0) {
            return Err(LabError::Domain {
                what: "s",
                value: self.s,
                domain: "(0, inf)",
            });
        }
        if !(self.b.is_finite() && self.b > 0.0) {
            return Err(LabError::Domain {
                what: "b",
                value: self.b,
                domain: "(0, inf)",
            });
        }
        if !(self.r.is_finite() && self.r >= 0.0) {
            return Err(LabError::Domain {
                what: "r",
                value: self.r,
                domain: "[0, inf)",
            });
        }
        Ok(())
    }
}

/// Fixed coefficients of the normal form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalFormCoefficients {
    pub c_xx: f64,
    pub c_mix: f64,
    pub c_yy: f64,
    pub c_zz: f64,
    pub c_q1: f64,
    pub c_q2: f64,
}

pub const NORMAL_FORM: NormalFormCoefficients = NormalFormCoefficients {
    c_xx: 11.8,
    c_mix: 0.29,
    c_yy: 22.8,
    c_zz: 2.67,
    c_q1: 2.2,
    c_q2: 1.3,
};

impl NormalFormCoefficients {
    /// Sum of the linear growth rates; negative means net contraction far from
    /// the equilibria.
    pub fn eigenvalue_sum(&self) -> f64 {
        self.c_xx - self.c_yy - self.c_zz
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemId {
    Standard,
    NormalForm,
    /// Only meaningful near the z-axis.
    LinearizedAxis,
}

impl SystemId {
    pub fn name(&self) -> &'static str {
        match self {
            SystemId::Standard => "standard",
            SystemId::NormalForm => "normal_form",
            SystemId::LinearizedAxis => "linearized_axis",
        }
    }

    /// Evaluates the vector field. `params` is ignored by the normal form and
    /// its linearization.
    pub fn eval(&self, state: State3, params: &LorenzParams) -> State3 {
        match self {
            SystemId::Standard => eval_standard(state, params),
            SystemId::NormalForm => eval_normal_form(state),
            SystemId::LinearizedAxis => eval_linearized(state),
        }
    }

    /// Analytic Jacobian, row-major.
    pub fn jacobian(&self, state: State3, params: &LorenzParams) -> [[f64; 3]; 3] {
        match self {
            SystemId::Standard => jacobian_standard(state, params),
            SystemId::NormalForm => jacobian_normal_form(state),
            SystemId::LinearizedAxis => jacobian_linearized(state),
        }
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn eval_standard(state: State3, params: &LorenzParams) -> State3 {
    let State3 { x, y, z } = state;
    let LorenzParams { s, r, b } = *params;
    State3::new(-s * x + s * y, r * x - y - x * z, -b * z + x * y)
}

pub fn eval_normal_form(state: State3) -> State3 {
    let State3 { x, y, z } = state;
    let c = &NORMAL_FORM;
    State3::new(
        c.c_xx * x - c.c_mix * (x + y) * z,
        -c.c_yy * y + c.c_mix * (x + y) * z,
        -c.c_zz * z + (x + y) * (c.c_q1 * x - c.c_q2 * y),
    )
}

/// The normal form with the quadratic term of the z-equation dropped.
pub fn eval_linearized(state: State3) -> State3 {
    let State3 { x, y, z } = state;
    let c = &NORMAL_FORM;
    State3::new(
        c.c_xx * x - c.c_mix * (x + y) * z,
        -c.c_yy * y + c.c_mix * (x + y) * z,
        -c.c_zz * z,
    )
}

/// Divergence of the standard field, constant over phase space.
pub fn divergence_standard(params: &LorenzParams) -> f64 {
    -(params.s + 1.0 + params.b)
}

fn jacobian_standard(state: State3, p: &LorenzParams) -> [[f64; 3]; 3] {
    let State3 { x, y, z } = state;
    [[-p.s, p.s, 0.0], [p.r - z, -1.0, -x], [y, x, -p.b]]
}

fn jacobian_normal_form(state: State3) -> [[f64; 3]; 3] {
    let State3 { x, y, z } = state;
    let c = &NORMAL_FORM;
    let q = c.c_q1 * x - c.c_q2 * y;
    [
        [c.c_xx - c.c_mix * z, -c.c_mix * z, -c.c_mix * (x + y)],
        [c.c_mix * z, -c.c_yy + c.c_mix * z, c.c_mix * (x + y)],
        [q + c.c_q1 * (x + y), q - c.c_q2 * (x + y), -c.c_zz],
    ]
}

fn jacobian_linearized(state: State3) -> [[f64; 3]; 3] {
    let mut j = jacobian_normal_form(state);
    j[2] = [0.0, 0.0, -NORMAL_FORM.c_zz];
    j
}

/// Seed for refining the nonzero normal-form equilibria.
pub const NORMAL_FORM_EQUILIBRIUM_SEED: State3 = State3::new(5.5929, 2.8981, 26.8698);

const EQUILIBRIUM_MAX_ITERATIONS: usize = 100;

/// Equilibria of `system`, origin first, then the symmetric pair (positive x first).
pub fn equilibria(system: SystemId, params: &LorenzParams) -> Result<Vec<State3>> {
    match system {
        SystemId::Standard => {
            params.validate()?;
            let mut out = vec![State3::ORIGIN];
            if params.r > 1.0 {
                let c = (params.b * (params.r - 1.0)).sqrt();
                let z = params.r - 1.0;
                out.push(State3::new(c, c, z));
                out.push(State3::new(-c, -c, z));
            }
            Ok(out)
        }
        SystemId::NormalForm => {
            let plus = refine_equilibrium(system, params, NORMAL_FORM_EQUILIBRIUM_SEED)?;
            let minus = refine_equilibrium(system, params, NORMAL_FORM_EQUILIBRIUM_SEED.mirrored())?;
            Ok(vec![State3::ORIGIN, plus, minus])
        }
        SystemId::LinearizedAxis => Err(LabError::InvalidInput(
            "the near-axis linearization has no meaningful off-axis equilibria".into(),
        )),
    }
}

/// Newton iteration on the vector field from `seed`.
pub fn refine_equilibrium(system: SystemId, params: &LorenzParams, seed: State3) -> Result<State3> {
    let mut p = seed;
    for _ in 0..EQUILIBRIUM_MAX_ITERATIONS {
        let f = system.eval(p, params);
        if !f.is_finite() {
            break;
        }
        if f.max_norm() <= 1e-12 {
            return Ok(p);
        }
        let j = system.jacobian(p, params);
        let Some(delta) = solve3(j, f.to_array()) else {
            break;
        };
        let next = p - State3::from(delta);
        if (next - p).max_norm() <= 4.0 * f64::EPSILON * next.max_norm() {
            let r = system.eval(next, params).max_norm();
            if r <= 1e-9 {
                return Ok(next);
            }
        }
        p = next;
    }
    Err(LabError::RootNotConverged {
        seed: seed.to_array(),
        iterations: EQUILIBRIUM_MAX_ITERATIONS,
    })
}

/// Solves a 3x3 system by Gaussian elimination with partial pivoting.
pub(crate) fn solve3(mut a: [[f64; 3]; 3], mut rhs: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col] == 0.0 || !a[pivot][col].is_finite() {
            return None;
        }
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..3 {
            let m = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (v, p) in a[row].iter_mut().zip(pivot_row).skip(col) {
                *v -= m * p;
            }
            rhs[row] -= m * rhs[col];
        }
    }
    let mut out = [0.0; 3];
    for row in (0..3).rev() {
        let mut acc = rhs[row];
        for k in row + 1..3 {
            acc -= a[row][k] * out[k];
        }
        out[row] = acc / a[row][row];
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn defaults() -> LorenzParams {
        LorenzParams::default()
    }

    #[test]
    fn standard_field_values() {
        assert_eq!(eval_standard(State3::ORIGIN, &defaults()), State3::ORIGIN);
        let f = eval_standard(State3::new(1.0, -1.0, 10.0), &defaults());
        assert_eq!(f.x, -20.0);
        assert_eq!(f.y, 19.0);
        assert!((f.z - (-83.0 / 3.0)).abs() < 1e-12);

        let c = 72f64.sqrt();
        let f = eval_standard(State3::new(c, c, 27.0), &defaults());
        assert!(f.max_norm() <= 1e-9);
    }

    #[test]
    fn normal_form_field_values() {
        assert_eq!(eval_normal_form(State3::ORIGIN), State3::ORIGIN);
        // printed equilibrium: rounded coefficients leave a visible residual
        let printed = eval_normal_form(State3::new(5.5929, 2.8981, 26.8698));
        assert!(printed.max_norm() <= 1.0);
        assert!(printed.max_norm() > 1e-3);
        let exact = eval_normal_form(State3::new(5.5578, 2.8765, 26.8128));
        assert!(exact.max_norm() <= 1e-2, "{exact}");
    }

    #[test]
    fn linearized_field_values() {
        let f = eval_linearized(State3::new(0.0, 0.0, 7.0));
        assert_eq!(f, State3::new(0.0, 0.0, -2.67 * 7.0));
        assert_eq!(eval_linearized(State3::ORIGIN), State3::ORIGIN);
        let p = State3::new(1e-6, 1e-6, 10.0);
        let lin = eval_linearized(p);
        let full = eval_normal_form(p);
        assert_eq!(lin.x, full.x);
        assert_eq!(lin.y, full.y);
        assert!((lin.z - (-26.7)).abs() < 1e-12);
    }

    #[test]
    fn standard_equilibria() {
        let eq = equilibria(SystemId::Standard, &defaults()).unwrap();
        assert_eq!(eq.len(), 3);
        assert_eq!(eq[0], State3::ORIGIN);
        assert!((eq[1].x - 8.485281374238571).abs() < 1e-12);
        assert_eq!(eq[1].x, eq[1].y);
        assert_eq!(eq[1].z, 27.0);
        assert_eq!(eq[2], eq[1].mirrored());
        for e in &eq {
            assert!(eval_standard(*e, &defaults()).max_norm() <= 1e-9);
        }

        let low = LorenzParams::with_r(0.5).unwrap();
        assert_eq!(equilibria(SystemId::Standard, &low).unwrap(), vec![State3::ORIGIN]);
    }

    #[test]
    fn normal_form_equilibria() {
        let eq = equilibria(SystemId::NormalForm, &defaults()).unwrap();
        assert_eq!(eq.len(), 3);
        let expected = State3::new(5.5578, 2.8765, 26.8128);
        assert!((eq[1] - expected).max_norm() < 1e-3, "{}", eq[1]);
        assert!((eq[2] - expected.mirrored()).max_norm() < 1e-3, "{}", eq[2]);
        for e in &eq {
            assert!(eval_normal_form(*e).max_norm() <= 1e-9);
        }
    }

    #[test]
    fn refinement_failure_names_the_seed() {
        // a seed at infinity can never converge
        let seed = State3::new(f64::INFINITY, 0.0, 0.0);
        let err = refine_equilibrium(SystemId::NormalForm, &defaults(), seed).unwrap_err();
        assert!(matches!(err, LabError::RootNotConverged { .. }));
        assert!(err.to_string().contains("inf"));
    }

    #[test]
    fn divergence_and_contraction() {
        assert!((divergence_standard(&defaults()) - (-41.0 / 3.0)).abs() < 1e-12);
        assert!((NORMAL_FORM.eigenvalue_sum() - (-13.67)).abs() < 1e-12);
    }

    #[test]
    fn params_validation() {
        assert!(LorenzParams::new(0.0, 28.0, 1.0).is_err());
        assert!(LorenzParams::new(10.0, -1.0, 1.0).is_err());
        assert!(LorenzParams::new(10.0, 28.0, 0.0).is_err());
        assert!(LorenzParams::new(10.0, 0.0, 1.0).is_ok());
    }

    #[test]
    fn jacobians_match_finite_differences() {
        let p = State3::new(1.3, -0.7, 12.0);
        for system in [SystemId::Standard, SystemId::NormalForm, SystemId::LinearizedAxis] {
            let j = system.jacobian(p, &defaults());
            let h = 1e-6;
            for col in 0..3 {
                let mut e = [0.0; 3];
                e[col] = h;
                let plus = system.eval(p + State3::from(e), &defaults());
                let minus = system.eval(p - State3::from(e), &defaults());
                let d = (plus - minus) * (0.5 / h);
                for (row, v) in d.to_array().iter().enumerate() {
                    assert!((j[row][col] - v).abs() < 1e-6, "{system} [{row}][{col}]");
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn fields_respect_xy_symmetry(x in -30.0..30.0f64, y in -30.0..30.0f64, z in -5.0..60.0f64) {
            let p = State3::new(x, y, z);
            for system in [SystemId::Standard, SystemId::NormalForm] {
                let f = system.eval(p, &defaults());
                let g = system.eval(p.mirrored(), &defaults());
                prop_assert_eq!(g, f.mirrored());
            }
        }

        #[test]
        fn z_axis_is_invariant(z in -100.0..100.0f64) {
            let f = eval_normal_form(State3::new(0.0, 0.0, z));
            prop_assert_eq!(f.x, 0.0);
            prop_assert_eq!(f.y, 0.0);
        }
    }
}
