//! The Liénard equation `α'' + 6αα' + 4α³ + c²α = 0`.
//!
//! For `c = 0` every solution belongs to one of four closed-form families:
//!
//! | family       | `α(x)`                          |
//! |--------------|---------------------------------|
//! | `Zero`       | `0`                             |
//! | `SpecialI`   | `1/(x + c1)`                    |
//! | `SpecialII`  | `1/(2x + c1)`                   |
//! | `General`    | `(x + c1)/((x + c1)² + c2)`     |
//!
//! This module evaluates them, fits them to phase data, integrates the
//! equation numerically (for any `c`) and samples the phase plane.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::func::ScalarFn;

/// Tolerances for the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Denominators with smaller magnitude count as singular.
    pub den: f64,
    /// `|c2|` below this (relative to `X0²`) selects `SpecialI` in fits.
    pub fit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { den: 1e-12, fit: 1e-10 }
    }
}

/// Overflow guard for [`integrate_ivp`].
pub const BLOW_UP_GUARD: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum AlphaSolution {
    Zero,
    SpecialI { c1: f64 },
    SpecialII { c1: f64 },
    General { c1: f64, c2: f64 },
}

impl AlphaSolution {
    pub fn family_name(&self) -> &'static str {
        match self {
            AlphaSolution::Zero => "Zero",
            AlphaSolution::SpecialI { .. } => "SpecialI",
            AlphaSolution::SpecialII { .. } => "SpecialII",
            AlphaSolution::General { .. } => "General",
        }
    }

    /// Points where `α` is undefined (empty, one or two).
    pub fn singular_points(&self) -> Vec<f64> {
        match *self {
            AlphaSolution::Zero => vec![],
            AlphaSolution::SpecialI { c1 } => vec![-c1],
            AlphaSolution::SpecialII { c1 } => vec![-c1 / 2.0],
            AlphaSolution::General { c1, c2 } if c2 < 0.0 => {
                let r = (-c2).sqrt();
                vec![-c1 - r, -c1 + r]
            }
            AlphaSolution::General { .. } => vec![],
        }
    }

    fn denominator(&self, x: f64) -> f64 {
        match *self {
            AlphaSolution::Zero => 1.0,
            AlphaSolution::SpecialI { c1 } => x + c1,
            AlphaSolution::SpecialII { c1 } => 2.0 * x + c1,
            AlphaSolution::General { c1, c2 } => (x + c1).powi(2) + c2,
        }
    }

    /// `(α, α', α'')` at `x`, without the singularity check.
    pub fn derivatives(&self, x: f64) -> (f64, f64, f64) {
        match *self {
            AlphaSolution::Zero => (0.0, 0.0, 0.0),
            AlphaSolution::SpecialI { c1 } => {
                let d = x + c1;
                (1.0 / d, -1.0 / (d * d), 2.0 / (d * d * d))
            }
            AlphaSolution::SpecialII { c1 } => {
                let d = 2.0 * x + c1;
                (1.0 / d, -2.0 / (d * d), 8.0 / (d * d * d))
            }
            AlphaSolution::General { c1, c2 } => {
                let xx = x + c1;
                let n = xx * xx + c2;
                (
                    xx / n,
                    (c2 - xx * xx) / (n * n),
                    2.0 * xx * (xx * xx - 3.0 * c2) / (n * n * n),
                )
            }
        }
    }
}

impl ScalarFn for AlphaSolution {
    fn eval(&self, x: f64) -> f64 {
        self.derivatives(x).0
    }
    fn d1(&self, x: f64) -> f64 {
        self.derivatives(x).1
    }
    fn d2(&self, x: f64) -> f64 {
        self.derivatives(x).2
    }
}

/// `(α, α')` at `x`.
pub fn eval_alpha(s: &AlphaSolution, x: f64) -> Result<(f64, f64)> {
    eval_alpha_with(s, x, &Tolerances::default())
}

pub fn eval_alpha_with(s: &AlphaSolution, x: f64, tol: &Tolerances) -> Result<(f64, f64)> {
    if let AlphaSolution::General { c2, .. } = s {
        if *c2 == 0.0 {
            return Err(Error::InvalidInput("general family requires c2 != 0".into()));
        }
    }
    if s.denominator(x).abs() <= tol.den {
        return Err(Error::singular(x, format!("{} denominator vanishes", s.family_name())));
    }
    let (a, v, _) = s.derivatives(x);
    Ok((a, v))
}

/// `f'' + 6 f f' + 4 f³ + c² f` at `x`.
pub fn lienard_residual<F: ScalarFn + ?Sized>(f: &F, x: f64, c: f64) -> f64 {
    let (a, v, w) = (f.eval(x), f.d1(x), f.d2(x));
    w + 6.0 * a * v + 4.0 * a * a * a + c * c * a
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseState {
    pub alpha: f64,
    /// `α'`.
    pub v: f64,
}

impl PhaseState {
    pub fn new(alpha: f64, v: f64) -> Self {
        PhaseState { alpha, v }
    }
}

/// Right-hand side of the first-order system `α' = v`, `v' = −(6αv + 4α³ + c²α)`.
pub fn phase_rhs(s: PhaseState, c: f64) -> PhaseState {
    let a = s.alpha;
    PhaseState::new(s.v, -(6.0 * a * s.v + 4.0 * a * a * a + c * c * a))
}

/// A fixed-step RK4 solution with C² interpolation between nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub c: f64,
    pub points: Vec<(f64, PhaseState)>,
}

impl Trajectory {
    pub fn x_range(&self) -> (f64, f64) {
        let a = self.points.first().map_or(0.0, |p| p.0);
        let b = self.points.last().map_or(0.0, |p| p.0);
        (a.min(b), a.max(b))
    }

    /// State at `x` by quintic Hermite interpolation using `α`, `α'` and the
    /// `α''` implied by the equation. Clamped to the covered range.
    pub fn state_at(&self, x: f64) -> PhaseState {
        let (a, v, _) = self.hermite(x);
        PhaseState::new(a, v)
    }

    /// `(α, α', α'')` at `x` from the interpolant.
    pub fn derivatives_at(&self, x: f64) -> (f64, f64, f64) {
        self.hermite(x)
    }

    fn hermite(&self, x: f64) -> (f64, f64, f64) {
        let pts = &self.points;
        let n = pts.len();
        if n == 1 {
            let s = pts[0].1;
            return (s.alpha, s.v, phase_rhs(s, self.c).v);
        }
        let forward = pts[n - 1].0 >= pts[0].0;
        // Locate the interval by bisection on the (monotone) abscissae.
        let key = |i: usize| if forward { pts[i].0 } else { -pts[i].0 };
        let xk = if forward { x } else { -x };
        let (mut lo, mut hi) = (0usize, n - 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if key(mid) <= xk {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (x0, s0) = pts[lo];
        let (x1, s1) = pts[hi];
        let h = x1 - x0;
        let t = ((x - x0) / h).clamp(0.0, 1.0);
        let (p0, m0, q0) = (s0.alpha, s0.v * h, phase_rhs(s0, self.c).v * h * h);
        let (p1, m1, q1) = (s1.alpha, s1.v * h, phase_rhs(s1, self.c).v * h * h);

        let t2 = t * t;
        let t3 = t2 * t;
        let t4 = t3 * t;
        let t5 = t4 * t;
        let h00 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
        let h10 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
        let h20 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
        let h01 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
        let h11 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
        let h21 = 0.5 * (t3 - 2.0 * t4 + t5);

        let d00 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
        let d10 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
        let d20 = 0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4);
        let d01 = -d00;
        let d11 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
        let d21 = 0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4);

        let s00 = -60.0 * t + 180.0 * t2 - 120.0 * t3;
        let s10 = -36.0 * t + 96.0 * t2 - 60.0 * t3;
        let s20 = 0.5 * (2.0 - 18.0 * t + 36.0 * t2 - 20.0 * t3);
        let s01 = -s00;
        let s11 = -24.0 * t + 84.0 * t2 - 60.0 * t3;
        let s21 = 0.5 * (6.0 * t - 24.0 * t2 + 20.0 * t3);

        let a = h00 * p0 + h10 * m0 + h20 * q0 + h01 * p1 + h11 * m1 + h21 * q1;
        let v = (d00 * p0 + d10 * m0 + d20 * q0 + d01 * p1 + d11 * m1 + d21 * q1) / h;
        let w = (s00 * p0 + s10 * m0 + s20 * q0 + s01 * p1 + s11 * m1 + s21 * q1) / (h * h);
        (a, v, w)
    }
}

/// Classical RK4 from `x0` to `x1` (either direction). The step is shrunk
/// slightly so the last node lands exactly on `x1`.
pub fn integrate_ivp(alpha0: f64, v0: f64, x0: f64, x1: f64, step: f64, c: f64) -> Result<Trajectory> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidInput(format!("step must be positive, got {step}")));
    }
    let span = x1 - x0;
    let n = ((span.abs() / step).ceil() as usize).max(1);
    let h = span / n as f64;
    let mut s = PhaseState::new(alpha0, v0);
    let mut points = Vec::with_capacity(n + 1);
    points.push((x0, s));
    let axpy = |s: PhaseState, k: PhaseState, f: f64| PhaseState::new(s.alpha + f * k.alpha, s.v + f * k.v);
    for i in 0..n {
        let k1 = phase_rhs(s, c);
        let k2 = phase_rhs(axpy(s, k1, 0.5 * h), c);
        let k3 = phase_rhs(axpy(s, k2, 0.5 * h), c);
        let k4 = phase_rhs(axpy(s, k3, h), c);
        s = PhaseState::new(
            s.alpha + h / 6.0 * (k1.alpha + 2.0 * k2.alpha + 2.0 * k3.alpha + k4.alpha),
            s.v + h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v),
        );
        let x = if i + 1 == n { x1 } else { x0 + (i + 1) as f64 * h };
        if !(s.alpha.abs() <= BLOW_UP_GUARD && s.v.abs() <= BLOW_UP_GUARD) {
            return Err(Error::BlowUp { x, guard: BLOW_UP_GUARD });
        }
        points.push((x, s));
    }
    Ok(Trajectory { c, points })
}

/// The family member through `(x0, α0)` with slope `v0`.
pub fn fit_solution(alpha0: f64, v0: f64, x0: f64) -> AlphaSolution {
    fit_solution_with(alpha0, v0, x0, &Tolerances::default())
}

pub fn fit_solution_with(alpha0: f64, v0: f64, x0: f64, tol: &Tolerances) -> AlphaSolution {
    if alpha0 == 0.0 {
        if v0 == 0.0 {
            return AlphaSolution::Zero;
        }
        return AlphaSolution::General { c1: -x0, c2: 1.0 / v0 };
    }
    // Along the general family, v + 2α² = 1/((x+c1)² + c2), which is the
    // quantity that separates the branches.
    let q = v0 + 2.0 * alpha0 * alpha0;
    if q == 0.0 || q.abs() <= tol.den * alpha0 * alpha0 {
        return AlphaSolution::SpecialII { c1: 1.0 / alpha0 - 2.0 * x0 };
    }
    let xx = alpha0 / q;
    let c1 = xx - x0;
    let c2 = xx / alpha0 - xx * xx;
    if c2.abs() <= tol.fit * (xx * xx).max(1.0) {
        AlphaSolution::SpecialI { c1 }
    } else {
        AlphaSolution::General { c1, c2 }
    }
}

/// The first integral `C = ω(3ω+2)/((3ω+1)²α²)` with `ω = 2α²/(3v)`.
///
/// Evaluated as `4(α² + v)/(3(2α² + v)²)`, which stays well conditioned as
/// `α → 0` or `v → 0` along a general orbit; on the general family it equals
/// `4c2/3`. Undefined when `α = 0`, `v = 0`, or `ω ∈ {−1/3, −2/3}`; those
/// two values are exactly the `SpecialII` and `SpecialI` families.
pub fn conserved_quantity(s: PhaseState) -> Result<f64> {
    let PhaseState { alpha, v } = s;
    if v == 0.0 {
        return Err(Error::DegenerateBranch("v = 0".into()));
    }
    if alpha == 0.0 {
        return Err(Error::DegenerateBranch("alpha = 0 (omega = 0)".into()));
    }
    const REL: f64 = 1e-10;
    let a2 = alpha * alpha;
    let scale = a2 + v.abs();
    let special_two = 2.0 * a2 + v;
    if special_two.abs() <= REL * scale {
        return Err(Error::DegenerateBranch("omega = -1/3".into()));
    }
    if (a2 + v).abs() <= REL * scale {
        return Err(Error::DegenerateBranch("omega = -2/3".into()));
    }
    Ok(4.0 * (a2 + v) / (3.0 * special_two * special_two))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSample {
    pub state: PhaseState,
    /// `(dα, dv)` of the phase field.
    pub direction: (f64, f64),
}

/// Samples `V = (v, −(6αv + 4α³))` on an `nx × nv` grid, `v` fastest.
pub fn phase_field(alpha_range: (f64, f64), v_range: (f64, f64), nx: usize, nv: usize) -> Result<Vec<PhaseSample>> {
    if nx < 2 || nv < 2 {
        return Err(Error::InvalidInput("phase grid needs at least 2 points per axis".into()));
    }
    let lerp = |(lo, hi): (f64, f64), i: usize, n: usize| lo + (hi - lo) * i as f64 / (n - 1) as f64;
    let mut out = Vec::with_capacity(nx * nv);
    for i in 0..nx {
        let alpha = lerp(alpha_range, i, nx);
        for j in 0..nv {
            let state = PhaseState::new(alpha, lerp(v_range, j, nv));
            let d = phase_rhs(state, 0.0);
            out.push(PhaseSample {
                state,
                direction: (d.alpha, d.v),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn closed_form_values() {
        let (a, _) = eval_alpha(&AlphaSolution::SpecialI { c1: 0.0 }, 2.0).unwrap();
        assert_eq!(a, 0.5);
        let (a, v) = eval_alpha(&AlphaSolution::SpecialII { c1: 0.0 }, 1.0).unwrap();
        assert_eq!((a, v), (0.5, -0.5));
        let (a, v) = eval_alpha(&AlphaSolution::General { c1: 1.0, c2: 1.0 }, 0.0).unwrap();
        assert_eq!((a, v), (0.5, 0.0));
        assert!(matches!(
            eval_alpha(&AlphaSolution::SpecialI { c1: 1.0 }, -1.0),
            Err(Error::SingularPoint { .. })
        ));
        assert!(eval_alpha(&AlphaSolution::General { c1: 0.0, c2: 0.0 }, 1.0).is_err());
    }

    #[test]
    fn residual_examples() {
        assert_eq!(lienard_residual(&AlphaSolution::Zero, 3.0, 0.0), 0.0);
        assert_eq!(lienard_residual(&AlphaSolution::SpecialII { c1: 0.0 }, 1.0, 0.0), 0.0);
        assert!(lienard_residual(&AlphaSolution::General { c1: 0.0, c2: 1.0 }, 0.7, 0.0).abs() < 1e-10);
        // not a solution: α = x gives 6x + 4x³
        let id = crate::func::YFunction::from_fns(|x| x, |_| 1.0);
        assert_abs_diff_eq!(lienard_residual(&id, 0.5, 0.0), 3.5, epsilon = 1e-6);
    }

    #[test]
    fn fit_examples() {
        assert_eq!(fit_solution(0.5, 0.0, 0.0), AlphaSolution::General { c1: 1.0, c2: 1.0 });
        assert_eq!(fit_solution(1.0, -1.0, 1.0), AlphaSolution::SpecialI { c1: 0.0 });
        assert_eq!(fit_solution(0.5, -0.5, 0.0), AlphaSolution::SpecialII { c1: 2.0 });
        assert_eq!(fit_solution(0.0, 0.0, 4.0), AlphaSolution::Zero);
        assert_eq!(fit_solution(0.0, 2.0, 1.0), AlphaSolution::General { c1: -1.0, c2: 0.5 });
    }

    #[test]
    fn ivp_examples() {
        let zero = integrate_ivp(0.0, 0.0, 0.0, 1.0, 0.1, 0.0).unwrap();
        assert!(zero.points.iter().all(|(_, s)| s.alpha == 0.0 && s.v == 0.0));

        let general = AlphaSolution::General { c1: 1.0, c2: 1.0 };
        let traj = integrate_ivp(0.5, 0.0, 0.0, 3.0, 1e-3, 0.0).unwrap();
        let err = traj
            .points
            .iter()
            .map(|(x, s)| (s.alpha - general.eval(*x)).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-6, "{err}");
        assert_eq!(traj.points.last().unwrap().0, 3.0);

        let special = AlphaSolution::SpecialI { c1: 0.0 };
        let traj = integrate_ivp(1.0, -1.0, 1.0, 4.0, 1e-3, 0.0).unwrap();
        for x in [1.0, 1.2345, 2.5, 3.999] {
            assert_abs_diff_eq!(traj.state_at(x).alpha, special.eval(x), epsilon = 1e-6);
        }
    }

    #[test]
    fn ivp_backwards_and_blow_up() {
        let special = AlphaSolution::SpecialI { c1: 0.0 };
        let traj = integrate_ivp(0.25, -1.0 / 16.0, 4.0, 1.0, 1e-3, 0.0).unwrap();
        assert_abs_diff_eq!(traj.state_at(1.5).alpha, special.eval(1.5), epsilon = 1e-8);
        let err = integrate_ivp(1.0, -1.0, 1.0, -1.0, 1e-3, 0.0).unwrap_err();
        assert!(matches!(err, Error::BlowUp { .. }), "{err:?}");
        assert!(integrate_ivp(1.0, 0.0, 0.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn interpolant_satisfies_the_equation() {
        let c = 2.0;
        let traj = integrate_ivp(0.2, 0.0, 0.0, 3.0, 1e-3, c).unwrap();
        for x in [0.1234, 1.0005, 2.7] {
            let (a, v, w) = traj.derivatives_at(x);
            assert!((w + 6.0 * a * v + 4.0 * a * a * a + c * c * a).abs() <= 1e-9);
        }
    }

    #[test]
    fn conserved_quantity_examples() {
        let s = PhaseState::new(0.5, 0.0);
        assert!(matches!(conserved_quantity(s), Err(Error::DegenerateBranch(_))));

        let g = AlphaSolution::General { c1: 1.0, c2: 1.0 };
        let at = |x: f64| {
            let (a, v) = eval_alpha(&g, x).unwrap();
            conserved_quantity(PhaseState::new(a, v)).unwrap()
        };
        assert!((at(0.3) - at(1.7)).abs() < 1e-8);
        // Along the general family C = 4 c2 / 3.
        assert_abs_diff_eq!(at(0.3), 4.0 / 3.0, epsilon = 1e-12);

        for s in [AlphaSolution::SpecialII { c1: 0.3 }, AlphaSolution::SpecialI { c1: -0.2 }] {
            let (a, v) = eval_alpha(&s, 1.1).unwrap();
            assert!(matches!(conserved_quantity(PhaseState::new(a, v)), Err(Error::DegenerateBranch(_))));
        }
        assert!(conserved_quantity(PhaseState::new(0.0, 1.0)).is_err());

        // the ω form, away from its removable singularities
        let (a, v): (f64, f64) = (0.7, -0.3);
        let w = 2.0 * a * a / (3.0 * v);
        let direct = w * (3.0 * w + 2.0) / ((3.0 * w + 1.0).powi(2) * a * a);
        assert_abs_diff_eq!(conserved_quantity(PhaseState::new(a, v)).unwrap(), direct, epsilon = 1e-12);
        // tiny α on a general orbit is not a special family
        assert_abs_diff_eq!(conserved_quantity(PhaseState::new(1e-9, 0.5)).unwrap(), 4.0 / (3.0 * 0.5), epsilon = 1e-9);
    }

    #[test]
    fn phase_field_samples() {
        let grid = phase_field((-1.0, 1.0), (-1.0, 1.0), 3, 3).unwrap();
        assert_eq!(grid.len(), 9);
        let find = |a: f64, v: f64| grid.iter().find(|s| s.state == PhaseState::new(a, v)).unwrap().direction;
        assert_eq!(find(0.0, 0.0), (0.0, 0.0));
        assert_eq!(find(1.0, 0.0), (0.0, -4.0));
        assert_eq!(find(0.0, 1.0), (1.0, -0.0));
        let zeros = grid.iter().filter(|s| s.direction == (0.0, 0.0)).count();
        assert_eq!(zeros, 1);
        assert!(phase_field((0.0, 1.0), (0.0, 1.0), 1, 5).is_err());
    }

    fn arb_solution() -> impl Strategy<Value = AlphaSolution> {
        prop_oneof![
            (-3.0f64..3.0).prop_map(|c1| AlphaSolution::SpecialI { c1 }),
            (-3.0f64..3.0).prop_map(|c1| AlphaSolution::SpecialII { c1 }),
            (-3.0f64..3.0, 0.1f64..3.0, any::<bool>())
                .prop_map(|(c1, m, neg)| AlphaSolution::General { c1, c2: if neg { -m } else { m } }),
        ]
    }

    proptest! {
        #[test]
        fn fit_inverts_eval(s in arb_solution(), x0 in -4.0f64..4.0) {
            prop_assume!(s.singular_points().iter().all(|p| (x0 - p).abs() >= 0.1));
            let (a, v) = eval_alpha(&s, x0).unwrap();
            let fit = fit_solution(a, v, x0);
            prop_assert_eq!(fit.family_name(), s.family_name());
            let params = |s: &AlphaSolution| match *s {
                AlphaSolution::Zero => (0.0, 0.0),
                AlphaSolution::SpecialI { c1 } | AlphaSolution::SpecialII { c1 } => (c1, 0.0),
                AlphaSolution::General { c1, c2 } => (c1, c2),
            };
            let (p, q) = (params(&s), params(&fit));
            prop_assert!((p.0 - q.0).abs() <= 1e-8 && (p.1 - q.1).abs() <= 1e-8, "{:?} vs {:?}", s, fit);
        }

        #[test]
        fn families_solve_the_equation(s in arb_solution(), x in -4.0f64..4.0) {
            prop_assume!(s.singular_points().iter().all(|p| (x - p).abs() >= 0.1));
            prop_assert!(lienard_residual(&s, x, 0.0).abs() <= 1e-8);
        }

        #[test]
        fn bounded_orbits(c1 in -2.0f64..2.0, c2 in 0.05f64..4.0) {
            let s = AlphaSolution::General { c1, c2 };
            let traj = integrate_ivp(s.eval(-c1 - 1.0), s.d1(-c1 - 1.0), -c1 - 1.0, -c1 + 1.0, 1e-3, 0.0).unwrap();
            let (imax, _) = traj.points.iter().enumerate()
                .max_by(|a, b| a.1 .1.alpha.abs().total_cmp(&b.1 .1.alpha.abs())).unwrap();
            let xm = traj.points[imax].0;
            let sup = (-1000..=1000)
                .map(|k| traj.state_at(xm + k as f64 * 1e-6).alpha.abs())
                .fold(0.0, f64::max);
            // the maximum sits at x = -c1 + sqrt(c2) when that lies in range
            let bound = 1.0 / (2.0 * c2.sqrt());
            prop_assert!(sup <= bound + 1e-6);
            if c2.sqrt() <= 1.0 {
                prop_assert!((sup - bound).abs() <= 1e-6, "{} vs {}", sup, bound);
            }
        }
    }
}
