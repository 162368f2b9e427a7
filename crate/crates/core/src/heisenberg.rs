//! The Heisenberg group H₁: group law, contact form, left-invariant frame,
//! CR structure and rigid motions.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Euclidean 3-vector, used for coordinate tangent vectors.
pub type Vec3 = Vector3<f64>;

/// Horizontal threshold for [`j_rotate`].
pub const HORIZONTAL_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl HPoint {
    pub const ORIGIN: HPoint = HPoint { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        HPoint { x, y, z }
    }

    pub fn to_vec(self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn from_vec(v: Vec3) -> Self {
        HPoint::new(v.x, v.y, v.z)
    }
}

/// A tangent vector at `base`, written in the frame `(ė₁, ė₂, T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameVector {
    pub base: HPoint,
    pub c1: f64,
    pub c2: f64,
    pub ct: f64,
}

impl FrameVector {
    pub fn new(base: HPoint, c1: f64, c2: f64, ct: f64) -> Self {
        FrameVector { base, c1, c2, ct }
    }

    /// Frame coefficients of a coordinate vector `v` at `p`.
    pub fn from_coords(p: HPoint, v: Vec3) -> Self {
        FrameVector::new(p, v.x, v.y, contact_value(p, v))
    }

    /// Coordinate expression `c1 ė₁ + c2 ė₂ + cT T`.
    pub fn to_coords(&self) -> Vec3 {
        let p = self.base;
        Vec3::new(self.c1, self.c2, self.c1 * p.y - self.c2 * p.x + self.ct)
    }

    /// Squared length in the adapted metric.
    pub fn norm2(&self) -> f64 {
        self.c1 * self.c1 + self.c2 * self.c2 + self.ct * self.ct
    }

    pub fn norm(&self) -> f64 {
        self.norm2().sqrt()
    }

    /// Adapted inner product; both vectors are assumed to share a base point.
    pub fn dot(&self, other: &FrameVector) -> f64 {
        self.c1 * other.c1 + self.c2 * other.c2 + self.ct * other.ct
    }

    pub fn is_horizontal(&self) -> bool {
        self.ct.abs() <= HORIZONTAL_EPS
    }
}

pub fn group_mul(p: HPoint, q: HPoint) -> HPoint {
    HPoint::new(p.x + q.x, p.y + q.y, p.z + q.z + p.y * q.x - p.x * q.y)
}

pub fn group_inv(p: HPoint) -> HPoint {
    HPoint::new(-p.x, -p.y, -p.z)
}

/// `Θ(v) = v_z + x v_y − y v_x` at `p`.
pub fn contact_value(p: HPoint, v: Vec3) -> f64 {
    v.z + p.x * v.y - p.y * v.x
}

/// Coordinate expressions of `(ė₁, ė₂, T)` at `p`.
pub fn frame_at(p: HPoint) -> [Vec3; 3] {
    [
        Vec3::new(1.0, 0.0, p.y),
        Vec3::new(0.0, 1.0, -p.x),
        Vec3::new(0.0, 0.0, 1.0),
    ]
}

/// The CR structure: `J ė₁ = ė₂`, `J ė₂ = −ė₁`.
pub fn j_rotate(v: FrameVector) -> Result<FrameVector> {
    if !v.is_horizontal() {
        return Err(Error::NotHorizontal(v.ct));
    }
    Ok(FrameVector::new(v.base, -v.c2, v.c1, 0.0))
}

/// Differential of left translation `q ↦ t ∘ q` (independent of `q`).
pub fn left_translation_jacobian(t: HPoint) -> Matrix3<f64> {
    Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, t.y, -t.x, 1.0)
}

/// A Heisenberg rigid motion: rotation about the z-axis followed by a left
/// translation.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RigidMotion {
    pub translation: HPoint,
    pub rotation_angle: f64,
}

impl RigidMotion {
    pub const IDENTITY: RigidMotion = RigidMotion {
        translation: HPoint::ORIGIN,
        rotation_angle: 0.0,
    };

    pub fn translation(t: HPoint) -> Self {
        RigidMotion {
            translation: t,
            rotation_angle: 0.0,
        }
    }

    pub fn rotation(angle: f64) -> Self {
        RigidMotion {
            translation: HPoint::ORIGIN,
            rotation_angle: angle,
        }
    }

    /// `self ∘ other`, i.e. `other` is applied first.
    ///
    /// Rotations about the z-axis are group automorphisms, which lets the
    /// inner translation be rotated past the outer rotation.
    pub fn compose(&self, other: &RigidMotion) -> RigidMotion {
        RigidMotion {
            translation: group_mul(self.translation, rotate(self.rotation_angle, other.translation)),
            rotation_angle: self.rotation_angle + other.rotation_angle,
        }
    }

    pub fn inverse(&self) -> RigidMotion {
        RigidMotion {
            translation: rotate(-self.rotation_angle, group_inv(self.translation)),
            rotation_angle: -self.rotation_angle,
        }
    }

    /// Jacobian of the motion. Both factors are affine, so it does not depend
    /// on the point.
    pub fn jacobian(&self) -> Matrix3<f64> {
        let (s, c) = self.rotation_angle.sin_cos();
        let rot = Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0);
        left_translation_jacobian(self.translation) * rot
    }
}

fn rotate(angle: f64, p: HPoint) -> HPoint {
    let (s, c) = angle.sin_cos();
    HPoint::new(c * p.x - s * p.y, s * p.x + c * p.y, p.z)
}

pub fn apply_motion(m: &RigidMotion, p: HPoint) -> HPoint {
    group_mul(m.translation, rotate(m.rotation_angle, p))
}

/// Pushes the coordinate vector `v` at `p` forward by `m`. Returns the image
/// point together with the image vector.
pub fn push_forward(m: &RigidMotion, p: HPoint, v: Vec3) -> (HPoint, Vec3) {
    (apply_motion(m, p), m.jacobian() * v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn pt() -> impl Strategy<Value = HPoint> {
        (-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0).prop_map(|(x, y, z)| HPoint::new(x, y, z))
    }

    fn close(p: HPoint, q: HPoint, tol: f64) -> bool {
        (p.to_vec() - q.to_vec()).amax() <= tol
    }

    #[test]
    fn group_law_examples() {
        let (a, b, c) = (0.3, -1.2, 4.0);
        assert_eq!(group_mul(HPoint::ORIGIN, HPoint::new(a, b, c)), HPoint::new(a, b, c));
        assert_eq!(
            group_mul(HPoint::new(1.0, 0.0, 0.0), HPoint::new(0.0, 1.0, 0.0)),
            HPoint::new(1.0, 1.0, -1.0)
        );
        let p = HPoint::new(2.0, -3.0, 5.0);
        assert_eq!(group_mul(p, group_inv(p)), HPoint::ORIGIN);
        assert_eq!(group_inv(HPoint::ORIGIN), HPoint::ORIGIN);
        let q = HPoint::new(1.0, 2.0, 3.0);
        assert_eq!(group_inv(group_inv(q)), q);
    }

    #[test]
    fn contact_form_and_frame() {
        assert_eq!(contact_value(HPoint::new(4.0, 5.0, 6.0), Vec3::z()), 1.0);
        assert_eq!(contact_value(HPoint::new(1.0, 2.0, 0.0), Vec3::new(1.0, 1.0, 0.0)), -1.0);
        let [e1, e2, t] = frame_at(HPoint::new(1.0, 2.0, 3.0));
        assert_eq!(e1, Vec3::new(1.0, 0.0, 2.0));
        assert_eq!(e2, Vec3::new(0.0, 1.0, -1.0));
        assert_eq!(t, Vec3::z());
        assert_eq!(frame_at(HPoint::ORIGIN), [Vec3::x(), Vec3::y(), Vec3::z()]);
    }

    #[test]
    fn cr_structure() {
        let o = HPoint::ORIGIN;
        assert_eq!(j_rotate(FrameVector::new(o, 1.0, 0.0, 0.0)).unwrap(), FrameVector::new(o, 0.0, 1.0, 0.0));
        assert_eq!(j_rotate(FrameVector::new(o, 0.0, 1.0, 0.0)).unwrap(), FrameVector::new(o, -1.0, 0.0, 0.0));
        let v = FrameVector::new(o, 3.0, 4.0, 0.0);
        assert_eq!(j_rotate(j_rotate(v).unwrap()).unwrap(), FrameVector::new(o, -3.0, -4.0, 0.0));
        assert_eq!(j_rotate(FrameVector::new(o, 1.0, 0.0, 0.5)), Err(Error::NotHorizontal(0.5)));
    }

    #[test]
    fn motion_examples() {
        let p = HPoint::new(0.7, -0.2, 1.1);
        assert_eq!(apply_motion(&RigidMotion::IDENTITY, p), p);

        let (a, b, c) = (1.5, -0.5, 2.0);
        let (x, y) = (0.3, 0.8);
        let m = RigidMotion::translation(HPoint::new(b, -a, -c));
        let image = apply_motion(&m, HPoint::new(x, y, a * x + b * y + c));
        assert!(close(image, HPoint::new(x + b, y - a, 0.0), 1e-12));

        let r = apply_motion(&RigidMotion::rotation(FRAC_PI_2), HPoint::new(1.0, 0.0, 0.0));
        assert!(close(r, HPoint::new(0.0, 1.0, 0.0), 1e-15));

        let half = apply_motion(&RigidMotion::rotation(PI), HPoint::new(1.0, 2.0, 3.0));
        assert!(close(half, HPoint::new(-1.0, -2.0, 3.0), 1e-15));
    }

    proptest! {
        #[test]
        fn associativity(p in pt(), q in pt(), r in pt()) {
            let lhs = group_mul(group_mul(p, q), r);
            let rhs = group_mul(p, group_mul(q, r));
            prop_assert!(close(lhs, rhs, 1e-12 * 50.0));
        }

        #[test]
        fn frame_is_left_invariant(p in pt()) {
            let jac = left_translation_jacobian(p);
            let at_origin = frame_at(HPoint::ORIGIN);
            let at_p = frame_at(p);
            for i in 0..3 {
                prop_assert!((jac * at_origin[i] - at_p[i]).amax() <= 1e-15);
            }
            prop_assert_eq!(contact_value(p, at_p[0]), 0.0);
            prop_assert_eq!(contact_value(p, at_p[1]), 0.0);
        }

        #[test]
        fn jacobian_matches_differences(p in pt(), t in pt(), angle in -PI..PI) {
            let m = RigidMotion { translation: t, rotation_angle: angle };
            let jac = m.jacobian();
            let h = 1e-6;
            for i in 0..3 {
                let mut dp = Vec3::zeros();
                dp[i] = h;
                let fwd = apply_motion(&m, HPoint::from_vec(p.to_vec() + dp)).to_vec();
                let bwd = apply_motion(&m, HPoint::from_vec(p.to_vec() - dp)).to_vec();
                let col = (fwd - bwd) / (2.0 * h);
                prop_assert!((col - jac.column(i)).amax() <= 1e-8);
            }
        }

        #[test]
        fn motions_preserve_contact_form(p in pt(), t in pt(), angle in -PI..PI,
                                         v in (-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0)) {
            let m = RigidMotion { translation: t, rotation_angle: angle };
            let v = Vec3::new(v.0, v.1, v.2);
            let (q, w) = push_forward(&m, p, v);
            prop_assert!((contact_value(q, w) - contact_value(p, v)).abs() <= 1e-10);
        }

        #[test]
        fn motions_commute_with_j(p in pt(), t in pt(), angle in -PI..PI, c1 in -2.0f64..2.0, c2 in -2.0f64..2.0) {
            let m = RigidMotion { translation: t, rotation_angle: angle };
            let v = FrameVector::new(p, c1, c2, 0.0);
            let jv = j_rotate(v).unwrap();
            let (q, w) = push_forward(&m, p, v.to_coords());
            let (_, jw) = push_forward(&m, p, jv.to_coords());
            let image = FrameVector::from_coords(q, w);
            let expected = j_rotate(image).unwrap().to_coords();
            prop_assert!(image.ct.abs() <= 1e-10);
            prop_assert!((expected - jw).amax() <= 1e-10);
        }

        #[test]
        fn composition(p in pt(), t1 in pt(), t2 in pt(), a1 in -PI..PI, a2 in -PI..PI) {
            let m1 = RigidMotion { translation: t1, rotation_angle: a1 };
            let m2 = RigidMotion { translation: t2, rotation_angle: a2 };
            let direct = apply_motion(&m1, apply_motion(&m2, p));
            prop_assert!(close(apply_motion(&m1.compose(&m2), p), direct, 1e-10));
            prop_assert!(close(apply_motion(&m1.inverse(), apply_motion(&m1, p)), p, 1e-10));
        }
    }

    #[test]
    fn frame_vector_round_trip() {
        let p = HPoint::new(1.0, -2.0, 0.5);
        let v = Vec3::new(0.3, 0.4, 0.9);
        let fv = FrameVector::from_coords(p, v);
        assert_abs_diff_eq!((fv.to_coords() - v).amax(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(FrameVector::new(p, 3.0, 4.0, 0.0).norm(), 5.0);
    }
}
