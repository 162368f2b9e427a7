//! α-models with y-dependent coefficients, type classification, explicit
//! metric representations and the reduction to normal coordinates.
//!
//! A p-minimal surface without singular points carries, in compatible
//! coordinates, an α-function that solves the Liénard equation on every
//! line `y = const`. The solution family may vary with `y` only through its
//! constants, which is what [`AlphaModel`] records.

use std::sync::Arc;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fundamental::MetricRep;
use crate::func::{invert_monotone, YFunction};
use crate::lienard::AlphaSolution;
use crate::quad::PANELS_PER_UNIT;

/// Number of y-samples used when a property must hold on the whole domain.
const Y_SAMPLES: usize = 65;

#[derive(Debug, Clone)]
pub enum ModelKind {
    Vertical,
    SpecialI { c1: YFunction },
    SpecialII { c1: YFunction },
    General { c1: YFunction, c2: YFunction },
}

#[derive(Debug, Clone)]
pub struct AlphaModel {
    pub kind: ModelKind,
    /// Open interval `(c, d)` of admissible `y`.
    pub y_domain: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SurfaceType {
    Vertical,
    SpecialI,
    SpecialII,
    TypeI,
    TypeII,
    TypeIII,
}

impl SurfaceType {
    pub fn name(self) -> &'static str {
        match self {
            SurfaceType::Vertical => "Vertical",
            SurfaceType::SpecialI => "SpecialI",
            SurfaceType::SpecialII => "SpecialII",
            SurfaceType::TypeI => "TypeI",
            SurfaceType::TypeII => "TypeII",
            SurfaceType::TypeIII => "TypeIII",
        }
    }

    pub fn is_general(self) -> bool {
        matches!(self, SurfaceType::TypeI | SurfaceType::TypeII | SurfaceType::TypeIII)
    }
}

fn samples(domain: (f64, f64)) -> impl Iterator<Item = f64> {
    let (c, d) = domain;
    (0..Y_SAMPLES).map(move |i| c + (d - c) * (i as f64 + 0.5) / Y_SAMPLES as f64)
}

impl AlphaModel {
    pub fn new(kind: ModelKind, y_domain: (f64, f64)) -> Self {
        AlphaModel { kind, y_domain }
    }

    pub fn vertical(y_domain: (f64, f64)) -> Self {
        Self::new(ModelKind::Vertical, y_domain)
    }

    pub fn special_one(c1: impl Into<YFunction>, y_domain: (f64, f64)) -> Self {
        Self::new(ModelKind::SpecialI { c1: c1.into() }, y_domain)
    }

    pub fn special_two(c1: impl Into<YFunction>, y_domain: (f64, f64)) -> Self {
        Self::new(ModelKind::SpecialII { c1: c1.into() }, y_domain)
    }

    pub fn general(c1: impl Into<YFunction>, c2: impl Into<YFunction>, y_domain: (f64, f64)) -> Self {
        Self::new(
            ModelKind::General {
                c1: c1.into(),
                c2: c2.into(),
            },
            y_domain,
        )
    }

    /// The one-variable solution on the line `y = const`.
    pub fn at_y(&self, y: f64) -> AlphaSolution {
        match &self.kind {
            ModelKind::Vertical => AlphaSolution::Zero,
            ModelKind::SpecialI { c1 } => AlphaSolution::SpecialI { c1: c1.eval(y) },
            ModelKind::SpecialII { c1 } => AlphaSolution::SpecialII { c1: c1.eval(y) },
            ModelKind::General { c1, c2 } => AlphaSolution::General {
                c1: c1.eval(y),
                c2: c2.eval(y),
            },
        }
    }

    pub fn c1(&self) -> Option<&YFunction> {
        match &self.kind {
            ModelKind::Vertical => None,
            ModelKind::SpecialI { c1 } | ModelKind::SpecialII { c1 } | ModelKind::General { c1, .. } => Some(c1),
        }
    }

    pub fn c2(&self) -> Option<&YFunction> {
        match &self.kind {
            ModelKind::General { c2, .. } => Some(c2),
            _ => None,
        }
    }
}

/// `α(x, y)`.
pub fn eval_model(m: &AlphaModel, x: f64, y: f64) -> Result<f64> {
    crate::lienard::eval_alpha(&m.at_y(y), x).map(|(a, _)| a)
}

/// Surface type of `m` on the strip `x_window × y_domain`.
pub fn classify(m: &AlphaModel, x_window: (f64, f64)) -> Result<SurfaceType> {
    let (c1, c2) = match &m.kind {
        ModelKind::Vertical => return Ok(SurfaceType::Vertical),
        ModelKind::SpecialI { .. } => return Ok(SurfaceType::SpecialI),
        ModelKind::SpecialII { .. } => return Ok(SurfaceType::SpecialII),
        ModelKind::General { c1, c2 } => (c1, c2),
    };
    let (lo, hi) = (x_window.0.min(x_window.1), x_window.0.max(x_window.1));
    let mut found: Option<SurfaceType> = None;
    for y in samples(m.y_domain) {
        let (p, q) = (c1.eval(y), c2.eval(y));
        let t = if q > 0.0 {
            SurfaceType::TypeI
        } else if q < 0.0 {
            let r = (-q).sqrt();
            let (left, right) = (-p - r, -p + r);
            if hi <= left || lo >= right {
                SurfaceType::TypeII
            } else if lo >= left && hi <= right {
                SurfaceType::TypeIII
            } else {
                return Err(Error::MixedType(format!(
                    "x-window ({lo}, {hi}) meets the singular curves x = {left:.6}, {right:.6} at y = {y}"
                )));
            }
        } else {
            return Err(Error::MixedType(format!("c2 vanishes at y = {y}")));
        };
        match found {
            None => found = Some(t),
            Some(prev) if prev == SurfaceType::TypeI && t != prev => {
                return Err(Error::MixedType(format!("c2 changes sign near y = {y}")));
            }
            Some(prev) if prev != SurfaceType::TypeI && t == SurfaceType::TypeI => {
                return Err(Error::MixedType(format!("c2 changes sign near y = {y}")));
            }
            Some(prev) if prev != t => {
                return Err(Error::MixedType(format!("window changes sides of the singular curves near y = {y}")));
            }
            _ => {}
        }
    }
    found.ok_or_else(|| Error::InvalidInput("empty y-domain".into()))
}

/// `(a, b)` for the model with gauge functions `k`, `h` and `H = 0`.
///
/// `Vertical` is the degenerate branch `α ≡ 0`, where the general formula
/// gives `a = h`, `b = e^k`.
pub fn metric_rep(m: &AlphaModel, k: &YFunction, h: &YFunction) -> Result<MetricRep> {
    let model = m.clone();
    let (k, h) = (k.clone(), h.clone());
    Ok(MetricRep::new(move |x, y| {
        let (weight, _) = base_weight(&model, x, y)?;
        Ok((weight * h.eval(y), weight * k.eval(y).exp()))
    }))
}

/// `e^{-∫2α}/√(1+α²)` with the fixed base points and `α` itself.
fn base_weight(m: &AlphaModel, x: f64, y: f64) -> Result<(f64, f64)> {
    let s = m.at_y(y);
    let (alpha, _) = crate::lienard::eval_alpha(&s, x)?;
    let root = (1.0 + alpha * alpha).sqrt();
    let w = match s {
        AlphaSolution::Zero => 1.0,
        AlphaSolution::SpecialI { .. } => alpha * alpha / root,
        AlphaSolution::SpecialII { .. } => alpha.abs() / root,
        AlphaSolution::General { c1, c2 } => {
            let xx = x + c1;
            1.0 / ((xx * xx + c2).abs() * root)
        }
    };
    Ok((w, alpha))
}

/// `x̃ = x + Γ(y)`, `ỹ = Ψ(y)`.
#[derive(Debug, Clone)]
pub struct CoordChange {
    pub gamma: YFunction,
    pub psi: YFunction,
    /// Interval of `y` on which `Ψ` is known to be invertible.
    pub y_domain: (f64, f64),
}

impl CoordChange {
    pub fn identity(y_domain: (f64, f64)) -> Self {
        CoordChange {
            gamma: YFunction::constant(0.0),
            psi: YFunction::from_fns2(|y| y, |_| 1.0, |_| 0.0),
            y_domain,
        }
    }

    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        (x + self.gamma.eval(y), self.psi.eval(y))
    }

    /// The new y-interval.
    pub fn image_domain(&self) -> (f64, f64) {
        let (a, b) = (self.psi.eval(self.y_domain.0), self.psi.eval(self.y_domain.1));
        (a.min(b), a.max(b))
    }

    /// `y = Ψ⁻¹(ỹ)`, searched outward from the nominal domain.
    pub fn psi_inverse(&self, yt: f64) -> Result<f64> {
        let (c, d) = self.y_domain;
        let mut pad = 0.0;
        let width = (d - c).max(1e-12);
        for _ in 0..8 {
            let (lo, hi) = (c - pad, d + pad);
            if !(self.psi.eval(lo).is_finite() && self.psi.eval(hi).is_finite()) {
                break;
            }
            if let Some(y) = invert_monotone(&self.psi, yt, lo, hi) {
                return Ok(y);
            }
            pad = if pad == 0.0 { 0.25 * width } else { 2.0 * pad };
        }
        Err(Error::InvalidInput(format!("{yt} is outside the image of the coordinate change")))
    }

    pub fn invert(&self, xt: f64, yt: f64) -> Result<(f64, f64)> {
        let y = self.psi_inverse(yt)?;
        Ok((xt - self.gamma.eval(y), y))
    }

    /// The inverse change of coordinates.
    pub fn inverse(&self) -> CoordChange {
        let me = Arc::new(self.clone());
        let (m1, m2, m3, m4) = (me.clone(), me.clone(), me.clone(), me.clone());
        let yinv = move |m: &CoordChange, yt: f64| m.psi_inverse(yt).unwrap_or(f64::NAN);
        CoordChange {
            gamma: YFunction::from_fns(
                move |yt| -m1.gamma.eval(yinv(&m1, yt)),
                move |yt| {
                    let y = yinv(&m2, yt);
                    -m2.gamma.d1(y) / m2.psi.d1(y)
                },
            ),
            psi: YFunction::from_fns(move |yt| yinv(&m3, yt), move |yt| 1.0 / m4.psi.d1(yinv(&m4, yt))),
            y_domain: self.image_domain(),
        }
    }

    /// The representation of the same frame in the new coordinates:
    /// `ã = a + bΓ'`, `b̃ = bΨ'`.
    pub fn push_rep(&self, rep: &MetricRep) -> MetricRep {
        let me = self.clone();
        let rep = rep.clone();
        let scale = rep.scale;
        let mut out = MetricRep::new(move |xt, yt| {
            let (x, y) = me.invert(xt, yt)?;
            let (a, b) = rep.ab(x, y)?;
            Ok((a + b * me.gamma.d1(y), b * me.psi.d1(y)))
        })
        .with_scale(scale);
        out.flipped = false;
        out
    }
}

/// Normalized invariants. `zeta2` is present exactly for general types.
#[derive(Debug, Clone)]
pub struct NormalForm {
    pub surface_type: SurfaceType,
    pub zeta1: YFunction,
    pub zeta2: Option<YFunction>,
    pub x_window: (f64, f64),
    /// Domain of the normal coordinate `ỹ`.
    pub y_domain: (f64, f64),
}

impl NormalForm {
    /// The α-model whose constants are the invariants.
    pub fn to_model(&self) -> AlphaModel {
        let z1 = self.zeta1.clone();
        let kind = match self.surface_type {
            SurfaceType::Vertical => ModelKind::Vertical,
            SurfaceType::SpecialI => ModelKind::SpecialI { c1: z1 },
            SurfaceType::SpecialII => ModelKind::SpecialII { c1: z1 },
            _ => ModelKind::General {
                c1: z1,
                c2: self.zeta2.clone().unwrap_or_else(|| YFunction::constant(f64::NAN)),
            },
        };
        AlphaModel::new(kind, self.y_domain)
    }
}

/// Normal coordinates for a surface with α-model `m` and metric `rep`.
///
/// The gauge is read off `rep` along the line `x = ` midpoint of
/// `x_window`: `Γ' = −a/b` makes the new `a` vanish and `Ψ' = b₀/b`
/// rescales `y` so that `b` takes the normal form `b₀` (the representation
/// with `k = h = 0`). Both are integrated from the left end of the
/// y-domain, where the change is the identity.
pub fn normalize(m: &AlphaModel, rep: &MetricRep, x_window: (f64, f64)) -> Result<(NormalForm, CoordChange)> {
    let surface_type = classify(m, x_window)?;
    if surface_type == SurfaceType::Vertical {
        return Err(Error::PreconditionFailed("vertical models have no normal form".into()));
    }
    let x_ref = 0.5 * (x_window.0 + x_window.1);
    let (c, d) = m.y_domain;
    if !(c.is_finite() && d.is_finite() && c < d) {
        return Err(Error::InvalidInput("normalization needs a finite y-domain".into()));
    }
    let pad = 0.25 * (d - c);

    let r1 = rep.clone();
    let gamma_rate = move |y: f64| match r1.ab(x_ref, y) {
        Ok((a, b)) => -a / b,
        Err(_) => f64::NAN,
    };
    let (m2, r2) = (m.clone(), rep.clone());
    let psi_rate = move |y: f64| match (base_weight(&m2, x_ref, y), r2.ab(x_ref, y)) {
        (Ok((w, _)), Ok((_, b))) => w / b,
        _ => f64::NAN,
    };

    // Sanity check before tabulating: the new coordinates must be admissible.
    for y in samples(m.y_domain) {
        let (g, p) = (gamma_rate(y), psi_rate(y));
        if !g.is_finite() || !p.is_finite() {
            return Err(Error::singular(format!("({x_ref}, {y})"), "metric undefined on the reference line"));
        }
        if p <= 0.0 {
            return Err(Error::PreconditionFailed(format!("b is not positive at ({x_ref}, {y})")));
        }
    }

    let ppu = PANELS_PER_UNIT / (d - c).max(1e-12);
    let q = |y| Error::QuadratureFailure { x: x_ref, y };
    let gamma = YFunction::antiderivative(gamma_rate, c, 0.0, c - pad, d + pad, ppu).map_err(q)?;
    let psi = YFunction::antiderivative(psi_rate, c, c, c - pad, d + pad, ppu).map_err(q)?;
    let change = CoordChange {
        gamma,
        psi,
        y_domain: m.y_domain,
    };

    let c1 = m.c1().expect("non-vertical model").clone();
    let factor = if surface_type == SurfaceType::SpecialII { 2.0 } else { 1.0 };
    let ch = Arc::new(change.clone());
    let (ch1, ch2) = (ch.clone(), ch.clone());
    let (c1a, c1b) = (c1.clone(), c1);
    let zeta1 = YFunction::from_fns(
        move |yt| {
            let y = ch1.psi_inverse(yt).unwrap_or(f64::NAN);
            c1a.eval(y) - factor * ch1.gamma.eval(y)
        },
        move |yt| {
            let y = ch2.psi_inverse(yt).unwrap_or(f64::NAN);
            (c1b.d1(y) - factor * ch2.gamma.d1(y)) / ch2.psi.d1(y)
        },
    );
    let zeta2 = m.c2().map(|c2| {
        let (c2a, c2b) = (c2.clone(), c2.clone());
        let (ch3, ch4) = (ch.clone(), ch.clone());
        YFunction::from_fns(
            move |yt| c2a.eval(ch3.psi_inverse(yt).unwrap_or(f64::NAN)),
            move |yt| {
                let y = ch4.psi_inverse(yt).unwrap_or(f64::NAN);
                c2b.d1(y) / ch4.psi.d1(y)
            },
        )
    });
    let nf = NormalForm {
        surface_type,
        zeta1,
        zeta2,
        x_window,
        y_domain: change.image_domain(),
    };
    Ok((nf, change))
}

/// The induced metric `dx² + b⁻² dy²` in normal coordinates, written without
/// division so it stays finite on the singular set.
pub fn first_fundamental_form(nf: &NormalForm, x: f64, y: f64) -> Matrix2<f64> {
    let z1 = nf.zeta1.eval(y);
    let g22 = match nf.surface_type {
        SurfaceType::Vertical => 1.0,
        SurfaceType::SpecialI => {
            let t = (x + z1) * (x + z1);
            t + t * t
        }
        SurfaceType::SpecialII => 1.0 + (2.0 * x + z1).powi(2),
        _ => {
            let z2 = nf.zeta2.as_ref().map_or(f64::NAN, |z| z.eval(y));
            let t = (x + z1) * (x + z1);
            t + (t + z2) * (t + z2)
        }
    };
    Matrix2::new(1.0, 0.0, 0.0, g22)
}

/// Coefficients `(w1, w2)` of the Levi-Civita form `ω̂₂¹ = w1 dx + w2 dy`.
pub fn connection_form(rep: &MetricRep, x: f64, y: f64) -> Result<(f64, f64)> {
    let j = rep.jet(x, y)?;
    if !(j.b > 0.0) {
        return Err(Error::PreconditionFailed(format!("b = {} is not positive", j.b)));
    }
    let w1 = (j.b * j.a_x - j.a * j.b_x) / j.b;
    let w2 = j.b_x / (j.b * j.b) - j.a * j.a_x / j.b + j.a * j.a * j.b_x / (j.b * j.b);
    Ok((w1, w2))
}

/// One connected piece `lower(y) < x < upper(y)` of a maximal domain.
#[derive(Debug, Clone)]
pub struct DomainPiece {
    pub name: &'static str,
    pub lower: Option<YFunction>,
    pub upper: Option<YFunction>,
}

impl DomainPiece {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.lower.as_ref().is_none_or(|l| x > l.eval(y)) && self.upper.as_ref().is_none_or(|u| x < u.eval(y))
    }
}

#[derive(Debug, Clone)]
pub struct MaximalDomain {
    pub y_domain: (f64, f64),
    pub pieces: Vec<DomainPiece>,
}

impl MaximalDomain {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        y > self.y_domain.0 && y < self.y_domain.1 && self.pieces.iter().any(|p| p.contains(x, y))
    }

    /// Name of the piece containing `(x, y)`.
    pub fn piece_at(&self, x: f64, y: f64) -> Option<&'static str> {
        if !(y > self.y_domain.0 && y < self.y_domain.1) {
            return None;
        }
        self.pieces.iter().find(|p| p.contains(x, y)).map(|p| p.name)
    }
}

/// Maximal domains of the normal-form surfaces with invariants `zeta1`, `zeta2`.
pub fn maximal_domain(
    zeta1: &YFunction,
    zeta2: Option<&YFunction>,
    surface_type: SurfaceType,
    y_domain: (f64, f64),
) -> Result<MaximalDomain> {
    let boundary = |scale: f64, sign: f64| -> Result<YFunction> {
        let z1 = zeta1.clone();
        match (sign, zeta2) {
            (0.0, _) => Ok(YFunction::from_fns(
                move |y| -z1.eval(y) / scale,
                {
                    let z1 = zeta1.clone();
                    move |y| -z1.d1(y) / scale
                },
            )),
            (_, Some(z2)) => {
                let z2 = z2.clone();
                Ok(YFunction::from_fn(move |y| -z1.eval(y) + sign * (-z2.eval(y)).sqrt()))
            }
            (_, None) => Err(Error::InvalidInput("general types need zeta2".into())),
        }
    };
    let piece = |name, lower, upper| DomainPiece { name, lower, upper };
    let pieces = match surface_type {
        SurfaceType::Vertical | SurfaceType::TypeI => vec![piece(
            if surface_type == SurfaceType::Vertical { "V" } else { "V_I" },
            None,
            None,
        )],
        SurfaceType::SpecialI => {
            let b = boundary(1.0, 0.0)?;
            vec![piece("U_I^-", None, Some(b.clone())), piece("U_I^+", Some(b), None)]
        }
        SurfaceType::SpecialII => {
            let b = boundary(2.0, 0.0)?;
            vec![piece("U_II^-", None, Some(b.clone())), piece("U_II^+", Some(b), None)]
        }
        SurfaceType::TypeII | SurfaceType::TypeIII => {
            if let Some(z2) = zeta2 {
                if samples(y_domain).any(|y| z2.eval(y) >= 0.0) {
                    return Err(Error::PreconditionFailed("zeta2 must be negative for types II and III".into()));
                }
            }
            let left = boundary(1.0, -1.0)?;
            let right = boundary(1.0, 1.0)?;
            if surface_type == SurfaceType::TypeII {
                vec![piece("V_II^-", None, Some(left)), piece("V_II^+", Some(right), None)]
            } else {
                vec![piece("V_III", Some(left), Some(right))]
            }
        }
    };
    Ok(MaximalDomain { y_domain, pieces })
}

/// Result of [`gauge_fit`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeFit {
    /// `τ` in `candidate(y) ≈ reference(y + τ) + κ`.
    pub shift: f64,
    /// `κ`.
    pub offset: f64,
    pub max_residual: f64,
}

/// Best translation gauge between two invariant functions on `samples`.
///
/// With `fit_shift` the argument translation `τ` is searched as well
/// (golden section on `|τ| ≤ max_shift`); the value offset `κ` is always
/// the least-squares mean.
pub fn gauge_fit(
    reference: &dyn Fn(f64) -> f64,
    candidate: &dyn Fn(f64) -> f64,
    samples: &[f64],
    fit_offset: bool,
    max_shift: Option<f64>,
) -> GaugeFit {
    let evaluate = |tau: f64| -> (f64, f64, f64) {
        let diffs: Vec<f64> = samples.iter().map(|&y| candidate(y) - reference(y + tau)).collect();
        let kappa = if fit_offset {
            diffs.iter().sum::<f64>() / diffs.len() as f64
        } else {
            0.0
        };
        let ss = diffs.iter().map(|d| (d - kappa).powi(2)).sum::<f64>();
        let max = diffs.iter().fold(0.0f64, |m, d| m.max((d - kappa).abs()));
        (ss, kappa, max)
    };
    let tau = match max_shift {
        None => 0.0,
        Some(w) => {
            let phi = 0.5 * (5f64.sqrt() - 1.0);
            let (mut a, mut b) = (-w, w);
            for _ in 0..200 {
                let c = b - phi * (b - a);
                let d = a + phi * (b - a);
                if evaluate(c).0 < evaluate(d).0 {
                    b = d;
                } else {
                    a = c;
                }
            }
            0.5 * (a + b)
        }
    };
    let (_, kappa, max) = evaluate(tau);
    GaugeFit {
        shift: tau,
        offset: kappa,
        max_residual: max,
    }
}
