//! Radial profile pairs (H, D) and their scalar invariants.
//!
//! A profile pair fixes the whole spacetime. The four homogeneous classes
//! solve D'' = alpha * D, H' = -2 omega * D; custom pairs are expression
//! trees over `r`. Derivatives come from closed forms (analytic) or from
//! central differences with a configurable step.

use crate::error::{GeoError, Result};
use crate::expr::{self, Expr};
use serde::Serialize;

const EPS: f64 = f64::EPSILON;

/// Default nondegeneracy margin: evaluation refuses points with |D| below it.
pub const DEFAULT_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone)]
pub enum ProfileKind {
    /// alpha = m^2 > 0, omega != 0
    ClassI { m: f64, omega: f64 },
    /// alpha = 0, omega != 0
    ClassII { omega: f64 },
    /// alpha = -mu^2 < 0, omega != 0
    ClassIII { mu: f64, omega: f64 },
    /// alpha != 0, omega = 0, H = 0
    ClassIV { alpha: f64 },
    Custom { h: Expr, d: Expr },
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum DerivativeMode {
    #[default]
    ClosedForm,
    CentralDifference { step: f64 },
}

/// Immutable profile pair; all evaluation is pure.
#[derive(Debug, Clone)]
pub struct ProfilePair {
    pub kind: ProfileKind,
    pub derivative_mode: DerivativeMode,
    /// Working interval in r. Evaluation refuses r outside it.
    pub r_min: f64,
    pub r_max: f64,
    /// |D(r)| must stay above this margin.
    pub margin: f64,
    // symbolic derivatives for Custom in closed-form mode
    custom_derivs: Option<CustomDerivs>,
}

#[derive(Debug, Clone)]
struct CustomDerivs {
    hp: Expr,
    hpp: Expr,
    dp: Expr,
    dpp: Expr,
}

/// Values of H, D and their r-derivatives at one radius.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProfileSample {
    pub r: f64,
    pub h: f64,
    pub hp: f64,
    pub hpp: f64,
    pub d: f64,
    pub dp: f64,
    pub dpp: f64,
}

/// The scalar invariants driving the normal-direction classification.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InvariantTriple {
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
}

/// Grid-evaluated hypothesis flags for the classification families.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RegimeFlags {
    pub f2_zero: bool,
    pub f1_zero: bool,
    pub f1_plus_f3_zero: bool,
    /// |(H'/D)'| < |(H'/D)^2 - D''/D| pointwise, i.e. |2 f2| < |f1 + f3|.
    pub tanh_condition: bool,
    /// (D')^2 > (H')^2 pointwise.
    pub dprime_dominates: bool,
}

/// Result of fitting the homogeneity conditions on a grid.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Homogeneity {
    pub alpha: f64,
    pub omega: f64,
    pub class: DetectedClass,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DetectedClass {
    I,
    II,
    III,
    IV,
    /// alpha = omega = 0: flat space, excluded from the family.
    Excluded,
}

impl ProfilePair {
    pub fn class1(m: f64, omega: f64) -> Result<Self> {
        if m <= 0.0 {
            return Err(GeoError::Profile(format!("class1 needs m > 0, got {m}")));
        }
        if omega == 0.0 {
            return Err(GeoError::Profile("class1 needs omega != 0".into()));
        }
        Ok(Self::new(ProfileKind::ClassI { m, omega }, 0.0, f64::INFINITY))
    }

    pub fn class2(omega: f64) -> Result<Self> {
        if omega == 0.0 {
            return Err(GeoError::Profile("class2 needs omega != 0".into()));
        }
        Ok(Self::new(ProfileKind::ClassII { omega }, 0.0, f64::INFINITY))
    }

    pub fn class3(mu: f64, omega: f64) -> Result<Self> {
        if mu <= 0.0 {
            return Err(GeoError::Profile(format!("class3 needs mu > 0, got {mu}")));
        }
        if omega == 0.0 {
            return Err(GeoError::Profile("class3 needs omega != 0".into()));
        }
        // stop at the first zero of D = sin(mu r)/mu
        Ok(Self::new(
            ProfileKind::ClassIII { mu, omega },
            0.0,
            std::f64::consts::PI / mu,
        ))
    }

    pub fn class4(alpha: f64) -> Result<Self> {
        if alpha == 0.0 {
            // alpha = omega = 0 is flat space, excluded from the family
            return Err(GeoError::Profile(
                "class4 needs alpha != 0 (alpha = omega = 0 is the excluded trivial case)".into(),
            ));
        }
        let r_max = if alpha > 0.0 {
            f64::INFINITY
        } else {
            std::f64::consts::PI / (-alpha).sqrt()
        };
        Ok(Self::new(ProfileKind::ClassIV { alpha }, 0.0, r_max))
    }

    pub fn custom(h_src: &str, d_src: &str) -> Result<Self> {
        let h = expr::parse(h_src, &["r"])?;
        let d = expr::parse(d_src, &["r"])?;
        let derivs = CustomDerivs {
            hp: h.diff(0),
            hpp: h.diff(0).diff(0),
            dp: d.diff(0),
            dpp: d.diff(0).diff(0),
        };
        let mut p = Self::new(ProfileKind::Custom { h, d }, 0.0, f64::INFINITY);
        p.custom_derivs = Some(derivs);
        Ok(p)
    }

    fn new(kind: ProfileKind, r_min: f64, r_max: f64) -> Self {
        ProfilePair {
            kind,
            derivative_mode: DerivativeMode::ClosedForm,
            r_min,
            r_max,
            margin: DEFAULT_MARGIN,
            custom_derivs: None,
        }
    }

    pub fn with_mode(mut self, mode: DerivativeMode) -> Self {
        self.derivative_mode = mode;
        self
    }

    pub fn with_domain(mut self, r_min: f64, r_max: f64) -> Self {
        self.r_min = r_min;
        self.r_max = r_max;
        self
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self
    }

    /// Rotation constant for homogeneous kinds; None for custom pairs.
    pub fn omega(&self) -> Option<f64> {
        match self.kind {
            ProfileKind::ClassI { omega, .. }
            | ProfileKind::ClassII { omega }
            | ProfileKind::ClassIII { omega, .. } => Some(omega),
            ProfileKind::ClassIV { .. } => Some(0.0),
            ProfileKind::Custom { .. } => None,
        }
    }

    /// Curvature constant alpha for homogeneous kinds; None for custom pairs.
    pub fn alpha(&self) -> Option<f64> {
        match self.kind {
            ProfileKind::ClassI { m, .. } => Some(m * m),
            ProfileKind::ClassII { .. } => Some(0.0),
            ProfileKind::ClassIII { mu, .. } => Some(-mu * mu),
            ProfileKind::ClassIV { alpha } => Some(alpha),
            ProfileKind::Custom { .. } => None,
        }
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            ProfileKind::ClassI { m, omega } => format!("class1(m={m},omega={omega})"),
            ProfileKind::ClassII { omega } => format!("class2(omega={omega})"),
            ProfileKind::ClassIII { mu, omega } => format!("class3(mu={mu},omega={omega})"),
            ProfileKind::ClassIV { alpha } => format!("class4(alpha={alpha})"),
            ProfileKind::Custom { h, d } => format!("custom(H=\"{h}\",D=\"{d}\")"),
        }
    }

    fn h_raw(&self, r: f64) -> f64 {
        match &self.kind {
            ProfileKind::ClassI { m, omega } => 2.0 * omega / (m * m) * (1.0 - (m * r).cosh()),
            ProfileKind::ClassII { omega } => -omega * r * r,
            ProfileKind::ClassIII { mu, omega } => 2.0 * omega / (mu * mu) * ((mu * r).cos() - 1.0),
            ProfileKind::ClassIV { .. } => 0.0,
            ProfileKind::Custom { h, .. } => h.eval(&[r]),
        }
    }

    fn d_raw(&self, r: f64) -> f64 {
        match &self.kind {
            ProfileKind::ClassI { m, .. } => (m * r).sinh() / m,
            ProfileKind::ClassII { .. } => r,
            ProfileKind::ClassIII { mu, .. } => (mu * r).sin() / mu,
            ProfileKind::ClassIV { alpha } => {
                if *alpha > 0.0 {
                    let m = alpha.sqrt();
                    (m * r).sinh() / m
                } else {
                    let mu = (-alpha).sqrt();
                    (mu * r).sin() / mu
                }
            }
            ProfileKind::Custom { d, .. } => d.eval(&[r]),
        }
    }

    fn closed_sample(&self, r: f64) -> ProfileSample {
        let (h, d) = (self.h_raw(r), self.d_raw(r));
        match &self.kind {
            ProfileKind::ClassI { m, omega } => ProfileSample {
                r,
                h,
                hp: -2.0 * omega / m * (m * r).sinh(),
                hpp: -2.0 * omega * (m * r).cosh(),
                d,
                dp: (m * r).cosh(),
                dpp: m * (m * r).sinh(),
            },
            ProfileKind::ClassII { omega } => ProfileSample {
                r,
                h,
                hp: -2.0 * omega * r,
                hpp: -2.0 * omega,
                d,
                dp: 1.0,
                dpp: 0.0,
            },
            ProfileKind::ClassIII { mu, omega } => ProfileSample {
                r,
                h,
                hp: -2.0 * omega / mu * (mu * r).sin(),
                hpp: -2.0 * omega * (mu * r).cos(),
                d,
                dp: (mu * r).cos(),
                dpp: -mu * (mu * r).sin(),
            },
            ProfileKind::ClassIV { alpha } => {
                let (dp, dpp) = if *alpha > 0.0 {
                    let m = alpha.sqrt();
                    ((m * r).cosh(), m * (m * r).sinh())
                } else {
                    let mu = (-alpha).sqrt();
                    ((mu * r).cos(), -mu * (mu * r).sin())
                };
                ProfileSample {
                    r,
                    h: 0.0,
                    hp: 0.0,
                    hpp: 0.0,
                    d,
                    dp,
                    dpp,
                }
            }
            ProfileKind::Custom { .. } => {
                let cd = self.custom_derivs.as_ref().expect("custom derivs built");
                ProfileSample {
                    r,
                    h,
                    hp: cd.hp.eval(&[r]),
                    hpp: cd.hpp.eval(&[r]),
                    d,
                    dp: cd.dp.eval(&[r]),
                    dpp: cd.dpp.eval(&[r]),
                }
            }
        }
    }

    fn fd_sample(&self, r: f64, step: f64) -> ProfileSample {
        let s = if step > 0.0 {
            step
        } else {
            EPS.cbrt() * r.abs().max(1.0)
        };
        let (hm, h0, hpl) = (self.h_raw(r - s), self.h_raw(r), self.h_raw(r + s));
        let (dm, d0, dpl) = (self.d_raw(r - s), self.d_raw(r), self.d_raw(r + s));
        ProfileSample {
            r,
            h: h0,
            hp: (hpl - hm) / (2.0 * s),
            hpp: (hpl - 2.0 * h0 + hm) / (s * s),
            d: d0,
            dp: (dpl - dm) / (2.0 * s),
            dpp: (dpl - 2.0 * d0 + dm) / (s * s),
        }
    }

    /// Evaluate H, D and derivatives at r, enforcing the working domain and
    /// the nondegeneracy margin.
    pub fn sample(&self, r: f64) -> Result<ProfileSample> {
        if !(r >= self.r_min && r <= self.r_max) || !r.is_finite() {
            return Err(GeoError::Domain {
                r,
                reason: format!("outside working interval [{}, {}]", self.r_min, self.r_max),
            });
        }
        let d = self.d_raw(r);
        if d.abs() < self.margin {
            return Err(GeoError::Domain {
                r,
                reason: format!("|D(r)| = {:.3e} below margin {:.1e}", d.abs(), self.margin),
            });
        }
        Ok(match self.derivative_mode {
            DerivativeMode::ClosedForm => self.closed_sample(r),
            DerivativeMode::CentralDifference { step } => self.fd_sample(r, step),
        })
    }

    /// The invariant triple (f1, f2, f3) at r.
    pub fn invariants(&self, r: f64) -> Result<InvariantTriple> {
        Ok(invariants_of(&self.sample(r)?))
    }

    /// Hypothesis flags evaluated over a grid.
    pub fn regime_flags(&self, grid: &[f64], tol: f64) -> Result<RegimeFlags> {
        let mut flags = RegimeFlags {
            f2_zero: true,
            f1_zero: true,
            f1_plus_f3_zero: true,
            tanh_condition: true,
            dprime_dominates: true,
        };
        for &r in grid {
            let s = self.sample(r)?;
            let f = invariants_of(&s);
            flags.f2_zero &= f.f2.abs() < tol;
            flags.f1_zero &= f.f1.abs() < tol;
            flags.f1_plus_f3_zero &= (f.f1 + f.f3).abs() < tol;
            flags.tanh_condition &= (2.0 * f.f2).abs() < (f.f1 + f.f3).abs();
            flags.dprime_dominates &= s.dp * s.dp > s.hp * s.hp;
        }
        Ok(flags)
    }

    /// Least-squares fit of (alpha, omega) from D''/D and -H'/(2D) over the
    /// grid; Some only when both residuals stay below `tol`.
    pub fn detect_homogeneous(&self, grid: &[f64], tol: f64) -> Option<Homogeneity> {
        let mut dd = 0.0;
        let mut dpp_d = 0.0;
        let mut hp_d = 0.0;
        let mut samples = Vec::with_capacity(grid.len());
        for &r in grid {
            let s = self.sample(r).ok()?;
            dd += s.d * s.d;
            dpp_d += s.dpp * s.d;
            hp_d += s.hp * s.d;
            samples.push(s);
        }
        if dd == 0.0 {
            return None;
        }
        let alpha = dpp_d / dd;
        let omega = -hp_d / (2.0 * dd);
        let mut residual: f64 = 0.0;
        for s in &samples {
            residual = residual
                .max((s.dpp - alpha * s.d).abs())
                .max((s.hp + 2.0 * omega * s.d).abs());
        }
        if residual >= tol {
            return None;
        }
        let class = if alpha.abs() < tol && omega.abs() < tol {
            DetectedClass::Excluded
        } else if omega.abs() < tol {
            DetectedClass::IV
        } else if alpha > tol {
            DetectedClass::I
        } else if alpha < -tol {
            DetectedClass::III
        } else {
            DetectedClass::II
        };
        Some(Homogeneity {
            alpha,
            omega,
            class,
            residual,
        })
    }
}

pub fn invariants_of(s: &ProfileSample) -> InvariantTriple {
    let k = s.hp / (2.0 * s.d);
    let kp = (s.hpp * s.d - s.hp * s.dp) / (2.0 * s.d * s.d);
    InvariantTriple {
        f1: k * k,
        f2: -kp,
        f3: 3.0 * k * k - s.dpp / s.d,
    }
}

/// Parse the profile grammar:
/// `class1(m=...,omega=...)`, `class2(omega=...)`, `class3(mu=...,omega=...)`,
/// `class4(alpha=...)`, `custom(H="...",D="...")`.
pub fn parse_profile_spec(src: &str) -> Result<ProfilePair> {
    let src = src.trim();
    let open = src
        .find('(')
        .ok_or_else(|| GeoError::Config(format!("profile spec `{src}` missing `(`")))?;
    if !src.ends_with(')') {
        return Err(GeoError::Config(format!("profile spec `{src}` missing `)`")));
    }
    let name = &src[..open];
    let body = &src[open + 1..src.len() - 1];
    let args = split_args(body)?;
    let get_num = |key: &str| -> Result<f64> {
        for (k, v) in &args {
            if k == key {
                return v.parse::<f64>().map_err(|_| {
                    GeoError::Config(format!("profile spec `{src}`: `{key}` is not a number"))
                });
            }
        }
        Err(GeoError::Config(format!(
            "profile spec `{src}` missing `{key}=`"
        )))
    };
    let get_str = |key: &str| -> Result<String> {
        for (k, v) in &args {
            if k == key {
                let v = v.trim();
                if v.len() >= 2 && v.starts_with('"') && v.ends_with('"') {
                    return Ok(v[1..v.len() - 1].to_string());
                }
                return Ok(v.to_string());
            }
        }
        Err(GeoError::Config(format!(
            "profile spec `{src}` missing `{key}=`"
        )))
    };
    match name {
        "class1" => ProfilePair::class1(get_num("m")?, get_num("omega")?),
        "class2" => ProfilePair::class2(get_num("omega")?),
        "class3" => ProfilePair::class3(get_num("mu")?, get_num("omega")?),
        "class4" => ProfilePair::class4(get_num("alpha")?),
        "custom" => ProfilePair::custom(&get_str("H")?, &get_str("D")?),
        other => Err(GeoError::Config(format!("unknown profile kind `{other}`"))),
    }
}

fn split_args(body: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut in_str = false;
    let mut cur = String::new();
    let mut parts = Vec::new();
    for c in body.chars() {
        match c {
            '"' => {
                in_str = !in_str;
                cur.push(c);
            }
            '(' if !in_str => {
                depth += 1;
                cur.push(c);
            }
            ')' if !in_str => {
                depth = depth.saturating_sub(1);
                cur.push(c);
            }
            ',' if !in_str && depth == 0 => {
                parts.push(cur.clone());
                cur.clear();
            }
            _ => cur.push(c),
        }
    }
    if !cur.trim().is_empty() {
        parts.push(cur);
    }
    for part in parts {
        let eq = part
            .find('=')
            .ok_or_else(|| GeoError::Config(format!("bad argument `{part}` (expected key=value)")))?;
        out.push((
            part[..eq].trim().to_string(),
            part[eq + 1..].trim().to_string(),
        ));
    }
    Ok(out)
}

/// Build `n` evenly spaced points on [lo, hi] inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}
