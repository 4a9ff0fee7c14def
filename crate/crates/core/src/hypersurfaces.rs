//! Fundamental forms and classification predicates for immersed
//! hypersurfaces.
//!
//! Given any immersion F: (u1,u2,u3) -> (t,r,phi,z) the engine computes the
//! tangent frame, unit normal, induced metric, second fundamental form h,
//! its covariant derivative, the induced curvature, and the verdict
//! booleans (totally geodesic / parallel / Codazzi / semi-parallel /
//! minimal / CMC). Components are expression trees or ODE tables, so every
//! immersion carries analytic first partials; higher derivatives come from
//! central differences with steps tied to the derivative order.

use crate::error::{GeoError, Result};
use crate::expr::Expr;
use crate::geometry::{
    christoffel_closed, coord_to_frame, curvature_of, dot_g, eta, frame_to_coord, metric_of, Vec4,
};
use crate::profiles::{ProfilePair, ProfileSample};
use crate::rk::OdeTable;
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::Arc;

const EPS: f64 = f64::EPSILON;

pub type Mat3 = [[f64; 3]; 3];
pub type Ten3 = [[[f64; 3]; 3]; 3];

/// Working box in (u1, u2, u3).
#[derive(Debug, Clone, Copy)]
pub struct UBox {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl UBox {
    pub fn new(lo: [f64; 3], hi: [f64; 3]) -> Self {
        UBox { lo, hi }
    }

    pub fn centered(half: [f64; 3]) -> Self {
        UBox {
            lo: [-half[0], -half[1], -half[2]],
            hi: [half[0], half[1], half[2]],
        }
    }

    pub fn contains(&self, u: [f64; 3]) -> bool {
        (0..3).all(|i| u[i] >= self.lo[i] && u[i] <= self.hi[i])
    }

    /// n^3 grid, axis-major, deterministic order.
    pub fn grid(&self, n: usize) -> Vec<[f64; 3]> {
        let axis = |i: usize| crate::profiles::linspace(self.lo[i], self.hi[i], n);
        let (a0, a1, a2) = (axis(0), axis(1), axis(2));
        let mut out = Vec::with_capacity(n * n * n);
        for &x in &a0 {
            for &y in &a1 {
                for &z in &a2 {
                    out.push([x, y, z]);
                }
            }
        }
        out
    }
}

/// One immersion component. Sums and products of expression trees,
/// ODE-table columns and coordinates cover every family in the catalog.
#[derive(Clone)]
pub enum Component {
    Const(f64),
    /// u-coordinate (0, 1 or 2)
    Var(usize),
    Expr(Box<ExprComp>),
    /// column of a shared ODE table, read along one u-axis
    Table {
        table: Arc<OdeTable>,
        col: usize,
        axis: usize,
    },
    Add(Box<Component>, Box<Component>),
    Mul(Box<Component>, Box<Component>),
    Scale(f64, Box<Component>),
}

/// Expression with cached symbolic first and second partials.
#[derive(Clone)]
pub struct ExprComp {
    e: Expr,
    d: [Expr; 3],
    d2: [[Expr; 3]; 3],
}

impl ExprComp {
    pub fn new(e: Expr) -> Self {
        let d = [e.diff(0), e.diff(1), e.diff(2)];
        let d2 = [
            [d[0].diff(0), d[0].diff(1), d[0].diff(2)],
            [d[1].diff(0), d[1].diff(1), d[1].diff(2)],
            [d[2].diff(0), d[2].diff(1), d[2].diff(2)],
        ];
        ExprComp { e, d, d2 }
    }
}

impl Component {
    pub fn expr(e: Expr) -> Self {
        Component::Expr(Box::new(ExprComp::new(e)))
    }

    pub fn parse(src: &str) -> Result<Self> {
        Ok(Component::expr(crate::expr::parse(src, &["u1", "u2", "u3"])?))
    }

    pub fn add(a: Component, b: Component) -> Self {
        Component::Add(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Component, b: Component) -> Self {
        Component::Mul(Box::new(a), Box::new(b))
    }

    pub fn eval(&self, u: [f64; 3]) -> f64 {
        match self {
            Component::Const(c) => *c,
            Component::Var(i) => u[*i],
            Component::Expr(ec) => ec.e.eval(&u),
            Component::Table { table, col, axis } => table.eval(u[*axis], *col),
            Component::Add(a, b) => a.eval(u) + b.eval(u),
            Component::Mul(a, b) => a.eval(u) * b.eval(u),
            Component::Scale(c, a) => c * a.eval(u),
        }
    }

    pub fn partial(&self, u: [f64; 3], i: usize) -> f64 {
        match self {
            Component::Const(_) => 0.0,
            Component::Var(j) => {
                if *j == i {
                    1.0
                } else {
                    0.0
                }
            }
            Component::Expr(ec) => ec.d[i].eval(&u),
            Component::Table { table, col, axis } => {
                if *axis == i {
                    table.eval_deriv(u[*axis], *col)
                } else {
                    0.0
                }
            }
            Component::Add(a, b) => a.partial(u, i) + b.partial(u, i),
            Component::Mul(a, b) => a.partial(u, i) * b.eval(u) + a.eval(u) * b.partial(u, i),
            Component::Scale(c, a) => c * a.partial(u, i),
        }
    }

    pub fn partial2(&self, u: [f64; 3], i: usize, k: usize) -> f64 {
        match self {
            Component::Const(_) | Component::Var(_) => 0.0,
            Component::Expr(ec) => ec.d2[i][k].eval(&u),
            Component::Table { table, col, axis } => {
                if *axis == i && *axis == k {
                    table.eval_deriv2(u[*axis], *col)
                } else {
                    0.0
                }
            }
            Component::Add(a, b) => a.partial2(u, i, k) + b.partial2(u, i, k),
            Component::Mul(a, b) => {
                a.partial2(u, i, k) * b.eval(u)
                    + a.partial(u, i) * b.partial(u, k)
                    + a.partial(u, k) * b.partial(u, i)
                    + a.eval(u) * b.partial2(u, i, k)
            }
            Component::Scale(c, a) => c * a.partial2(u, i, k),
        }
    }
}

/// Expected causal character, carried as metadata on catalog entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Causal {
    Timelike,
    Spacelike,
}

impl Causal {
    pub fn label(self) -> &'static str {
        match self {
            Causal::Timelike => "timelike",
            Causal::Spacelike => "spacelike",
        }
    }

    /// eps = g(xi, xi): -1 normal spacelike -> M timelike, +1 -> spacelike.
    pub fn from_eps(eps: f64) -> Causal {
        if eps < 0.0 {
            Causal::Timelike
        } else {
            Causal::Spacelike
        }
    }
}

#[derive(Clone)]
pub struct Immersion {
    pub components: [Component; 4],
    pub ubox: UBox,
    pub expected_causal: Option<Causal>,
}

impl Immersion {
    pub fn new(components: [Component; 4], ubox: UBox) -> Self {
        Immersion {
            components,
            ubox,
            expected_causal: None,
        }
    }

    pub fn with_causal(mut self, c: Causal) -> Self {
        self.expected_causal = Some(c);
        self
    }

    /// Compose with the ambient isometries t -> t + dt, z -> z + dz.
    /// Every certificate is invariant under these; they exist so control
    /// runs can check exactly that.
    pub fn translated(mut self, dt: f64, dz: f64) -> Self {
        if dt != 0.0 {
            let f1 = std::mem::replace(&mut self.components[0], Component::Const(0.0));
            self.components[0] = Component::add(f1, Component::Const(dt));
        }
        if dz != 0.0 {
            let f4 = std::mem::replace(&mut self.components[3], Component::Const(0.0));
            self.components[3] = Component::add(f4, Component::Const(dz));
        }
        self
    }

    pub fn eval(&self, u: [f64; 3]) -> Vec4 {
        [
            self.components[0].eval(u),
            self.components[1].eval(u),
            self.components[2].eval(u),
            self.components[3].eval(u),
        ]
    }

    /// Analytic Jacobian columns dF/du_i.
    pub fn jacobian(&self, u: [f64; 3]) -> [Vec4; 3] {
        let mut j = [[0.0; 4]; 3];
        for i in 0..3 {
            for c in 0..4 {
                j[i][c] = self.components[c].partial(u, i);
            }
        }
        j
    }

    /// Central-difference Jacobian (the oracle path for the analytic one).
    pub fn jacobian_fd(&self, u: [f64; 3]) -> [Vec4; 3] {
        let mut j = [[0.0; 4]; 3];
        for i in 0..3 {
            let s = EPS.cbrt() * u[i].abs().max(1.0);
            let mut up = u;
            let mut um = u;
            up[i] += s;
            um[i] -= s;
            let fp = self.eval(up);
            let fm = self.eval(um);
            for c in 0..4 {
                j[i][c] = (fp[c] - fm[c]) / (2.0 * s);
            }
        }
        j
    }
}

/// Unit normal data: frame coefficients (a,b,c,d), causal sign, and the
/// coordinate components.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NormalData {
    pub coeffs: Vec4,
    pub eps: f64,
    pub xi_coord: Vec4,
}

/// Everything the classification predicates read at one point.
#[derive(Debug, Clone, Serialize)]
pub struct FundamentalForms {
    pub induced: Mat3,
    pub h: Mat3,
    pub nabla_h: Ten3,
    /// trace of h with respect to the induced metric
    pub mean_curvature: f64,
    pub eps: f64,
}

/// Check tolerances. Classification verdicts threshold at
/// `class_factor` times the corresponding check tolerance.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    pub closed_form: f64,
    pub first_deriv: f64,
    pub h: f64,
    pub nabla_h: f64,
    pub rm: f64,
    pub class_factor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            closed_form: 1e-10,
            first_deriv: 1e-8,
            h: 1e-6,
            nabla_h: 1e-5,
            rm: 1e-5,
            class_factor: 10.0,
        }
    }
}

impl Tolerances {
    pub fn scaled(mut self, k: f64) -> Self {
        self.closed_form *= k;
        self.first_deriv *= k;
        self.h *= k;
        self.nabla_h *= k;
        self.rm *= k;
        self
    }
}

/// Classification verdict over a grid.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub totally_geodesic: bool,
    pub parallel: bool,
    pub codazzi: bool,
    pub semi_parallel: bool,
    pub minimal: bool,
    pub cmc: bool,
    pub causal: Causal,
    pub eps: f64,
    pub mean_curvature: f64,
    pub residuals: BTreeMap<String, f64>,
    pub tolerances: Tolerances,
}

/// The engine binds one profile and one immersion.
pub struct Engine<'a> {
    pub profile: &'a ProfilePair,
    pub imm: &'a Immersion,
    /// Use analytic first partials internally (tables and expressions both
    /// provide them); the FD Jacobian stays available as an oracle.
    pub analytic: bool,
}

impl<'a> Engine<'a> {
    pub fn new(profile: &'a ProfilePair, imm: &'a Immersion) -> Self {
        Engine {
            profile,
            imm,
            analytic: true,
        }
    }

    pub fn with_fd_jacobian(mut self) -> Self {
        self.analytic = false;
        self
    }

    fn sample_at(&self, u: [f64; 3]) -> Result<ProfileSample> {
        let x = self.imm.eval(u);
        self.profile.sample(x[1])
    }

    fn tangent(&self, u: [f64; 3]) -> [Vec4; 3] {
        if self.analytic {
            self.imm.jacobian(u)
        } else {
            self.imm.jacobian_fd(u)
        }
    }

    /// Central-difference tangent columns with a rank-3 check through the
    /// Gram determinant of the induced metric.
    pub fn tangent_frame(&self, u: [f64; 3]) -> Result<[Vec4; 3]> {
        let j = self.imm.jacobian_fd(u);
        let s = self.sample_at(u)?;
        let g = metric_of(&s);
        let gram = induced_from(&g, &j);
        let scale = j
            .iter()
            .map(|t| t.iter().map(|x| x * x).sum::<f64>())
            .fold(1.0f64, f64::max);
        if det3(&gram).abs() < 1e-10 * scale.powi(3) {
            return Err(GeoError::Degenerate(u[0], u[1], u[2]));
        }
        Ok(j)
    }

    pub fn induced_metric(&self, u: [f64; 3]) -> Result<Mat3> {
        let s = self.sample_at(u)?;
        let g = metric_of(&s);
        Ok(induced_from(&g, &self.tangent(u)))
    }

    /// Unit normal via the frame-component cross product; sign fixed by the
    /// first frame coefficient above tolerance; eps is read off, never
    /// assumed.
    pub fn normal(&self, u: [f64; 3]) -> Result<NormalData> {
        let s = self.sample_at(u)?;
        let j = self.tangent(u);
        let t: Vec<Vec4> = j.iter().map(|v| coord_to_frame(&s, *v)).collect();
        let mut c = [0.0; 4]; // covector: eta-pairing kernel of the rows
        for a in 0..4 {
            let rest: Vec<usize> = (0..4).filter(|&b| b != a).collect();
            let perms = [
                (0usize, 1usize, 2usize),
                (0, 2, 1),
                (1, 0, 2),
                (1, 2, 0),
                (2, 0, 1),
                (2, 1, 0),
            ];
            let mut tot = 0.0;
            for &(i, j2, k) in &perms {
                let idx = [a, rest[i], rest[j2], rest[k]];
                tot += perm_sign(idx) * t[0][rest[i]] * t[1][rest[j2]] * t[2][rest[k]];
            }
            c[a] = tot;
        }
        let euclid: f64 = c.iter().map(|x| x * x).sum();
        if euclid < 1e-20 {
            return Err(GeoError::Degenerate(u[0], u[1], u[2]));
        }
        // raise with eta
        let n = [c[0], -c[1], -c[2], -c[3]];
        let sq = eta(n, n);
        if sq.abs() < 1e-10 * euclid {
            return Err(GeoError::NullNormal(u[0], u[1], u[2]));
        }
        let eps = sq.signum();
        let inv = 1.0 / sq.abs().sqrt();
        let mut coeffs = [n[0] * inv, n[1] * inv, n[2] * inv, n[3] * inv];
        normalize_sign(&mut coeffs);
        Ok(NormalData {
            coeffs,
            eps,
            xi_coord: frame_to_coord(&s, coeffs),
        })
    }

    /// h in the coordinate basis du_i, plus the pre-symmetrization
    /// asymmetry residual (mixed-partial commutation error).
    pub fn second_form(&self, u: [f64; 3]) -> Result<(Mat3, f64)> {
        let s = self.sample_at(u)?;
        let g = metric_of(&s);
        let gam = christoffel_closed(&s);
        let nd = self.normal(u)?;
        let j = self.tangent(u);
        let mut h = [[0.0; 3]; 3];
        let mut asym: f64 = 0.0;
        for i in 0..3 {
            for k in i..3 {
                let dd_ik = self.second_partial(u, i, k);
                let dd_ki = self.second_partial(u, k, i);
                for (a, b) in [(i, k), (k, i)] {
                    let dd = if (a, b) == (i, k) { dd_ik } else { dd_ki };
                    let mut cov = dd;
                    for l in 0..4 {
                        for m in 0..4 {
                            for n in 0..4 {
                                cov[l] += gam[l][m][n] * j[a][m] * j[b][n];
                            }
                        }
                    }
                    let val = nd.eps * dot_g(&g, cov, nd.xi_coord);
                    if (a, b) == (i, k) {
                        h[i][k] = val;
                    } else {
                        asym = asym.max((val - h[i][k]).abs());
                        h[i][k] = 0.5 * (h[i][k] + val);
                    }
                }
                h[k][i] = h[i][k];
            }
        }
        Ok((h, asym))
    }

    fn second_partial(&self, u: [f64; 3], i: usize, k: usize) -> Vec4 {
        // d/du_i of column k
        if self.analytic {
            let mut out = [0.0; 4];
            for c in 0..4 {
                out[c] = self.imm.components[c].partial2(u, i, k);
            }
            out
        } else {
            let s = EPS.powf(0.25) * u[i].abs().max(1.0).max(u[k].abs());
            let mut out = [0.0; 4];
            if i == k {
                let mut up = u;
                let mut um = u;
                up[i] += s;
                um[i] -= s;
                let fp = self.imm.eval(up);
                let f0 = self.imm.eval(u);
                let fm = self.imm.eval(um);
                for c in 0..4 {
                    out[c] = (fp[c] - 2.0 * f0[c] + fm[c]) / (s * s);
                }
            } else {
                let (mut pp, mut pm, mut mp, mut mm) = (u, u, u, u);
                pp[i] += s;
                pp[k] += s;
                pm[i] += s;
                pm[k] -= s;
                mp[i] -= s;
                mp[k] += s;
                mm[i] -= s;
                mm[k] -= s;
                let (fpp, fpm, fmp, fmm) = (
                    self.imm.eval(pp),
                    self.imm.eval(pm),
                    self.imm.eval(mp),
                    self.imm.eval(mm),
                );
                for c in 0..4 {
                    out[c] = (fpp[c] - fpm[c] - fmp[c] + fmm[c]) / (4.0 * s * s);
                }
            }
            out
        }
    }

    /// Induced Christoffels from central differences of the induced metric.
    pub fn induced_christoffel(&self, u: [f64; 3]) -> Result<Ten3> {
        let mut dg = [[[0.0; 3]; 3]; 3];
        for l in 0..3 {
            let s = EPS.powf(0.25) * u[l].abs().max(1.0);
            let mut up = u;
            let mut um = u;
            up[l] += s;
            um[l] -= s;
            let gp = self.induced_metric(up)?;
            let gm = self.induced_metric(um)?;
            for i in 0..3 {
                for j in 0..3 {
                    dg[l][i][j] = (gp[i][j] - gm[i][j]) / (2.0 * s);
                }
            }
        }
        let g0 = self.induced_metric(u)?;
        let gi = inv3(&g0).ok_or(GeoError::Degenerate(u[0], u[1], u[2]))?;
        let mut gam = [[[0.0; 3]; 3]; 3];
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    let mut v = 0.0;
                    for l in 0..3 {
                        v += gi[k][l] * (dg[i][l][j] + dg[j][l][i] - dg[l][i][j]);
                    }
                    gam[k][i][j] = 0.5 * v;
                }
            }
        }
        Ok(gam)
    }

    /// Covariant derivative of h. Index order: nabla_h[i][j][k] =
    /// (nabla^M h)(du_i; du_j, du_k). Also returns h itself.
    pub fn nabla_h(&self, u: [f64; 3]) -> Result<(Ten3, Mat3)> {
        let h0 = self.second_form(u)?.0;
        let mut dh = [[[0.0; 3]; 3]; 3];
        for i in 0..3 {
            let s = EPS.powf(1.0 / 6.0) * u[i].abs().max(1.0);
            let mut up = u;
            let mut um = u;
            up[i] += s;
            um[i] -= s;
            let hp = self.second_form(up)?.0;
            let hm = self.second_form(um)?.0;
            for j in 0..3 {
                for k in 0..3 {
                    dh[i][j][k] = (hp[j][k] - hm[j][k]) / (2.0 * s);
                }
            }
        }
        let gam = self.induced_christoffel(u)?;
        let mut nh = [[[0.0; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let mut v = dh[i][j][k];
                    for m in 0..3 {
                        v -= gam[m][i][j] * h0[m][k] + gam[m][i][k] * h0[j][m];
                    }
                    nh[i][j][k] = v;
                }
            }
        }
        Ok((nh, h0))
    }

    /// The full fundamental-form bundle at u.
    pub fn fundamental_forms(&self, u: [f64; 3]) -> Result<FundamentalForms> {
        let (nabla_h, h) = self.nabla_h(u)?;
        let induced = self.induced_metric(u)?;
        let gi = inv3(&induced).ok_or(GeoError::Degenerate(u[0], u[1], u[2]))?;
        let mut tr = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                tr += gi[i][j] * h[i][j];
            }
        }
        let eps = self.normal(u)?.eps;
        Ok(FundamentalForms {
            induced,
            h,
            nabla_h,
            mean_curvature: tr,
            eps,
        })
    }

    /// Induced curvature R^M[l][k][i][j] (same convention as the ambient
    /// tables) from differences of the induced Christoffels.
    pub fn riemann_induced(&self, u: [f64; 3]) -> Result<[[[[f64; 3]; 3]; 3]; 3]> {
        let mut dgam = [[[[0.0; 3]; 3]; 3]; 3];
        for i in 0..3 {
            let s = EPS.powf(0.25) * u[i].abs().max(1.0);
            let mut up = u;
            let mut um = u;
            up[i] += s;
            um[i] -= s;
            let gp = self.induced_christoffel(up)?;
            let gm = self.induced_christoffel(um)?;
            for l in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        dgam[i][l][j][k] = (gp[l][j][k] - gm[l][j][k]) / (2.0 * s);
                    }
                }
            }
        }
        let gam = self.induced_christoffel(u)?;
        let mut rr = [[[[0.0; 3]; 3]; 3]; 3];
        for l in 0..3 {
            for k in 0..3 {
                for i in 0..3 {
                    for j in 0..3 {
                        let mut v = dgam[i][l][j][k] - dgam[j][l][i][k];
                        for m in 0..3 {
                            v += gam[l][i][m] * gam[m][j][k] - gam[l][j][m] * gam[m][i][k];
                        }
                        rr[l][k][i][j] = v;
                    }
                }
            }
        }
        Ok(rr)
    }

    /// Max-norm residuals of the Gauss and Codazzi identities over tangent
    /// tuples at u. These vanish for any immersion; they are engine
    /// self-tests, not classification predicates.
    pub fn gauss_codazzi(&self, u: [f64; 3]) -> Result<(f64, f64)> {
        let s = self.sample_at(u)?;
        let table = curvature_of(&s);
        let j = self.tangent(u);
        let tf: Vec<Vec4> = j.iter().map(|v| coord_to_frame(&s, *v)).collect();
        let nd = self.normal(u)?;
        let (nh, h) = self.nabla_h(u)?;
        let rm = self.riemann_induced(u)?;
        let gm = self.induced_metric(u)?;

        let mut gauss: f64 = 0.0;
        let mut codazzi: f64 = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let rv = table.apply(tf[a], tf[b], tf[c]);
                    // Codazzi: g(R(X,Y)Z, xi) = eps ((nh)(X,Y,Z) - (nh)(Y,X,Z))
                    let lhs = eta(rv, nd.coeffs);
                    let rhs = nd.eps * (nh[a][b][c] - nh[b][a][c]);
                    codazzi = codazzi.max((lhs - rhs).abs());
                    for dd in 0..3 {
                        // Gauss: g(R(X,Y)Z,W) = g(R^M(X,Y)Z,W)
                        //        + eps (h(X,Z)h(Y,W) - h(X,W)h(Y,Z))
                        let lhs = eta(rv, tf[dd]);
                        let mut rmw = 0.0;
                        for l in 0..3 {
                            rmw += gm[dd][l] * rm[l][c][a][b];
                        }
                        let rhs = rmw + nd.eps * (h[a][c] * h[b][dd] - h[a][dd] * h[b][c]);
                        gauss = gauss.max((lhs - rhs).abs());
                    }
                }
            }
        }
        Ok((gauss, codazzi))
    }

    /// Residual of R^M . h = 0 (semi-parallelism) at u.
    pub fn semi_parallel_residual(&self, u: [f64; 3]) -> Result<f64> {
        let rm = self.riemann_induced(u)?;
        let h = self.second_form(u)?.0;
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let mut v = 0.0;
                        for m in 0..3 {
                            v += -h[m][l] * rm[m][k][i][j] - h[k][m] * rm[m][l][i][j];
                        }
                        worst = worst.max(v.abs());
                    }
                }
            }
        }
        Ok(worst)
    }

    /// h expressed on given tangent vectors (frame components): solves for
    /// the du-coefficients of each vector and contracts.
    pub fn h_on_frame_vectors(&self, u: [f64; 3], ys: &[Vec4]) -> Result<Vec<Vec<f64>>> {
        let s = self.sample_at(u)?;
        let j = self.tangent(u);
        let tf: Vec<Vec4> = j.iter().map(|v| coord_to_frame(&s, *v)).collect();
        let h = self.second_form(u)?.0;
        let coeffs: Vec<[f64; 3]> = ys
            .iter()
            .map(|y| solve_in_span(&tf, *y))
            .collect::<Result<_>>()?;
        let mut out = vec![vec![0.0; ys.len()]; ys.len()];
        for a in 0..ys.len() {
            for b in 0..ys.len() {
                let mut v = 0.0;
                for i in 0..3 {
                    for k in 0..3 {
                        v += coeffs[a][i] * coeffs[b][k] * h[i][k];
                    }
                }
                out[a][b] = v;
            }
        }
        Ok(out)
    }

    /// Full residual sweep + verdict over a grid.
    pub fn classify(&self, grid: &[[f64; 3]], tol: &Tolerances) -> Result<Verdict> {
        if grid.is_empty() {
            return Err(GeoError::Config("empty classification grid".into()));
        }
        let mut max_h: f64 = 0.0;
        let mut max_nh: f64 = 0.0;
        let mut max_asym_nh: f64 = 0.0;
        let mut max_sp: f64 = 0.0;
        let mut max_rm: f64 = 0.0;
        let mut tr_min = f64::INFINITY;
        let mut tr_max = f64::NEG_INFINITY;
        let mut tr_abs: f64 = 0.0;
        let mut tr_sum = 0.0;
        let mut ortho: f64 = 0.0;
        let mut eps0 = 0.0;
        for (idx, &u) in grid.iter().enumerate() {
            let (nh, h) = self.nabla_h(u)?;
            let nd = self.normal(u)?;
            if idx == 0 {
                eps0 = nd.eps;
            }
            let rm = self.riemann_induced(u)?;
            let gm = self.induced_metric(u)?;
            let gi = inv3(&gm).ok_or(GeoError::Degenerate(u[0], u[1], u[2]))?;
            let s = self.sample_at(u)?;
            let g = metric_of(&s);
            for t in self.tangent(u) {
                ortho = ortho.max(dot_g(&g, t, nd.xi_coord).abs());
            }
            let mut tr = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    max_h = max_h.max(h[i][j].abs());
                    tr += gi[i][j] * h[i][j];
                    for k in 0..3 {
                        max_nh = max_nh.max(nh[i][j][k].abs());
                        max_asym_nh = max_asym_nh.max((nh[i][j][k] - nh[j][i][k]).abs());
                        for l in 0..3 {
                            max_rm = max_rm.max(rm[i][j][k][l].abs());
                        }
                    }
                }
            }
            let mut sp: f64 = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        for l in 0..3 {
                            let mut v = 0.0;
                            for m in 0..3 {
                                v += -h[m][l] * rm[m][k][i][j] - h[k][m] * rm[m][l][i][j];
                            }
                            sp = sp.max(v.abs());
                        }
                    }
                }
            }
            max_sp = max_sp.max(sp);
            tr_min = tr_min.min(tr);
            tr_max = tr_max.max(tr);
            tr_abs = tr_abs.max(tr.abs());
            tr_sum += tr;
        }
        let f = tol.class_factor;
        let totally_geodesic = max_h < tol.h * f;
        let parallel = totally_geodesic || max_nh < tol.nabla_h * f;
        let codazzi = parallel || max_asym_nh < tol.nabla_h * f;
        let semi_parallel = parallel || max_sp < tol.nabla_h * f;
        let minimal = tr_abs < tol.h * f;
        let cmc = minimal || (tr_max - tr_min) < tol.nabla_h * f;
        let mut residuals = BTreeMap::new();
        residuals.insert("max_h".into(), max_h);
        residuals.insert("max_nabla_h".into(), max_nh);
        residuals.insert("nabla_h_asym".into(), max_asym_nh);
        residuals.insert("semi_parallel".into(), max_sp);
        residuals.insert("max_rm".into(), max_rm);
        residuals.insert("tr_h_abs".into(), tr_abs);
        residuals.insert("tr_h_variation".into(), tr_max - tr_min);
        residuals.insert("normal_orthogonality".into(), ortho);
        Ok(Verdict {
            totally_geodesic,
            parallel,
            codazzi,
            semi_parallel,
            minimal,
            cmc,
            causal: Causal::from_eps(eps0),
            eps: eps0,
            mean_curvature: tr_sum / grid.len() as f64,
            residuals,
            tolerances: *tol,
        })
    }
}

/// Deterministic sign convention for unit normals: the frame coefficient
/// of largest magnitude is made positive (ties to the lowest index). This
/// stays continuous along every catalog family, unlike fixing the first
/// nonzero coefficient, which flips where that coefficient crosses zero.
pub fn normalize_sign(coeffs: &mut Vec4) {
    let mut idx = 0;
    for l in 1..4 {
        if coeffs[l].abs() > coeffs[idx].abs() {
            idx = l;
        }
    }
    if coeffs[idx] < 0.0 {
        for v in coeffs.iter_mut() {
            *v = -*v;
        }
    }
}

pub fn induced_from(g: &[[f64; 4]; 4], j: &[Vec4; 3]) -> Mat3 {
    let mut gm = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            gm[a][b] = dot_g(g, j[a], j[b]);
        }
    }
    gm
}

pub fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn inv3(m: &Mat3) -> Option<Mat3> {
    let det = det3(m);
    if det.abs() < 1e-300 {
        return None;
    }
    let inv_det = 1.0 / det;
    let mut out = [[0.0; 3]; 3];
    out[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * inv_det;
    out[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv_det;
    out[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv_det;
    out[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * inv_det;
    out[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv_det;
    out[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv_det;
    out[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * inv_det;
    out[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv_det;
    out[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv_det;
    Some(out)
}

fn perm_sign(p: [usize; 4]) -> f64 {
    let mut sign = 1.0;
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] > p[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Solve y = sum c_i t_i in the tangent span (frame components), by normal
/// equations; errors if y is visibly outside the span.
fn solve_in_span(t: &[Vec4], y: Vec4) -> Result<[f64; 3]> {
    let mut a = [[0.0; 3]; 3];
    let mut b = [0.0; 3];
    for i in 0..3 {
        for j in 0..3 {
            a[i][j] = (0..4).map(|l| t[i][l] * t[j][l]).sum();
        }
        b[i] = (0..4).map(|l| t[i][l] * y[l]).sum();
    }
    let ai = inv3(&a).ok_or_else(|| {
        GeoError::Parameter("tangent vectors numerically dependent".into())
    })?;
    let mut c = [0.0; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i] += ai[i][j] * b[j];
        }
    }
    // residual check
    let mut res = [y[0], y[1], y[2], y[3]];
    for l in 0..4 {
        for i in 0..3 {
            res[l] -= c[i] * t[i][l];
        }
    }
    let scale: f64 = y.iter().map(|v| v.abs()).fold(1.0, f64::max);
    if res.iter().map(|v| v.abs()).fold(0.0f64, f64::max) > 1e-6 * scale {
        return Err(GeoError::Parameter(
            "vector not in tangent span".into(),
        ));
    }
    Ok(c)
}

/// Second-fundamental-form data of a frame *distribution* with constant
/// coefficients: tilde h(X,Y) = eps * eta(nabla_X Y, xi) over a spanning
/// set of the orthogonal complement of xi. Returns (max |tilde h|,
/// asymmetry). A nonzero asymmetry certifies the distribution is not
/// integrable, so no hypersurface with that normal exists.
pub fn distribution_second_form(p: &ProfilePair, r: f64, xi: Vec4) -> Result<(f64, f64)> {
    let s = p.sample(r)?;
    let con = crate::geometry::connection_of(&s);
    let basis = tangent_basis(xi)?;
    let sq = eta(xi, xi);
    let eps = sq.signum();
    let mut max_h: f64 = 0.0;
    let mut asym: f64 = 0.0;
    let htilde = |x: Vec4, y: Vec4| -> f64 {
        let mut nab = [0.0; 4];
        for i in 0..4 {
            for j in 0..4 {
                let v = con.entries[i][j];
                for l in 0..4 {
                    nab[l] += x[i] * y[j] * v[l];
                }
            }
        }
        eps * eta(nab, xi) / sq.abs()
    };
    for a in 0..3 {
        for b in 0..3 {
            let hab = htilde(basis[a], basis[b]);
            let hba = htilde(basis[b], basis[a]);
            max_h = max_h.max(hab.abs());
            asym = asym.max((hab - hba).abs());
        }
    }
    Ok((max_h, asym))
}

/// Three spanning vectors of the eta-orthogonal complement of xi
/// (xi non-null), by pivoted projection of the standard frame basis.
pub fn tangent_basis(xi: Vec4) -> Result<[Vec4; 3]> {
    let sq = eta(xi, xi);
    if sq.abs() < 1e-12 {
        return Err(GeoError::NullNormal(0.0, 0.0, 0.0));
    }
    let mut cands: Vec<Vec4> = Vec::new();
    for a in 0..4 {
        let mut e = [0.0; 4];
        e[a] = 1.0;
        let proj = eta(e, xi) / sq;
        let mut v = e;
        for l in 0..4 {
            v[l] -= proj * xi[l];
        }
        cands.push(v);
    }
    // pick 3 with pivoted Gram-Schmidt in the Euclidean sense (only for
    // independence; no pseudo-normalization)
    let mut basis: Vec<Vec4> = Vec::new();
    for _ in 0..3 {
        let mut best = None;
        let mut best_norm = 0.0;
        for (i, v) in cands.iter().enumerate() {
            let n: f64 = v.iter().map(|x| x * x).sum();
            if n > best_norm {
                best_norm = n;
                best = Some(i);
            }
        }
        let i = best.ok_or_else(|| GeoError::Parameter("degenerate complement".into()))?;
        let v = cands.remove(i);
        let vn: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let v = [v[0] / vn, v[1] / vn, v[2] / vn, v[3] / vn];
        for w in cands.iter_mut() {
            let d: f64 = (0..4).map(|l| w[l] * v[l]).sum();
            for l in 0..4 {
                w[l] -= d * v[l];
            }
        }
        basis.push(v);
    }
    Ok([basis[0], basis[1], basis[2]])
}

/// Max norm of R(X,Y)xi over pairs from a spanning tangent set, from the
/// closed-form curvature table. Zero (within tolerance) exactly when the
/// algebraic normal-direction conditions hold at r.
pub fn codazzi_normal_residual(p: &ProfilePair, r: f64, xi: Vec4) -> Result<f64> {
    let s = p.sample(r)?;
    let table = curvature_of(&s);
    let basis = tangent_basis(xi)?;
    let mut worst: f64 = 0.0;
    for a in 0..3 {
        for b in a + 1..3 {
            let v = table.apply(basis[a], basis[b], xi);
            worst = worst.max(crate::geometry::max_abs4(v));
        }
    }
    Ok(worst)
}

/// The five explicit curvature contractions of the normal-direction
/// residual system, transcribed as printed; each returns the (E1, E2, E3)
/// coefficient triple. Kept verbatim for cross-checking against the
/// table-driven residual; per-term signs in the source are known to be
/// inconsistent, so comparisons happen on magnitudes.
pub fn residual_system_displays(p: &ProfilePair, r: f64, xi: Vec4) -> Result<[[f64; 3]; 5]> {
    let f = p.invariants(r)?;
    let (a, b, c, d) = (xi[0], xi[1], xi[2], xi[3]);
    let (f1, f2, f3) = (f.f1, f.f2, f.f3);
    Ok([
        [
            a * a * b * f2,
            -a * (a * c * (f1 + f3) - (a * a + c * c) * f2),
            a * b * (a * f1 - c * f2 + a * f3),
        ],
        [b * b * d * f1, b * d * (a * f1 - c * f2), b * b * d * f2],
        [a * c * d * f1, 0.0, -a * a * d * f1],
        [
            -a * b * c * f2,
            c * (a * c * (f1 + f3) - (a * a + c * c) * f2),
            -b * c * (a * f1 - c * f2 + a * f3),
        ],
        [b * b * d * f2, b * d * (a * f2 - c * f3), b * b * d * f3],
    ])
}

/// The tangent six-vector recipe used by the residual system proofs.
pub fn tangent_six(xi: Vec4) -> [Vec4; 6] {
    let (a, b, c, d) = (xi[0], xi[1], xi[2], xi[3]);
    [
        [b, a, 0.0, 0.0],
        [c, 0.0, a, 0.0],
        [d, 0.0, 0.0, a],
        [0.0, c, -b, 0.0],
        [0.0, d, 0.0, -b],
        [0.0, 0.0, d, -c],
    ]
}

/// Which normal-direction case (I)-(VI) a coefficient tuple satisfies on a
/// grid, with the case's algebraic side-condition residual.
#[derive(Debug, Clone, Serialize)]
pub struct NormalCaseReport {
    pub case: Option<&'static str>,
    pub side_condition_residual: f64,
    pub table_residual: f64,
}

pub fn classify_normal_tuple(
    p: &ProfilePair,
    grid: &[f64],
    xi: Vec4,
    tol: f64,
) -> Result<NormalCaseReport> {
    let (a, b, c, d) = (xi[0], xi[1], xi[2], xi[3]);
    let mut table_residual: f64 = 0.0;
    for &r in grid {
        table_residual = table_residual.max(codazzi_normal_residual(p, r, xi)?);
    }
    // side conditions per case, max over grid
    let mut f2max: f64 = 0.0;
    let mut f1max: f64 = 0.0;
    let mut civ: f64 = 0.0;
    let mut cvi: f64 = 0.0;
    for &r in grid {
        let f = p.invariants(r)?;
        f2max = f2max.max(f.f2.abs());
        f1max = f1max.max(f.f1.abs());
        civ = civ.max((a * c * (f.f1 + f.f3) - (a * a + c * c) * f.f2).abs());
        cvi = cvi.max(f.f2.abs().max((f.f1 + f.f3).abs()));
    }
    let z = |x: f64| x.abs() < tol;
    let (case, side): (Option<&'static str>, f64) = if z(a) && z(b) && z(c) {
        (Some("I"), 0.0)
    } else if z(a) && z(c) && z(d) {
        (Some("II"), 0.0)
    } else if z(a) && z(d) && f2max < tol {
        (Some("III"), f2max)
    } else if z(b) && z(d) && civ < tol {
        (Some("IV"), civ)
    } else if z(b) && z(c) && f1max < tol {
        (Some("V"), f1max)
    } else if z(d) && cvi < tol {
        (Some("VI"), cvi)
    } else {
        (None, f64::NAN)
    };
    Ok(NormalCaseReport {
        case,
        side_condition_residual: side,
        table_residual,
    })
}
