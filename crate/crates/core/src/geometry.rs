//! Ambient geometry: metric, pseudo-orthonormal frame, Levi-Civita
//! connection and curvature.
//!
//! Everything exists twice: once as the closed-form tables in the frame
//! E1..E4, and once as a finite-difference oracle working in coordinates
//! (Christoffels from central differences of the metric, curvature from
//! differences of Christoffels). Verification runs print both paths and
//! their gap.
//!
//! Curvature sign convention: R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]
//! throughout, which is the convention the Gauss and Codazzi identities
//! below are stated in.

use crate::error::{GeoError, Result};
use crate::profiles::{invariants_of, ProfilePair, ProfileSample};

const EPS: f64 = f64::EPSILON;

pub type Vec4 = [f64; 4];
pub type Mat4 = [[f64; 4]; 4];

/// Coordinates (t, r, phi, z) = (x1, x2, x3, x4).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacetimePoint {
    pub t: f64,
    pub r: f64,
    pub phi: f64,
    pub z: f64,
}

impl SpacetimePoint {
    pub fn new(t: f64, r: f64, phi: f64, z: f64) -> Self {
        SpacetimePoint { t, r, phi, z }
    }

    pub fn from_array(x: Vec4) -> Self {
        SpacetimePoint::new(x[0], x[1], x[2], x[3])
    }

    pub fn to_array(self) -> Vec4 {
        [self.t, self.r, self.phi, self.z]
    }
}

/// Minkowski-signature frame inner product diag(+1,-1,-1,-1).
pub fn eta(a: Vec4, b: Vec4) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
}

pub fn dot_g(g: &Mat4, a: Vec4, b: Vec4) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            s += g[i][j] * a[i] * b[j];
        }
    }
    s
}

pub fn max_abs4(v: Vec4) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Metric tensor in coordinates: g_tt = 1, g_tphi = H, g_phiphi = H^2 - D^2,
/// g_rr = g_zz = -1.
pub fn metric_at(p: &ProfilePair, x: &SpacetimePoint) -> Result<Mat4> {
    let s = p.sample(x.r)?;
    Ok(metric_of(&s))
}

pub fn metric_of(s: &ProfileSample) -> Mat4 {
    let mut g = [[0.0; 4]; 4];
    g[0][0] = 1.0;
    g[0][2] = s.h;
    g[2][0] = s.h;
    g[2][2] = s.h * s.h - s.d * s.d;
    g[1][1] = -1.0;
    g[3][3] = -1.0;
    g
}

/// Analytic inverse of the metric (block form; avoids LU near small D).
pub fn metric_inverse(s: &ProfileSample) -> Mat4 {
    let d2 = s.d * s.d;
    let mut gi = [[0.0; 4]; 4];
    gi[0][0] = 1.0 - s.h * s.h / d2;
    gi[0][2] = s.h / d2;
    gi[2][0] = s.h / d2;
    gi[2][2] = -1.0 / d2;
    gi[1][1] = -1.0;
    gi[3][3] = -1.0;
    gi
}

/// The pseudo-orthonormal frame, rows = coordinate components of E1..E4.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub e: [Vec4; 4],
}

pub fn frame_at(p: &ProfilePair, x: &SpacetimePoint) -> Result<Frame> {
    Ok(frame_of(&p.sample(x.r)?))
}

pub fn frame_of(s: &ProfileSample) -> Frame {
    Frame {
        e: [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [-s.h / s.d, 0.0, 1.0 / s.d, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ],
    }
}

/// Coordinate components -> frame components. Exact inverse of the frame
/// matrix: d/dphi = D E3 + H E1, the rest coincide.
pub fn coord_to_frame(s: &ProfileSample, v: Vec4) -> Vec4 {
    [v[0] + s.h * v[2], v[1], s.d * v[2], v[3]]
}

/// Frame components -> coordinate components.
pub fn frame_to_coord(s: &ProfileSample, w: Vec4) -> Vec4 {
    [w[0] - s.h / s.d * w[2], w[1], w[2] / s.d, w[3]]
}

/// Frame connection table: entry [i][j] holds the frame components of
/// nabla_{E_{i+1}} E_{j+1}.
#[derive(Debug, Clone)]
pub struct ConnectionTable {
    pub entries: [[Vec4; 4]; 4],
}

pub fn frame_connection(p: &ProfilePair, r: f64) -> Result<ConnectionTable> {
    Ok(connection_of(&p.sample(r)?))
}

pub fn connection_of(s: &ProfileSample) -> ConnectionTable {
    let k1 = s.hp / (2.0 * s.d);
    let k2 = s.dp / s.d;
    let z = [0.0; 4];
    let mut t = [[z; 4]; 4];
    t[0][1] = [0.0, 0.0, -k1, 0.0]; // nabla_{E1}E2 = -k1 E3
    t[0][2] = [0.0, k1, 0.0, 0.0]; // nabla_{E1}E3 =  k1 E2
    t[1][0] = [0.0, 0.0, -k1, 0.0]; // nabla_{E2}E1 = -k1 E3
    t[1][2] = [-k1, 0.0, 0.0, 0.0]; // nabla_{E2}E3 = -k1 E1
    t[2][0] = [0.0, k1, 0.0, 0.0]; // nabla_{E3}E1 =  k1 E2
    t[2][1] = [k1, 0.0, k2, 0.0]; // nabla_{E3}E2 =  k1 E1 + k2 E3
    t[2][2] = [0.0, -k2, 0.0, 0.0]; // nabla_{E3}E3 = -k2 E2
    ConnectionTable { entries: t }
}

/// Frame curvature table under R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y].
///
/// Only index pairs from {1,2,3} are nonzero; every component involving E4
/// vanishes. The nonzero block is determined by f1, f2 (as -(H'/2D)') and
/// the combination q = (3H'^2 - 4 D D'')/(4D^2).
#[derive(Debug, Clone)]
pub struct CurvatureTable {
    // entries[i][j][k] = frame components of R(E_{i+1}, E_{j+1}) E_{k+1}
    entries: [[[Vec4; 4]; 4]; 4],
}

impl CurvatureTable {
    pub fn get(&self, i: usize, j: usize, k: usize) -> Vec4 {
        self.entries[i][j][k]
    }

    /// R(X,Y)Z for frame-component vectors, by multilinearity.
    pub fn apply(&self, x: Vec4, y: Vec4, z: Vec4) -> Vec4 {
        let mut out = [0.0; 4];
        for i in 0..4 {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..4 {
                if y[j] == 0.0 {
                    continue;
                }
                for k in 0..4 {
                    if z[k] == 0.0 {
                        continue;
                    }
                    let v = self.entries[i][j][k];
                    let c = x[i] * y[j] * z[k];
                    for l in 0..4 {
                        out[l] += c * v[l];
                    }
                }
            }
        }
        out
    }
}

pub fn frame_curvature(p: &ProfilePair, r: f64) -> Result<CurvatureTable> {
    Ok(curvature_of(&p.sample(r)?))
}

pub fn curvature_of(s: &ProfileSample) -> CurvatureTable {
    let f = invariants_of(s);
    let f1 = f.f1;
    let pr = -f.f2; // (H'/2D)'
    let q = (3.0 * s.hp * s.hp - 4.0 * s.d * s.dpp) / (4.0 * s.d * s.d);
    let z = [0.0; 4];
    let mut e = [[[z; 4]; 4]; 4];
    let mut set = |i: usize, j: usize, k: usize, v: Vec4| {
        e[i - 1][j - 1][k - 1] = v;
        e[j - 1][i - 1][k - 1] = [-v[0], -v[1], -v[2], -v[3]];
    };
    set(1, 2, 1, [0.0, -f1, 0.0, 0.0]);
    set(1, 2, 2, [-f1, 0.0, pr, 0.0]);
    set(1, 2, 3, [0.0, -pr, 0.0, 0.0]);
    set(1, 3, 1, [0.0, 0.0, -f1, 0.0]);
    set(1, 3, 3, [-f1, 0.0, 0.0, 0.0]);
    set(2, 3, 1, [0.0, pr, 0.0, 0.0]);
    set(2, 3, 2, [pr, 0.0, -q, 0.0]);
    set(2, 3, 3, [0.0, q, 0.0, 0.0]);
    CurvatureTable { entries: e }
}

/// Coordinate Christoffel symbols, closed form. Gamma[k][i][j] is symmetric
/// in (i, j); only r-derivatives of the metric contribute.
pub fn christoffel_closed(s: &ProfileSample) -> [[[f64; 4]; 4]; 4] {
    let (h, hp, d, dp) = (s.h, s.hp, s.d, s.dp);
    let d2 = d * d;
    let mut g = [[[0.0; 4]; 4]; 4];
    let mut set = |k: usize, i: usize, j: usize, v: f64| {
        g[k][i][j] = v;
        g[k][j][i] = v;
    };
    set(1, 0, 2, 0.5 * hp);
    set(0, 0, 1, 0.5 * h * hp / d2);
    set(2, 0, 1, -0.5 * hp / d2);
    set(0, 1, 2, 0.5 * (hp + h * h * hp / d2 - 2.0 * h * dp / d));
    set(2, 1, 2, 0.5 * (2.0 * d * dp - h * hp) / d2);
    set(1, 2, 2, h * hp - d * dp);
    g
}

/// Oracle: Christoffels from central differences of `metric_at`.
pub fn christoffel_fd(p: &ProfilePair, x: &SpacetimePoint) -> Result<[[[f64; 4]; 4]; 4]> {
    let step = EPS.cbrt() * x.r.abs().max(1.0);
    let mut dg = [[[0.0; 4]; 4]; 4]; // dg[l][i][j] = d_l g_ij
    for l in 0..4 {
        let mut xp = x.to_array();
        let mut xm = x.to_array();
        xp[l] += step;
        xm[l] -= step;
        let gp = metric_at(p, &SpacetimePoint::from_array(xp))?;
        let gm = metric_at(p, &SpacetimePoint::from_array(xm))?;
        for i in 0..4 {
            for j in 0..4 {
                dg[l][i][j] = (gp[i][j] - gm[i][j]) / (2.0 * step);
            }
        }
    }
    let s = p.sample(x.r)?;
    let gi = metric_inverse(&s);
    let mut gam = [[[0.0; 4]; 4]; 4];
    for k in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                let mut v = 0.0;
                for l in 0..4 {
                    v += gi[k][l] * (dg[i][l][j] + dg[j][l][i] - dg[l][i][j]);
                }
                gam[k][i][j] = 0.5 * v;
            }
        }
    }
    Ok(gam)
}

/// Which vector field the Koszul oracle differentiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldSpec {
    /// Frame field E1..E4 (0-based index).
    Frame(usize),
    /// Coordinate field d/dx_i (0-based index).
    Coord(usize),
}

fn field_value(p: &ProfilePair, spec: FieldSpec, x: &SpacetimePoint) -> Result<Vec4> {
    match spec {
        FieldSpec::Frame(a) => Ok(frame_at(p, x)?.e[a]),
        FieldSpec::Coord(i) => {
            let mut v = [0.0; 4];
            v[i] = 1.0;
            Ok(v)
        }
    }
}

/// nabla_X Y at x, computed entirely from finite differences: Christoffels
/// from differenced metric, field derivatives from differenced field values.
/// `x_vec` holds coordinate components of X at the point.
pub fn koszul_oracle(
    p: &ProfilePair,
    x: &SpacetimePoint,
    x_vec: Vec4,
    y: FieldSpec,
) -> Result<Vec4> {
    let gam = christoffel_fd(p, x)?;
    let step = EPS.cbrt() * x.r.abs().max(1.0);
    let mut dy = [[0.0; 4]; 4]; // dy[i][l] = d_i Y^l
    for i in 0..4 {
        let mut xp = x.to_array();
        let mut xm = x.to_array();
        xp[i] += step;
        xm[i] -= step;
        let yp = field_value(p, y, &SpacetimePoint::from_array(xp))?;
        let ym = field_value(p, y, &SpacetimePoint::from_array(xm))?;
        for l in 0..4 {
            dy[i][l] = (yp[l] - ym[l]) / (2.0 * step);
        }
    }
    let yv = field_value(p, y, x)?;
    let mut out = [0.0; 4];
    for l in 0..4 {
        let mut v = 0.0;
        for i in 0..4 {
            v += x_vec[i] * dy[i][l];
            for m in 0..4 {
                v += gam[l][i][m] * x_vec[i] * yv[m];
            }
        }
        out[l] = v;
    }
    Ok(out)
}

/// Coordinate curvature components R^l_{k i j} (so R(d_i, d_j) d_k has
/// l-component R[l][k][i][j]) from FD Christoffels and their differences.
pub fn numeric_riemann(p: &ProfilePair, x: &SpacetimePoint) -> Result<[[[[f64; 4]; 4]; 4]; 4]> {
    let step = EPS.powf(0.25) * x.r.abs().max(1.0);
    let mut dgam = [[[[0.0; 4]; 4]; 4]; 4]; // dgam[i][l][j][k] = d_i Gamma^l_{jk}
    for i in 0..4 {
        let mut xp = x.to_array();
        let mut xm = x.to_array();
        xp[i] += step;
        xm[i] -= step;
        let gp = christoffel_fd(p, &SpacetimePoint::from_array(xp))?;
        let gm = christoffel_fd(p, &SpacetimePoint::from_array(xm))?;
        for l in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    dgam[i][l][j][k] = (gp[l][j][k] - gm[l][j][k]) / (2.0 * step);
                }
            }
        }
    }
    let gam = christoffel_fd(p, x)?;
    let mut rr = [[[[0.0; 4]; 4]; 4]; 4];
    for l in 0..4 {
        for k in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    let mut v = dgam[i][l][j][k] - dgam[j][l][i][k];
                    for m in 0..4 {
                        v += gam[l][i][m] * gam[m][j][k] - gam[l][j][m] * gam[m][i][k];
                    }
                    rr[l][k][i][j] = v;
                }
            }
        }
    }
    Ok(rr)
}

/// Apply coordinate curvature components to vectors (coordinate components),
/// returning R(X,Y)Z in coordinate components.
pub fn riemann_apply(rr: &[[[[f64; 4]; 4]; 4]; 4], x: Vec4, y: Vec4, z: Vec4) -> Vec4 {
    let mut out = [0.0; 4];
    for l in 0..4 {
        let mut v = 0.0;
        for k in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    v += rr[l][k][i][j] * z[k] * x[i] * y[j];
                }
            }
        }
        out[l] = v;
    }
    out
}

/// Max norm of (numeric bracket - closed form) over all frame pairs.
/// The only nonzero closed form is [E2,E3] = -(H'/D) E1 - (D'/D) E3.
pub fn bracket_residual(p: &ProfilePair, r: f64) -> Result<f64> {
    let x = SpacetimePoint::new(0.0, r, 0.0, 0.0);
    let s = p.sample(r)?;
    let step = EPS.cbrt() * r.abs().max(1.0);
    let mut worst: f64 = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            if a == b {
                continue;
            }
            // [X, Y]^l = X^i d_i Y^l - Y^i d_i X^l; frame fields vary only
            // in r. Five-point first differences keep the truncation term
            // harmless where 1/D steepens.
            let xa = frame_of(&s).e[a];
            let yb = frame_of(&s).e[b];
            let mut lie = [0.0; 4];
            for i in 0..4 {
                let mut fr = [[0.0; 4]; 4]; // dY, dX at +-step, +-2step
                for (slot, off) in [(0usize, -2.0), (1, -1.0), (2, 1.0), (3, 2.0)] {
                    let mut xs = x.to_array();
                    xs[i] += off * step;
                    let ss = p.sample(xs[1])?;
                    fr[slot] = [0.0; 4];
                    let fy = frame_of(&ss).e[b];
                    let fx = frame_of(&ss).e[a];
                    for l in 0..4 {
                        fr[slot][l] = xa[i] * fy[l] - yb[i] * fx[l];
                    }
                }
                for l in 0..4 {
                    lie[l] += (fr[0][l] - 8.0 * fr[1][l] + 8.0 * fr[2][l] - fr[3][l])
                        / (12.0 * step);
                }
            }
            let expected = if (a, b) == (1, 2) || (a, b) == (2, 1) {
                let sign = if a == 1 { 1.0 } else { -1.0 };
                let e1 = frame_of(&s).e[0];
                let e3 = frame_of(&s).e[2];
                let c1 = -s.hp / s.d * sign;
                let c3 = -s.dp / s.d * sign;
                [
                    c1 * e1[0] + c3 * e3[0],
                    c1 * e1[1] + c3 * e3[1],
                    c1 * e1[2] + c3 * e3[2],
                    c1 * e1[3] + c3 * e3[3],
                ]
            } else {
                [0.0; 4]
            };
            let diff = [
                lie[0] - expected[0],
                lie[1] - expected[1],
                lie[2] - expected[2],
                lie[3] - expected[3],
            ];
            worst = worst.max(max_abs4(coord_to_frame(&s, diff)));
        }
    }
    Ok(worst)
}

/// Torsion residual of the closed-form tables:
/// nabla_{Ei}Ej - nabla_{Ej}Ei - [Ei,Ej], max frame-component norm.
pub fn torsion_residual(p: &ProfilePair, r: f64) -> Result<f64> {
    let s = p.sample(r)?;
    let con = connection_of(&s);
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let a = con.entries[i][j];
            let b = con.entries[j][i];
            let bracket = if (i, j) == (1, 2) {
                [-s.hp / s.d, 0.0, -s.dp / s.d, 0.0]
            } else if (i, j) == (2, 1) {
                [s.hp / s.d, 0.0, s.dp / s.d, 0.0]
            } else {
                [0.0; 4]
            };
            let mut diff = [0.0; 4];
            for l in 0..4 {
                diff[l] = a[l] - b[l] - bracket[l];
            }
            worst = worst.max(max_abs4(diff));
        }
    }
    Ok(worst)
}

/// Metric-compatibility residual of the closed-form tables:
/// E_k(g(Ei,Ej)) = 0, so g(nabla_{Ek}Ei, Ej) + g(Ei, nabla_{Ek}Ej) must
/// vanish. Frame inner products use eta.
pub fn metric_compat_residual(p: &ProfilePair, r: f64) -> Result<f64> {
    let s = p.sample(r)?;
    let con = connection_of(&s);
    let id = [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ];
    let mut worst: f64 = 0.0;
    for k in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                let v = eta(con.entries[k][i], id[j]) + eta(id[i], con.entries[k][j]);
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}

/// First Bianchi identity residual of the closed-form curvature table:
/// cyclic sum R(Ei,Ej)Ek + R(Ej,Ek)Ei + R(Ek,Ei)Ej.
pub fn bianchi_residual(p: &ProfilePair, r: f64) -> Result<f64> {
    let table = frame_curvature(p, r)?;
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                let a = table.get(i, j, k);
                let b = table.get(j, k, i);
                let c = table.get(k, i, j);
                let mut sum = [0.0; 4];
                for l in 0..4 {
                    sum[l] = a[l] + b[l] + c[l];
                }
                worst = worst.max(max_abs4(sum));
            }
        }
    }
    Ok(worst)
}

/// Gap between the closed-form connection table and the Koszul FD oracle,
/// max over all 16 frame pairs, in frame components.
pub fn connection_oracle_gap(p: &ProfilePair, r: f64) -> Result<f64> {
    let x = SpacetimePoint::new(0.0, r, 0.0, 0.0);
    let s = p.sample(r)?;
    let con = connection_of(&s);
    let frame = frame_of(&s);
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let oracle = koszul_oracle(p, &x, frame.e[i], FieldSpec::Frame(j))?;
            let of = coord_to_frame(&s, oracle);
            let tab = con.entries[i][j];
            let mut diff = [0.0; 4];
            for l in 0..4 {
                diff[l] = of[l] - tab[l];
            }
            worst = worst.max(max_abs4(diff));
        }
    }
    Ok(worst)
}

/// Gap between the closed-form curvature table and the coordinate FD
/// Riemann oracle (frame-converted), max over frame triples from {1,2,3,4}.
/// Also returns the largest component involving E4, which must vanish.
pub fn curvature_oracle_gap(p: &ProfilePair, r: f64) -> Result<(f64, f64)> {
    let x = SpacetimePoint::new(0.0, r, 0.0, 0.0);
    let s = p.sample(r)?;
    let table = curvature_of(&s);
    let rr = numeric_riemann(p, &x)?;
    let frame = frame_of(&s);
    let mut worst: f64 = 0.0;
    let mut worst_e4: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                let num = riemann_apply(&rr, frame.e[i], frame.e[j], frame.e[k]);
                let nf = coord_to_frame(&s, num);
                let mut ei = [0.0; 4];
                ei[i] = 1.0;
                let mut ej = [0.0; 4];
                ej[j] = 1.0;
                let mut ek = [0.0; 4];
                ek[k] = 1.0;
                let tab = table.apply(ei, ej, ek);
                let mut diff = [0.0; 4];
                for l in 0..4 {
                    diff[l] = nf[l] - tab[l];
                }
                let gap = max_abs4(diff);
                worst = worst.max(gap);
                if i == 3 || j == 3 || k == 3 {
                    worst_e4 = worst_e4.max(max_abs4(nf));
                } else {
                    worst_e4 = worst_e4.max(nf[3].abs());
                }
            }
        }
    }
    Ok((worst, worst_e4))
}

/// Guard for operations that assume a valid point.
pub fn check_point(p: &ProfilePair, x: &SpacetimePoint) -> Result<()> {
    p.sample(x.r).map(|_| ())
}

/// Reject profiles that fit the excluded flat case alpha = omega = 0.
pub fn reject_trivial(p: &ProfilePair, grid: &[f64], tol: f64) -> Result<()> {
    if let Some(h) = p.detect_homogeneous(grid, tol) {
        if h.class == crate::profiles::DetectedClass::Excluded {
            return Err(GeoError::Profile(
                "excluded trivial case: alpha = omega = 0 (flat space)".into(),
            ));
        }
    }
    Ok(())
}
