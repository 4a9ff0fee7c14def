//! Fixed-step RK4 integration onto a node table with quintic Hermite
//! interpolation. Immersion components defined by ODEs or quadratures are
//! integrated once over a padded interval and then evaluated through the
//! table. Tables store value, first and second derivative per node, so
//! interpolated second derivatives stay accurate enough for the
//! third-difference machinery downstream (cubic interpolants cannot: their
//! second-derivative error floor sits orders of magnitude higher).

use crate::error::{GeoError, Result};

pub const SUBSTEPS: usize = 10;

/// Dense table of one ODE solution or tabulated function family.
#[derive(Debug, Clone)]
pub struct OdeTable {
    lo: f64,
    hi: f64,
    step: f64,
    dim: usize,
    values: Vec<Vec<f64>>,
    derivs: Vec<Vec<f64>>,
    seconds: Vec<Vec<f64>>,
}

impl OdeTable {
    /// Integrate y' = rhs(x, y) from the anchor (x0, y0) across [lo, hi]
    /// with `nodes` table nodes. x0 must lie inside [lo, hi]; integration
    /// runs both directions from the anchor. Node second derivatives come
    /// from differencing the RHS along the solution.
    pub fn solve<F>(rhs: F, x0: f64, y0: &[f64], lo: f64, hi: f64, nodes: usize) -> Result<Self>
    where
        F: Fn(f64, &[f64]) -> Result<Vec<f64>>,
    {
        if !(lo < hi) || !(x0 >= lo && x0 <= hi) {
            return Err(GeoError::Parameter(format!(
                "bad integration interval [{lo}, {hi}] with anchor {x0}"
            )));
        }
        let n = nodes.max(2);
        let step = (hi - lo) / (n - 1) as f64;
        let dim = y0.len();
        let mut values = vec![vec![0.0; dim]; n];
        let mut derivs = vec![vec![0.0; dim]; n];
        let mut seconds = vec![vec![0.0; dim]; n];

        // nearest node to the anchor; step to it first, then sweep outward
        let i0 = ((x0 - lo) / step).round().clamp(0.0, (n - 1) as f64) as usize;
        let x_i0 = lo + i0 as f64 * step;
        let y_i0 = rk4_span(&rhs, x0, y0.to_vec(), x_i0, SUBSTEPS)?;
        values[i0] = y_i0.clone();

        let mut y = y_i0.clone();
        for i in (0..i0).rev() {
            let xa = lo + (i + 1) as f64 * step;
            let xb = lo + i as f64 * step;
            y = rk4_span(&rhs, xa, y, xb, SUBSTEPS)?;
            values[i] = y.clone();
        }
        let mut y = y_i0;
        for i in i0 + 1..n {
            let xa = lo + (i - 1) as f64 * step;
            let xb = lo + i as f64 * step;
            y = rk4_span(&rhs, xa, y, xb, SUBSTEPS)?;
            values[i] = y.clone();
        }
        for i in 0..n {
            let x = lo + i as f64 * step;
            derivs[i] = rhs(x, &values[i])?;
            // y'' by differencing the RHS along short RK4 excursions
            let delta = 1e-5 * x.abs().max(1.0);
            let yp = rk4_span(&rhs, x, values[i].clone(), x + delta, 1)?;
            let ym = rk4_span(&rhs, x, values[i].clone(), x - delta, 1)?;
            let dp = rhs(x + delta, &yp)?;
            let dm = rhs(x - delta, &ym)?;
            for c in 0..dim {
                seconds[i][c] = (dp[c] - dm[c]) / (2.0 * delta);
            }
        }

        Ok(OdeTable {
            lo,
            hi,
            step,
            dim,
            values,
            derivs,
            seconds,
        })
    }

    /// Tabulate closed-form functions directly; node derivatives from
    /// five-point stencils.
    pub fn tabulate(fs: &[&dyn Fn(f64) -> Result<f64>], lo: f64, hi: f64, nodes: usize) -> Result<Self> {
        if !(lo < hi) {
            return Err(GeoError::Parameter(format!(
                "bad tabulation interval [{lo}, {hi}]"
            )));
        }
        let n = nodes.max(2);
        let step = (hi - lo) / (n - 1) as f64;
        let dim = fs.len();
        let mut values = vec![vec![0.0; dim]; n];
        let mut derivs = vec![vec![0.0; dim]; n];
        let mut seconds = vec![vec![0.0; dim]; n];
        let s = 1e-3 * lo.abs().max(hi.abs()).max(1.0);
        for i in 0..n {
            let x = lo + i as f64 * step;
            for (c, f) in fs.iter().enumerate() {
                let (fm2, fm1, f0, fp1, fp2) =
                    (f(x - 2.0 * s)?, f(x - s)?, f(x)?, f(x + s)?, f(x + 2.0 * s)?);
                if !f0.is_finite() {
                    return Err(GeoError::Parameter(format!(
                        "tabulated function not finite at x = {x:.4}"
                    )));
                }
                values[i][c] = f0;
                derivs[i][c] = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * s);
                seconds[i][c] =
                    (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * s * s);
            }
        }
        Ok(OdeTable {
            lo,
            hi,
            step,
            dim,
            values,
            derivs,
            seconds,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn range(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let n = self.values.len();
        let mut i = ((x - self.lo) / self.step).floor() as isize;
        i = i.clamp(0, n as isize - 2);
        let i = i as usize;
        let t = (x - (self.lo + i as f64 * self.step)) / self.step;
        (i, t)
    }

    fn cell(&self, x: f64, col: usize) -> (f64, [f64; 6]) {
        let (i, t) = self.locate(x);
        (
            t,
            [
                self.values[i][col],
                self.derivs[i][col],
                self.seconds[i][col],
                self.values[i + 1][col],
                self.derivs[i + 1][col],
                self.seconds[i + 1][col],
            ],
        )
    }

    /// Quintic Hermite value of column `col` at x.
    pub fn eval(&self, x: f64, col: usize) -> f64 {
        let (t, [y0, d0, s0, y1, d1, s1]) = self.cell(x, col);
        let t2 = t * t;
        let t3 = t2 * t;
        let t4 = t3 * t;
        let t5 = t4 * t;
        let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
        let h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
        let h2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
        let k0 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
        let k1 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
        let k2 = 0.5 * t3 - t4 + 0.5 * t5;
        let st = self.step;
        h0 * y0 + st * h1 * d0 + st * st * h2 * s0 + k0 * y1 + st * k1 * d1 + st * st * k2 * s1
    }

    /// First derivative of the interpolant.
    pub fn eval_deriv(&self, x: f64, col: usize) -> f64 {
        let (t, [y0, d0, s0, y1, d1, s1]) = self.cell(x, col);
        let t2 = t * t;
        let t3 = t2 * t;
        let t4 = t3 * t;
        let dh0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
        let dh1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
        let dh2 = t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4;
        let dk0 = 30.0 * t2 - 60.0 * t3 + 30.0 * t4;
        let dk1 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
        let dk2 = 1.5 * t2 - 4.0 * t3 + 2.5 * t4;
        let st = self.step;
        (dh0 * y0 + dk0 * y1) / st + dh1 * d0 + dk1 * d1 + st * (dh2 * s0 + dk2 * s1)
    }

    /// Second derivative of the interpolant.
    pub fn eval_deriv2(&self, x: f64, col: usize) -> f64 {
        let (t, [y0, d0, s0, y1, d1, s1]) = self.cell(x, col);
        let t2 = t * t;
        let t3 = t2 * t;
        let ddh0 = -60.0 * t + 180.0 * t2 - 120.0 * t3;
        let ddh1 = -36.0 * t + 96.0 * t2 - 60.0 * t3;
        let ddh2 = 1.0 - 9.0 * t + 18.0 * t2 - 10.0 * t3;
        let ddk0 = 60.0 * t - 180.0 * t2 + 120.0 * t3;
        let ddk1 = -24.0 * t + 84.0 * t2 - 60.0 * t3;
        let ddk2 = 3.0 * t - 12.0 * t2 + 10.0 * t3;
        let st = self.step;
        (ddh0 * y0 + ddk0 * y1) / (st * st) + (ddh1 * d0 + ddk1 * d1) / st + ddh2 * s0 + ddk2 * s1
    }
}

fn rk4_span<F>(rhs: &F, xa: f64, mut y: Vec<f64>, xb: f64, substeps: usize) -> Result<Vec<f64>>
where
    F: Fn(f64, &[f64]) -> Result<Vec<f64>>,
{
    if xa == xb {
        return Ok(y);
    }
    let n = substeps.max(1);
    let h = (xb - xa) / n as f64;
    let dim = y.len();
    for s in 0..n {
        let x = xa + s as f64 * h;
        let k1 = rhs(x, &y)?;
        let mut y2 = y.clone();
        for i in 0..dim {
            y2[i] = y[i] + 0.5 * h * k1[i];
        }
        let k2 = rhs(x + 0.5 * h, &y2)?;
        for i in 0..dim {
            y2[i] = y[i] + 0.5 * h * k2[i];
        }
        let k3 = rhs(x + 0.5 * h, &y2)?;
        for i in 0..dim {
            y2[i] = y[i] + h * k3[i];
        }
        let k4 = rhs(x + h, &y2)?;
        for i in 0..dim {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if !y[i].is_finite() {
                return Err(GeoError::Parameter(format!(
                    "ODE solution blew up near x = {:.4}",
                    x + h
                )));
            }
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_exponential() {
        let t = OdeTable::solve(|_, y| Ok(vec![y[0]]), 0.0, &[1.0], -1.0, 1.0, 101).unwrap();
        for &x in &[-0.97, -0.5, 0.0, 0.33, 0.99] {
            assert!(
                (t.eval(x, 0) - x.exp()).abs() < 5e-9,
                "x={x}: {} vs {}",
                t.eval(x, 0),
                x.exp()
            );
            assert!((t.eval_deriv(x, 0) - x.exp()).abs() < 5e-9);
            assert!((t.eval_deriv2(x, 0) - x.exp()).abs() < 1e-7);
        }
    }

    #[test]
    fn integrates_oscillator_system() {
        // y'' = -y as a system; anchor in the middle of the interval
        let rhs = |_: f64, y: &[f64]| Ok(vec![y[1], -y[0]]);
        let t = OdeTable::solve(rhs, 0.5, &[0.5f64.sin(), 0.5f64.cos()], -2.0, 2.0, 201).unwrap();
        for &x in &[-1.9, -0.3, 0.5, 1.7] {
            assert!((t.eval(x, 0) - x.sin()).abs() < 1e-9, "sin at {x}");
            assert!((t.eval(x, 1) - x.cos()).abs() < 1e-9, "cos at {x}");
            assert!((t.eval_deriv2(x, 0) + x.sin()).abs() < 1e-8, "sin'' at {x}");
        }
    }

    #[test]
    fn tabulates_closed_forms() {
        let f = |x: f64| -> crate::error::Result<f64> { Ok((2.0 * x).cosh()) };
        let t = OdeTable::tabulate(&[&f], 0.3, 1.7, 501).unwrap();
        for &x in &[0.31, 0.9, 1.45, 1.69] {
            assert!((t.eval(x, 0) - (2.0 * x).cosh()).abs() < 1e-11);
            assert!((t.eval_deriv(x, 0) - 2.0 * (2.0 * x).sinh()).abs() < 1e-9);
            assert!((t.eval_deriv2(x, 0) - 4.0 * (2.0 * x).cosh()).abs() < 1e-6);
        }
    }

    #[test]
    fn reports_blow_up() {
        // y' = y^2 from y(0)=1 blows up at x=1
        let r = OdeTable::solve(|_, y| Ok(vec![y[0] * y[0]]), 0.0, &[1.0], 0.0, 2.0, 101);
        assert!(matches!(r, Err(GeoError::Parameter(_))));
    }

    #[test]
    fn rejects_bad_interval() {
        assert!(OdeTable::solve(|_, y| Ok(y.to_vec()), 5.0, &[1.0], 0.0, 1.0, 10).is_err());
    }
}
