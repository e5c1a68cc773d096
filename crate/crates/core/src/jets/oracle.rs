//! Floating-point cross-check of the prolonged field: finite differences of
//! perturbed flows against the integrated variational equations.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::jetpoly::{JetPoly, JetVar};
use super::system::{prolong, VectorFieldSpec};
use crate::exactalg::ratfun::rat_to_f64;
use crate::exactalg::RatFun;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct OracleConfig {
    /// Finite-difference step in the perturbation parameter.
    pub eps: f64,
    /// Integration interval, measured from the start point.
    pub t_span: f64,
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { eps: 1e-3, t_span: 1.0, rtol: 1e-11, atol: 1e-13, max_steps: 200_000 }
    }
}

#[derive(Clone, Debug)]
pub struct OracleReport {
    pub max_residual: f64,
    /// Worst residual per jet order `1..=k`.
    pub per_order: Vec<f64>,
    pub steps: usize,
}

/// Dense polynomial in `t`, evaluated by Horner.
#[derive(Clone, Debug)]
struct FPoly(Vec<f64>);

impl FPoly {
    fn eval(&self, t: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }
}

#[derive(Clone, Debug)]
struct Term {
    num: FPoly,
    den: FPoly,
    factors: Vec<(usize, i32)>,
}

/// Right-hand side compiled to floating point.
#[derive(Clone, Debug)]
struct Compiled {
    dim: usize,
    indep_slot: Option<usize>,
    rows: Vec<Vec<Term>>,
}

fn to_fpoly(p: &crate::exactalg::Poly) -> Result<FPoly> {
    let rats = p.to_rats().ok_or_else(|| Error::Input("oracle needs numeric coefficients".into()))?;
    Ok(FPoly(rats.iter().map(rat_to_f64).collect()))
}

impl Compiled {
    fn new(eqs: &[(JetVar, JetPoly)], indep: Option<usize>) -> Result<Self> {
        let slot: BTreeMap<JetVar, usize> = eqs.iter().enumerate().map(|(i, (v, _))| (*v, i)).collect();
        let mut rows = Vec::with_capacity(eqs.len());
        for (_, p) in eqs {
            let mut row = Vec::new();
            for (m, c) in p.terms() {
                let factors = m
                    .factors()
                    .iter()
                    .map(|(v, e)| {
                        Ok((*slot.get(v).ok_or_else(|| Error::Check("jet variable out of system".into()))?, *e as i32))
                    })
                    .collect::<Result<_>>()?;
                row.push(Term { num: to_fpoly(c.num())?, den: to_fpoly(c.den())?, factors });
            }
            rows.push(row);
        }
        let indep_slot = indep.map(|i| slot[&JetVar::new(i, 0)]);
        Ok(Compiled { dim: eqs.len(), indep_slot, rows })
    }

    fn eval(&self, y: &[f64], out: &mut [f64]) {
        let x = self.indep_slot.map_or(0.0, |s| y[s]);
        for (o, row) in out.iter_mut().zip(&self.rows) {
            let mut acc = 0.0;
            for t in row {
                let mut v = t.num.eval(x) / t.den.eval(x);
                for &(s, e) in &t.factors {
                    v *= y[s].powi(e);
                }
                acc += v;
            }
            *o = acc;
        }
    }
}

// Dormand–Prince 5(4) tableau. The systems are autonomous (the independent
// variable is a state), so the nodes are not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

/// One DOPRI5 step; returns the new state and the embedded error estimate.
fn dopri_step(f: &Compiled, y: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    let n = f.dim;
    let mut k = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    for s in 0..7 {
        for i in 0..n {
            tmp[i] = y[i] + h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>();
        }
        f.eval(&tmp, &mut k[s]);
    }
    let next: Vec<f64> = (0..n).map(|i| y[i] + h * (0..7).map(|s| B[s] * k[s][i]).sum::<f64>()).collect();
    let err: Vec<f64> = (0..n).map(|i| h * (0..7).map(|s| E[s] * k[s][i]).sum::<f64>()).collect();
    (next, err)
}

/// Adaptive integration over `[0, span]`; returns the final state and the
/// accepted step sizes.
fn integrate_adaptive(f: &Compiled, y0: &[f64], span: f64, cfg: &OracleConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut y = y0.to_vec();
    let mut t = 0.0;
    let mut h = (span / 100.0).min(1e-2);
    let mut mesh = Vec::new();
    let mut tries = 0;
    while t < span {
        tries += 1;
        if tries > cfg.max_steps {
            return Err(Error::Integration { t, msg: "step budget exhausted".into() });
        }
        h = h.min(span - t);
        let (next, err) = dopri_step(f, &y, h);
        let norm = err
            .iter()
            .zip(y.iter().zip(&next))
            .map(|(e, (a, b))| (e / (cfg.atol + cfg.rtol * a.abs().max(b.abs()))).powi(2))
            .sum::<f64>()
            .sqrt()
            / (y.len() as f64).sqrt();
        if !norm.is_finite() || next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Integration { t, msg: "solution blew up".into() });
        }
        if norm <= 1.0 {
            t += h;
            y = next;
            mesh.push(h);
        }
        let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < 1e-14 {
            return Err(Error::Integration { t, msg: "step size underflow".into() });
        }
    }
    Ok((y, mesh))
}

fn integrate_on_mesh(f: &Compiled, y0: &[f64], mesh: &[f64]) -> Result<Vec<f64>> {
    let mut y = y0.to_vec();
    let mut t = 0.0;
    for &h in mesh {
        y = dopri_step(f, &y, h).0;
        t += h;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Integration { t, msg: "perturbed flow blew up".into() });
        }
    }
    Ok(y)
}

/// Central-difference estimate of the `k`-th derivative at 0 from samples
/// `g(j·h)`, `j = −2..=2`.
fn central(k: usize, g: &[f64; 5], h: f64) -> f64 {
    let [m2, m1, z, p1, p2] = *g;
    match k {
        1 => (p1 - m1) / (2.0 * h),
        2 => (p1 - 2.0 * z + m1) / (h * h),
        3 => (p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2.0 * h * h * h),
        _ => unreachable!(),
    }
}

/// Integrates the order-`k` prolongation from `start` with a random
/// perturbation direction per seed, and compares each jet `x^(ℓ)(T)` with
/// Richardson-extrapolated central differences of perturbed base flows run
/// on the same mesh. Residuals are relative to `max(1, |x^(ℓ)|)`.
pub fn numeric_ve_oracle(
    field: &VectorFieldSpec,
    start: &[f64],
    k: usize,
    seeds: &[u64],
    cfg: &OracleConfig,
) -> Result<OracleReport> {
    if !(1..=3).contains(&k) {
        return Err(Error::Input(format!("oracle supports orders 1..=3, got {k}")));
    }
    if start.len() != field.dim() {
        return Err(Error::Dimension(format!("start point has {} entries, field {}", start.len(), field.dim())));
    }
    let jets = prolong(field, k)?;
    let mut eqs: Vec<(JetVar, JetPoly)> = jets.equations().map(|(v, p)| (*v, p.clone())).collect();
    eqs.sort_by_key(|(v, _)| (v.order, v.coord));
    let full = Compiled::new(&eqs, field.indep())?;
    let base_eqs: Vec<(JetVar, JetPoly)> = eqs.iter().filter(|(v, _)| v.order == 0).cloned().collect();
    let base = Compiled::new(&base_eqs, field.indep())?;
    let n = field.dim();
    let slot = |v: JetVar| v.order * n + v.coord;

    let results: Vec<Result<(Vec<f64>, usize)>> = seeds
        .par_iter()
        .map(|&seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let dir: Vec<f64> =
                (0..n).map(|i| if Some(i) == field.indep() { 0.0 } else { rng.gen_range(-1.0..1.0) }).collect();
            let mut y0 = vec![0.0; full.dim];
            for i in 0..n {
                y0[slot(JetVar::new(i, 0))] = start[i];
                y0[slot(JetVar::new(i, 1))] = dir[i];
            }
            let (jet_end, mesh) = integrate_adaptive(&full, &y0, cfg.t_span, cfg)?;
            let flow = |s: f64| -> Result<Vec<f64>> {
                let p: Vec<f64> = (0..n).map(|i| start[i] + s * dir[i]).collect();
                integrate_on_mesh(&base, &p, &mesh)
            };
            let mut worst = vec![0.0f64; k];
            let samples = |h: f64| -> Result<Vec<Vec<f64>>> { (-2..=2).map(|j| flow(j as f64 * h)).collect() };
            let coarse = samples(cfg.eps)?;
            let fine = samples(cfg.eps / 2.0)?;
            for l in 1..=k {
                for i in 0..n {
                    let pick = |s: &Vec<Vec<f64>>| [s[0][i], s[1][i], s[2][i], s[3][i], s[4][i]];
                    let dc = central(l, &pick(&coarse), cfg.eps);
                    let df = central(l, &pick(&fine), cfg.eps / 2.0);
                    let rich = (4.0 * df - dc) / 3.0;
                    let exact = jet_end[slot(JetVar::new(i, l))];
                    let r = (rich - exact).abs() / exact.abs().max(1.0);
                    worst[l - 1] = worst[l - 1].max(r);
                }
            }
            Ok((worst, mesh.len()))
        })
        .collect();

    let mut per_order = vec![0.0f64; k];
    let mut steps = 0;
    for r in results {
        let (w, s) = r?;
        for (a, b) in per_order.iter_mut().zip(w) {
            *a = a.max(b);
        }
        steps = steps.max(s);
    }
    let max_residual = per_order.iter().copied().fold(0.0, f64::max);
    Ok(OracleReport { max_residual, per_order, steps })
}

/// Evaluates a rational curve at `t0` to get an oracle start point.
pub fn curve_point(curve: &[RatFun], t0: f64) -> Result<Vec<f64>> {
    curve
        .iter()
        .map(|c| c.eval_f64(t0).ok_or_else(|| Error::Input("curve must have numeric coefficients".into())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_field_is_its_own_variation() {
        let f = VectorFieldSpec::parse(&["x"], None, &["x"], &[]).unwrap();
        let r = numeric_ve_oracle(&f, &[0.7], 1, &[1, 2, 3], &OracleConfig::default()).unwrap();
        assert!(r.max_residual < 1e-8, "{r:?}");
    }

    #[test]
    fn rotation_field() {
        let f = VectorFieldSpec::parse(&["x", "y", "z"], Some("x"), &["1", "z", "-y"], &[]).unwrap();
        let r = numeric_ve_oracle(&f, &[0.0, 0.0, 0.0], 1, &[7, 8], &OracleConfig::default()).unwrap();
        assert!(r.max_residual < 1e-6, "{r:?}");
    }

    #[test]
    fn painleve_two_third_order() {
        let f = VectorFieldSpec::parse(&["x", "y", "z"], Some("x"), &["1", "z", "x*y + 2*y^3"], &[]).unwrap();
        let start = curve_point(&[RatFun::x(), RatFun::zero(), RatFun::zero()], 0.0).unwrap();
        let r = numeric_ve_oracle(&f, &start, 3, &[11, 12, 13], &OracleConfig::default()).unwrap();
        assert_eq!(r.per_order.len(), 3);
        assert!(r.max_residual < 1e-4, "{r:?}");
    }

    #[test]
    fn blow_up_reports_time() {
        let f = VectorFieldSpec::parse(&["x"], None, &["x^2"], &[]).unwrap();
        let cfg = OracleConfig { t_span: 2.0, ..OracleConfig::default() };
        let err = numeric_ve_oracle(&f, &[1.0], 1, &[1], &cfg).unwrap_err();
        assert!(matches!(err, Error::Integration { .. }), "{err:?}");
    }
}
