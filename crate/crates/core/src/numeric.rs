//! Floating-point check that a reduction is a genuine change of coordinates:
//! integrates the generator flows in x-space and measures how fast the
//! original and reduced potentials agree as the sample point shrinks.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::invariant::InvariantBasis;
use crate::orbit::{Generator, OrbitPoly};
use crate::pipeline::ReductionReport;
use crate::poly::{QPoly, VarSet};
use crate::ratfun::RationalFunction;
use crate::scalar::{rational_from_f64, rational_to_f64, Rational};

/// Fixed integration step.
pub const STEP: f64 = 1e-3;
/// Conditions must exceed this in absolute value at the sample parameters.
pub const CONDITION_FLOOR: f64 = 1e-6;
/// Below this defect at every scale the agreement counts as exact.
pub const EXACT_DEFECT: f64 = 1e-14;
/// Allowed shortfall of the fitted slope.
pub const SLOPE_SLACK: f64 = 0.3;
pub const DEFAULT_SEED: u64 = 42;

/// Sample radii, largest first.
pub fn default_scales() -> Vec<f64> {
    [-1.0, -1.5, -2.0, -2.5, -3.0]
        .iter()
        .map(|e: &f64| 10f64.powf(*e))
        .collect()
}

/// Field operations shared by `f64` and double-double numbers.
pub trait Real:
    Copy
    + Debug
    + Send
    + Sync
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(self) -> f64;
    fn abs(self) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }

    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }

    fn to_f64(self) -> f64 {
        self
    }

    fn abs(self) -> Self {
        f64::abs(self)
    }
}

impl Real for TwoFloat {
    fn from_f64(x: f64) -> Self {
        TwoFloat::from_f64(x)
    }

    fn from_rational(r: &Rational) -> Self {
        let hi = rational_to_f64(r);
        let rest = match rational_from_f64(hi) {
            Some(h) => rational_to_f64(&(r - h)),
            None => 0.0,
        };
        TwoFloat::new_add(hi, rest)
    }

    fn to_f64(self) -> f64 {
        self.hi() + self.lo()
    }

    fn abs(self) -> Self {
        TwoFloat::abs(&self)
    }
}

/// A polynomial with numeric coefficients, ready for evaluation.
#[derive(Debug, Clone)]
struct Compiled<R> {
    terms: Vec<(Vec<u32>, R)>,
}

impl<R: Real> Compiled<R> {
    fn from_q(p: &QPoly) -> Self {
        Self {
            terms: p
                .terms()
                .map(|(m, c)| (m.exps().to_vec(), R::from_rational(c)))
                .collect(),
        }
    }

    fn eval(&self, point: &[R]) -> R {
        let mut sum = R::zero();
        for (exps, c) in &self.terms {
            let mut t = *c;
            for (x, &e) in point.iter().zip(exps) {
                for _ in 0..e {
                    t = t * *x;
                }
            }
            sum = sum + t;
        }
        sum
    }
}

/// Parameter values and the basis against which potentials are evaluated.
#[derive(Debug, Clone)]
pub struct NumericContext {
    basis: InvariantBasis,
    values: BTreeMap<String, f64>,
}

impl NumericContext {
    pub fn new(basis: InvariantBasis, values: BTreeMap<String, f64>) -> Self {
        Self { basis, values }
    }

    pub fn basis(&self) -> &InvariantBasis {
        &self.basis
    }

    pub fn values(&self) -> &BTreeMap<String, f64> {
        &self.values
    }

    /// Exact rational point over `params`; unassigned parameters are zero
    /// and recorded in the second component.
    fn point(&self, params: &VarSet) -> Result<(Vec<Rational>, Vec<usize>)> {
        let mut pt = Vec::with_capacity(params.len());
        let mut missing = Vec::new();
        for (i, name) in params.names().iter().enumerate() {
            match self.values.get(name) {
                Some(&v) => {
                    pt.push(rational_from_f64(v).ok_or_else(|| {
                        Error::UnassignedParameter(format!("{name} (not finite)"))
                    })?)
                }
                None => {
                    missing.push(i);
                    pt.push(Rational::from_integer(0.into()));
                }
            }
        }
        Ok((pt, missing))
    }

    fn coefficient<R: Real>(
        &self,
        c: &RationalFunction,
        pt: &[Rational],
        missing: &[usize],
    ) -> Result<R> {
        if let Some(&i) = missing.iter().find(|&&i| c.involves(&[i])) {
            return Err(Error::UnassignedParameter(c.params().name(i).to_string()));
        }
        Ok(R::from_rational(&c.eval(pt)?))
    }

    fn compile<R: Real>(&self, f: &OrbitPoly) -> Result<Compiled<R>> {
        let (pt, missing) = self.point(f.ctx())?;
        let terms = f
            .terms()
            .map(|(m, c)| Ok((m.exps().to_vec(), self.coefficient(c, &pt, &missing)?)))
            .collect::<Result<_>>()?;
        Ok(Compiled { terms })
    }

    /// Exact value of a parameter polynomial at the assignment.
    pub fn eval_param_poly(&self, p: &QPoly) -> Result<f64> {
        let (pt, missing) = self.point(p.vars())?;
        if let Some(&i) = missing.iter().find(|&&i| p.involves(&[i])) {
            return Err(Error::UnassignedParameter(p.vars().name(i).to_string()));
        }
        Ok(rational_to_f64(&p.eval(&pt)))
    }
}

/// The invariants and their x-gradients, compiled.
struct Invariants<R> {
    values: Vec<Compiled<R>>,
    grads: Vec<Vec<Compiled<R>>>,
}

impl<R: Real> Invariants<R> {
    fn new(basis: &InvariantBasis) -> Self {
        Self {
            values: basis.invariants().iter().map(Compiled::from_q).collect(),
            grads: basis
                .invariants()
                .iter()
                .map(|j| j.gradient().iter().map(Compiled::from_q).collect())
                .collect(),
        }
    }

    fn eval(&self, x: &[R]) -> Vec<R> {
        self.values.iter().map(|j| j.eval(x)).collect()
    }
}

/// A potential on x-space given by a compiled J-polynomial.
struct Potential<R> {
    poly: Compiled<R>,
    partials: Vec<Compiled<R>>,
}

impl<R: Real> Potential<R> {
    fn new(f: &OrbitPoly, ctx: &NumericContext) -> Result<Self> {
        Ok(Self {
            poly: ctx.compile(f)?,
            partials: f
                .gradient()
                .iter()
                .map(|d| ctx.compile(d))
                .collect::<Result<_>>()?,
        })
    }

    fn value(&self, inv: &Invariants<R>, x: &[R]) -> R {
        self.poly.eval(&inv.eval(x))
    }

    /// `grad_x F = sum_a dF/dJ_a grad J_a`.
    fn gradient(&self, inv: &Invariants<R>, x: &[R]) -> Vec<R> {
        let j = inv.eval(x);
        let mut g = vec![R::zero(); x.len()];
        for (a, d) in self.partials.iter().enumerate() {
            let s = d.eval(&j);
            for (gi, dj) in g.iter_mut().zip(&inv.grads[a]) {
                *gi = *gi + s * dj.eval(x);
            }
        }
        g
    }
}

fn check_dims(ctx: &NumericContext, x: usize) -> Result<()> {
    let n = ctx.basis.dim();
    if x != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x,
        });
    }
    Ok(())
}

/// `F(J(x))` at a real point.
pub fn eval_potential(f: &OrbitPoly, ctx: &NumericContext, x: &[f64]) -> Result<f64> {
    check_dims(ctx, x.len())?;
    let inv = Invariants::<TwoFloat>::new(&ctx.basis);
    let pot = Potential::<TwoFloat>::new(f, ctx)?;
    let xs: Vec<TwoFloat> = x.iter().map(|&v| TwoFloat::from_f64(v)).collect();
    Ok(pot.value(&inv, &xs).to_f64())
}

/// Time-one flow of `dx/dt = grad_x H` by classical RK4 with step [`STEP`],
/// integrated on the displacement from the start point.
fn flow<R: Real>(h: &Potential<R>, inv: &Invariants<R>, y: &[R]) -> Result<Vec<R>> {
    let steps = (1.0 / STEP).round() as i64;
    // double-double division is only f64-accurate, so step fractions come from exact rationals
    let frac = |k: i64| R::from_rational(&Rational::new(1.into(), (k * steps).into()));
    let (dt, half, sixth) = (frac(1), frac(2), frac(6));
    let two = R::from_f64(2.0);
    let n = y.len();
    let mut d = vec![R::zero(); n];
    let at =
        |d: &[R], k: &[R], s: R| -> Vec<R> { (0..n).map(|i| y[i] + d[i] + s * k[i]).collect() };
    let zero = vec![R::zero(); n];
    for _ in 0..steps {
        let k1 = h.gradient(inv, &at(&d, &zero, R::zero()));
        let k2 = h.gradient(inv, &at(&d, &k1, half));
        let k3 = h.gradient(inv, &at(&d, &k2, half));
        let k4 = h.gradient(inv, &at(&d, &k3, dt));
        for i in 0..n {
            d[i] = d[i] + sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
        }
        if d.iter().any(|v| !v.to_f64().is_finite()) {
            return Err(Error::FlowOverflow);
        }
    }
    Ok((0..n).map(|i| y[i] + d[i]).collect())
}

/// Time-one gradient flow of `H` starting at `y`.
pub fn flow_map(h: &Generator, ctx: &NumericContext, y: &[f64]) -> Result<Vec<f64>> {
    check_dims(ctx, y.len())?;
    if h.is_zero() {
        return Ok(y.to_vec());
    }
    let inv = Invariants::<TwoFloat>::new(&ctx.basis);
    let pot = Potential::<TwoFloat>::new(h.poly(), ctx)?;
    let ys: Vec<TwoFloat> = y.iter().map(|&v| TwoFloat::from_f64(v)).collect();
    Ok(flow(&pot, &inv, &ys)?
        .into_iter()
        .map(Real::to_f64)
        .collect())
}

/// Outcome of [`verify_reduction`].
#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    /// `(scale, max defect over directions)`, in the order of the scales.
    pub defects: Vec<(f64, f64)>,
    /// Least-squares slope of log defect against log scale (NaN when exact).
    pub slope: f64,
    pub required: f64,
    pub exact: bool,
    pub pass: bool,
    pub seed: u64,
}

/// Random unit vectors in `R^n`.
pub fn directions(n: usize, samples: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    while out.len() < samples {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 0.1 && norm <= 1.0 {
            out.push(v.iter().map(|c| c / norm).collect());
        }
    }
    out
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Checks the parameter assignment against the report's requirements.
pub fn check_assignment(report: &ReductionReport, ctx: &NumericContext) -> Result<()> {
    let params: &Arc<VarSet> = report.original.ctx();
    for name in params.names() {
        if report.critical.contains(name) {
            continue;
        }
        let idx = params.index(name)?;
        let used = report.original.terms().any(|(_, c)| c.involves(&[idx]));
        match ctx.values.get(name) {
            None if used => return Err(Error::UnassignedParameter(name.clone())),
            Some(&0.0) => return Err(Error::ZeroGenericParameter(name.clone())),
            _ => {}
        }
    }
    for c in &report.conditions {
        let value = ctx.eval_param_poly(c.poly())?;
        if value.abs() <= CONDITION_FLOOR {
            return Err(Error::ResonanceViolated {
                condition: c.render(),
                value,
            });
        }
    }
    Ok(())
}

/// Measures `|F_0(phi(eps*u)) - F_k(eps*u)|` where `phi` composes the stage
/// flows (last stage first) and fits its decay rate in `eps`.
pub fn verify_reduction(
    report: &ReductionReport,
    ctx: &NumericContext,
    samples: usize,
    scales: &[f64],
    seed: u64,
) -> Result<Verification> {
    check_assignment(report, ctx)?;
    let inv = Invariants::<TwoFloat>::new(&ctx.basis);
    let original = Potential::<TwoFloat>::new(&report.original, ctx)?;
    let reduced = Potential::<TwoFloat>::new(&report.reduced, ctx)?;
    let flows: Vec<Potential<TwoFloat>> = report
        .generators()
        .iter()
        .map(|g| Potential::new(g.poly(), ctx))
        .collect::<Result<_>>()?;
    let dirs = directions(ctx.basis.dim(), samples, seed);

    let mut defects = Vec::with_capacity(scales.len());
    for &eps in scales {
        let per_dir: Vec<f64> = dirs
            .par_iter()
            .map(|u| {
                let y: Vec<TwoFloat> = u.iter().map(|&c| TwoFloat::from_f64(c * eps)).collect();
                let mut x = y.clone();
                for h in flows.iter().rev() {
                    x = flow(h, &inv, &x)?;
                }
                let d = original.value(&inv, &x) - reduced.value(&inv, &y);
                Ok(d.abs().to_f64())
            })
            .collect::<Result<_>>()?;
        defects.push((eps, per_dir.into_iter().fold(0.0, f64::max)));
    }

    let required = f64::from(report.truncation) + 1.0 - SLOPE_SLACK;
    let exact = defects.iter().all(|&(_, d)| d < EXACT_DEFECT);
    let xs: Vec<f64> = defects.iter().map(|(e, _)| e.ln()).collect();
    let ys: Vec<f64> = defects
        .iter()
        .map(|(_, d)| d.max(f64::MIN_POSITIVE).ln())
        .collect();
    let slope = if exact || defects.len() < 2 {
        f64::NAN
    } else {
        fit_slope(&xs, &ys)
    };
    let pass = exact || slope >= required;
    Ok(Verification {
        defects,
        slope,
        required,
        exact,
        pass,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_power_law() {
        let xs: Vec<f64> = [1e-1f64, 1e-2, 1e-3].iter().map(|e| e.ln()).collect();
        let ys: Vec<f64> = [1e-1f64, 1e-2, 1e-3]
            .iter()
            .map(|e| (3.0 * e.powi(5)).ln())
            .collect();
        assert!((fit_slope(&xs, &ys) - 5.0).abs() < 1e-9);
    }

    #[test]
    fn double_double_keeps_the_rational_tail() {
        let third = Rational::new(1.into(), 3.into());
        let t = <TwoFloat as Real>::from_rational(&third);
        let back = t * TwoFloat::from_f64(3.0) - TwoFloat::from_f64(1.0);
        assert!(back.to_f64().abs() < 1e-30);
    }

    #[test]
    fn directions_are_unit_and_reproducible() {
        let a = directions(3, 10, 7);
        assert_eq!(a, directions(3, 10, 7));
        for u in &a {
            let n: f64 = u.iter().map(|c| c * c).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }
}
