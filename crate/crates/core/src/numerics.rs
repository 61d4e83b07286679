//! Scalar search kernel: golden-section extremum search, bisection root
//! finding and an exhaustive grid scan used as a brute-force reference.
//!
//! Brackets spanning three decades or more (with a positive lower end) are
//! searched in log scale, so the tolerance stays relative across the range.

use crate::error::{invalid, Error, Result};

/// Default relative tolerance for extremum searches.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Ratio `hi / lo` at which a bracket is searched in log scale.
pub const LOG_SCALE_SPAN: f64 = 1e3;

const MAX_ITERATIONS: usize = 300;

// 1 / golden ratio
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Closed search interval `[lo, hi]` with a relative tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBracket {
    lo: f64,
    hi: f64,
    tolerance: f64,
}

impl SearchBracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        Self::with_tolerance(lo, hi, DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(lo: f64, hi: f64, tolerance: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(invalid(format!(
                "bracket bounds must be finite, got [{lo}, {hi}]"
            )));
        }
        if lo >= hi {
            return Err(invalid(format!(
                "bracket requires lo < hi, got [{lo}, {hi}]"
            )));
        }
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(invalid(format!(
                "tolerance must be positive, got {tolerance}"
            )));
        }
        Ok(Self { lo, hi, tolerance })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// True when the search runs over `ln x` instead of `x`.
    pub fn is_log_scale(&self) -> bool {
        self.lo > 0.0 && self.hi / self.lo >= LOG_SCALE_SPAN
    }
}

/// Location and value of an extremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub x: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Goal {
    Maximize,
    Minimize,
}

impl Goal {
    fn better(self, candidate: f64, incumbent: f64) -> bool {
        match self {
            Goal::Maximize => candidate > incumbent,
            Goal::Minimize => candidate < incumbent,
        }
    }
}

fn evaluate<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteEvaluation { x })
    }
}

/// Maximizes a function assumed unimodal on the bracket.
pub fn maximize_unimodal<F: Fn(f64) -> f64>(f: F, bracket: &SearchBracket) -> Result<Extremum> {
    golden_section(&f, bracket, Goal::Maximize)
}

/// Minimizes a function assumed unimodal on the bracket.
pub fn minimize_unimodal<F: Fn(f64) -> f64>(f: F, bracket: &SearchBracket) -> Result<Extremum> {
    golden_section(&f, bracket, Goal::Minimize)
}

fn golden_section<F: Fn(f64) -> f64>(
    f: &F,
    bracket: &SearchBracket,
    goal: Goal,
) -> Result<Extremum> {
    let log = bracket.is_log_scale();
    let (lo, hi) = (bracket.lo, bracket.hi);
    let to_x = |u: f64| {
        let x = if log { u.exp() } else { u };
        x.clamp(lo, hi)
    };
    let (mut a, mut b) = if log { (lo.ln(), hi.ln()) } else { (lo, hi) };
    let converged = |a: f64, b: f64| {
        if log {
            b - a <= bracket.tolerance
        } else {
            b - a <= bracket.tolerance * a.abs().max(b.abs())
        }
    };

    let mut c = b - (b - a) * INV_PHI;
    let mut d = a + (b - a) * INV_PHI;
    let mut fc = evaluate(f, to_x(c))?;
    let mut fd = evaluate(f, to_x(d))?;

    for _ in 0..MAX_ITERATIONS {
        if converged(a, b) {
            break;
        }
        if goal.better(fc, fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * INV_PHI;
            fc = evaluate(f, to_x(c))?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * INV_PHI;
            fd = evaluate(f, to_x(d))?;
        }
    }

    let x_mid = to_x(0.5 * (a + b));
    let mut best = Extremum {
        x: x_mid,
        value: evaluate(f, x_mid)?,
    };
    // boundary optimum of a monotone profile
    for x in [lo, hi] {
        let v = evaluate(f, x)?;
        if goal.better(v, best.value) {
            best = Extremum { x, value: v };
        }
    }
    Ok(best)
}

/// Exhaustive scan over `n_points` uniformly spaced samples of the bracket.
///
/// Ties resolve toward the smaller `x`. Intended as an independent
/// reference for the golden-section search.
pub fn grid_extremum_oracle<F: Fn(f64) -> f64>(
    f: F,
    bracket: &SearchBracket,
    n_points: usize,
    goal: Goal,
) -> Result<Extremum> {
    if n_points < 2 {
        return Err(invalid(format!(
            "grid needs at least 2 points, got {n_points}"
        )));
    }
    let span = bracket.hi - bracket.lo;
    let last = (n_points - 1) as f64;
    let mut best: Option<Extremum> = None;
    for i in 0..n_points {
        let x = if i + 1 == n_points {
            bracket.hi
        } else {
            bracket.lo + span * (i as f64 / last)
        };
        let v = evaluate(&f, x)?;
        match best {
            Some(b) if !goal.better(v, b.value) => {}
            _ => best = Some(Extremum { x, value: v }),
        }
    }
    Ok(best.expect("n_points >= 2"))
}

/// Bisection root finder on `[lo, hi]`; requires a sign change.
pub fn bisect_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, rel_tol: f64) -> Result<f64> {
    if !(lo < hi) {
        return Err(invalid(format!(
            "root bracket requires lo < hi, got [{lo}, {hi}]"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    let mut fa = evaluate(&f, a)?;
    let fb = evaluate(&f, b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(invalid(format!(
            "no sign change on [{lo}, {hi}]: f(lo) = {fa}, f(hi) = {fb}"
        )));
    }
    for _ in 0..MAX_ITERATIONS {
        let m = 0.5 * (a + b);
        if b - a <= rel_tol * a.abs().max(b.abs()) || m <= a || m >= b {
            break;
        }
        let fm = evaluate(&f, m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn bracket_validation() {
        assert!(SearchBracket::new(1.0, 1.0).is_err());
        assert!(SearchBracket::new(2.0, 1.0).is_err());
        assert!(SearchBracket::with_tolerance(0.0, 1.0, 0.0).is_err());
        assert!(SearchBracket::new(f64::NAN, 1.0).is_err());
        assert!(SearchBracket::new(0.01, 10.0).unwrap().is_log_scale());
        assert!(!SearchBracket::new(0.1, 10.0).unwrap().is_log_scale());
        assert!(!SearchBracket::new(-1.0, 1e6).unwrap().is_log_scale());
    }

    #[test]
    fn maximize_x_times_half_power_x() {
        let b = SearchBracket::with_tolerance(0.01, 10.0, 1e-8).unwrap();
        let e = maximize_unimodal(|x| x * (-x * std::f64::consts::LN_2).exp(), &b).unwrap();
        assert!(close(e.x, 1.0 / std::f64::consts::LN_2, 1e-6), "{e:?}");
        assert!(close(e.value, 0.530_737_845_423_043, 1e-12), "{e:?}");
    }

    #[test]
    fn maximize_parabola() {
        let b = SearchBracket::new(0.0, 10.0).unwrap();
        let e = maximize_unimodal(|x| -(x - 3.0) * (x - 3.0), &b).unwrap();
        assert!((e.x - 3.0).abs() < 1e-7);
        assert!(e.value.abs() < 1e-14);
    }

    #[test]
    fn maximize_constant() {
        let b = SearchBracket::new(0.0, 1.0).unwrap();
        let e = maximize_unimodal(|_| 5.0, &b).unwrap();
        assert!((0.0..=1.0).contains(&e.x));
        assert_eq!(e.value, 5.0);
    }

    #[test]
    fn minimize_examples() {
        let b = SearchBracket::new(0.1, 10.0).unwrap();
        let e = minimize_unimodal(|x: f64| x.exp2() / x, &b).unwrap();
        assert!(close(e.x, 1.0 / std::f64::consts::LN_2, 1e-6));
        assert!(close(
            e.value,
            std::f64::consts::E * std::f64::consts::LN_2,
            1e-12
        ));

        let b = SearchBracket::new(-10.0, 10.0).unwrap();
        let e = minimize_unimodal(|x| (x - 2.0) * (x - 2.0) + 1.0, &b).unwrap();
        assert!((e.x - 2.0).abs() < 1e-7);
        assert!(close(e.value, 1.0, 1e-14));

        let b = SearchBracket::new(1.0, 2.0).unwrap();
        let e = minimize_unimodal(|x| x, &b).unwrap();
        assert_eq!((e.x, e.value), (1.0, 1.0));
    }

    #[test]
    fn non_finite_objective_reports_x() {
        let b = SearchBracket::new(0.0, 1.0).unwrap();
        match maximize_unimodal(|x| if x > 0.5 { f64::NAN } else { x }, &b) {
            Err(Error::NonFiniteEvaluation { x }) => assert!(x > 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn grid_oracle_cases() {
        let b = SearchBracket::new(0.0, 2.0).unwrap();
        let e = grid_extremum_oracle(|x: f64| -(x - 1.0).abs(), &b, 3, Goal::Maximize).unwrap();
        assert_eq!(e.x, 1.0);
        assert!(grid_extremum_oracle(|x| x, &b, 1, Goal::Maximize).is_err());

        // ties go to the smaller x
        let e = grid_extremum_oracle(|_| 1.0, &b, 5, Goal::Minimize).unwrap();
        assert_eq!(e.x, 0.0);

        let b = SearchBracket::new(0.01, 10.0).unwrap();
        let e = grid_extremum_oracle(
            |x| x * (-x * std::f64::consts::LN_2).exp(),
            &b,
            1_000_000,
            Goal::Maximize,
        )
        .unwrap();
        assert!((e.x - std::f64::consts::LOG2_E).abs() < 1e-5);
    }

    #[test]
    fn golden_agrees_with_grid() {
        let fs: Vec<Box<dyn Fn(f64) -> f64>> = vec![
            Box::new(|x| x * (-x * std::f64::consts::LN_2).exp()),
            Box::new(|x| -(x - 3.0) * (x - 3.0)),
            Box::new(|x: f64| x.ln() - x / 4.0),
        ];
        let b = SearchBracket::new(0.5, 10.0).unwrap();
        for f in &fs {
            let g = maximize_unimodal(f, &b).unwrap();
            let o = grid_extremum_oracle(f, &b, 100_000, Goal::Maximize).unwrap();
            let spacing = (b.hi() - b.lo()) / 99_999.0;
            assert!((g.x - o.x).abs() <= spacing, "{g:?} vs {o:?}");
            assert!(g.value >= o.value);
        }
    }

    #[test]
    fn evaluation_count_is_logarithmic() {
        use std::cell::Cell;
        let calls = Cell::new(0usize);
        let b = SearchBracket::with_tolerance(0.0, 10.0, 1e-9).unwrap();
        maximize_unimodal(
            |x| {
                calls.set(calls.get() + 1);
                -(x - 3.0) * (x - 3.0)
            },
            &b,
        )
        .unwrap();
        // log(1e-9 * 3 / 10) / log(0.618) ≈ 46
        assert!(calls.get() < 60, "{} evaluations", calls.get());
    }

    #[test]
    fn repeated_runs_are_bit_identical() {
        let b = SearchBracket::new(0.01, 10.0).unwrap();
        let f = |x: f64| x * (-x * std::f64::consts::LN_2).exp();
        let first = maximize_unimodal(f, &b).unwrap();
        for _ in 0..10 {
            let again = maximize_unimodal(f, &b).unwrap();
            assert_eq!(first.x.to_bits(), again.x.to_bits());
            assert_eq!(first.value.to_bits(), again.value.to_bits());
        }
    }

    #[test]
    fn bisection() {
        let r = bisect_root(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!(close(r, std::f64::consts::SQRT_2, 1e-13));
        assert!(bisect_root(|x| x * x + 1.0, 0.0, 2.0, 1e-12).is_err());
        assert_eq!(bisect_root(|x| x, 0.0, 1.0, 1e-12).unwrap(), 0.0);
    }
}
