//! Shared numerical kernels: bracketed root finding, log-gamma, and
//! inversion of 2x2 observed-information matrices.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{domain, Error, Result};

pub const DEFAULT_TOL_REL: f64 = 1e-10;

const MAX_ITER: usize = 500;

/// Search interval for [`find_root_bracketed`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub tol_rel: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        Self::with_tolerance(lo, hi, DEFAULT_TOL_REL)
    }

    pub fn with_tolerance(lo: f64, hi: f64, tol_rel: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(domain(format!(
                "bracket requires finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        if !(tol_rel.is_finite() && tol_rel > 0.0) {
            return Err(domain(format!("tol_rel must be > 0, got {tol_rel}")));
        }
        Ok(Self { lo, hi, tol_rel })
    }
}

fn eval<F: FnMut(f64) -> f64>(f: &mut F, x: f64) -> Result<f64> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::NonFinite { x })
    }
}

/// Finds a root of `f` inside `bracket` by Brent's method: inverse quadratic
/// or secant steps, each guarded by a bisection fallback, so the iterate
/// never leaves the current sign-change interval.
///
/// Terminates once the enclosing interval is narrower than
/// `tol_rel * |x|` (plus a few ulps) or `f` vanishes exactly.
pub fn find_root_bracketed<F>(mut f: F, bracket: Bracket) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let Bracket { lo, hi, tol_rel } = bracket;
    let mut a = lo;
    let mut b = hi;
    let mut fa = eval(&mut f, a)?;
    let mut fb = eval(&mut f, b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol_rel * b.abs() + f64::MIN_POSITIVE;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }

        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                // secant
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                // inverse quadratic interpolation
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = eval(&mut f, b)?;
    }
    Ok(b)
}

/// Grows `hi` by doubling until `f(hi)` has the sign opposite to `f(lo)`.
/// Returns the first such `hi`, or `None` after `max_doublings` attempts.
pub fn expand_upper<F>(
    mut f: F,
    lo: f64,
    start_hi: f64,
    max_doublings: usize,
) -> Result<Option<f64>>
where
    F: FnMut(f64) -> f64,
{
    let f_lo = eval(&mut f, lo)?;
    let mut hi = start_hi;
    for _ in 0..=max_doublings {
        let f_hi = f(hi);
        if !f_hi.is_finite() {
            return Err(Error::NonFinite { x: hi });
        }
        if f_hi == 0.0 || f_hi.signum() != f_lo.signum() {
            return Ok(Some(hi));
        }
        hi *= 2.0;
    }
    Ok(None)
}

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Natural logarithm of the gamma function for `x > 0`.
///
/// Lanczos approximation (g = 7, 9 terms) for `x >= 0.5`; smaller
/// arguments are lifted with `ln Γ(x) = ln Γ(x + 1) - ln x`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(domain(format!("log_gamma requires x > 0, got {x}")));
    }
    if x < 0.5 {
        return Ok(lanczos_ln_gamma(x + 1.0) - x.ln());
    }
    Ok(lanczos_ln_gamma(x))
}

fn lanczos_ln_gamma(x: f64) -> f64 {
    // exact at the integers near the zeros of ln Γ
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    let z = x - 1.0;
    let mut sum = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + sum.ln()
}

/// Symmetric 2x2 observed-information matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Info2x2 {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

impl Info2x2 {
    pub fn new(a11: f64, a12: f64, a22: f64) -> Result<Self> {
        if !(a11.is_finite() && a12.is_finite() && a22.is_finite()) {
            return Err(domain("information entries must be finite"));
        }
        if a11 <= 0.0 || a22 <= 0.0 {
            return Err(domain(format!(
                "information diagonal must be positive, got ({a11}, {a22})"
            )));
        }
        Ok(Self { a11, a12, a22 })
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a12
    }

    /// Off-diagonal normalized by the diagonal, `a12 / sqrt(a11 a22)`.
    pub fn normalized_coupling(&self) -> f64 {
        self.a12 / (self.a11 * self.a22).sqrt()
    }
}

/// Inverse of an [`Info2x2`]: the asymptotic covariance of the two estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Covariance2 {
    pub var1: f64,
    pub var2: f64,
    pub cov: f64,
}

impl Covariance2 {
    pub fn correlation(&self) -> f64 {
        self.cov / (self.var1 * self.var2).sqrt()
    }
}

/// Relative determinant floor below which the information is treated as
/// rank-deficient.
const SINGULAR_REL: f64 = 1e-12;

pub fn invert_information(info: &Info2x2) -> Result<Covariance2> {
    let det = info.det();
    if !(det > SINGULAR_REL * info.a11 * info.a22) {
        return Err(Error::SingularInformation { det });
    }
    Ok(Covariance2 {
        var1: info.a22 / det,
        var2: info.a11 / det,
        cov: -info.a12 / det,
    })
}

/// Two-sided standard normal quantile for a confidence `level` in (0, 1).
pub fn two_sided_z(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(domain(format!(
            "confidence level must lie in (0, 1), got {level}"
        )));
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(normal.inverse_cdf(0.5 + 0.5 * level))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bisect_oracle(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let flo = f(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (flo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn quadratic_root() {
        let x = find_root_bracketed(|x| x * x - 4.0, Bracket::new(0.0, 3.0).unwrap()).unwrap();
        assert!((x - 2.0).abs() < 1e-9);
    }

    #[test]
    fn log_root() {
        let x = find_root_bracketed(f64::ln, Bracket::new(0.5, 2.0).unwrap()).unwrap();
        assert!((x - 1.0).abs() < 1e-9);
    }

    #[test]
    fn module_stationarity_root_matches_bisection() {
        let f = |t: f64| 2.0 * 0.001 * t * t * (0.001 * t).exp() - 1.0;
        let oracle = bisect_oracle(f, 1.0, 100.0);
        let x = find_root_bracketed(f, Bracket::new(1.0, 100.0).unwrap()).unwrap();
        assert!((x - oracle).abs() < 1e-8 * oracle);
        assert!((x - 22.11).abs() < 0.01);
    }

    #[test]
    fn root_errors() {
        let err = find_root_bracketed(|x| x * x + 1.0, Bracket::new(-1.0, 1.0).unwrap());
        assert!(matches!(err, Err(Error::NoSignChange { .. })));
        let err = find_root_bracketed(|x| 1.0 / x, Bracket::new(-1.0, 1.0).unwrap());
        assert!(matches!(err, Err(Error::NonFinite { .. })));
        assert!(Bracket::new(2.0, 1.0).is_err());
        assert!(Bracket::with_tolerance(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn exact_endpoint_root() {
        let x = find_root_bracketed(|x| x - 1.0, Bracket::new(1.0, 3.0).unwrap()).unwrap();
        assert_eq!(x, 1.0);
    }

    #[test]
    fn expand_upper_finds_sign_change() {
        let hi = expand_upper(|x| x - 1000.0, 0.0, 1.0, 60).unwrap();
        assert_eq!(hi, Some(1024.0));
        assert_eq!(expand_upper(|_| 1.0, 0.0, 1.0, 5).unwrap(), None);
    }

    #[test]
    fn log_gamma_known_values() {
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert!((log_gamma(5.0).unwrap() - 24f64.ln()).abs() < 1e-13);
        let half = (std::f64::consts::PI.sqrt() / 2.0).ln();
        assert!((log_gamma(1.5).unwrap() - half).abs() < 1e-13);
        assert!((log_gamma(0.5).unwrap() - std::f64::consts::PI.sqrt().ln()).abs() < 1e-13);
        // Γ(41) = 40!
        let ln_fact_40: f64 = (1..=40).map(|k| (k as f64).ln()).sum();
        assert!((log_gamma(41.0).unwrap() - ln_fact_40).abs() < 1e-12 * ln_fact_40);
    }

    #[test]
    fn log_gamma_small_arguments_use_recurrence() {
        let x: f64 = 0.1;
        let lifted = log_gamma(1.1).unwrap() - x.ln();
        assert_eq!(log_gamma(x).unwrap(), lifted);
    }

    #[test]
    fn log_gamma_domain() {
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
        assert!(log_gamma(f64::NAN).is_err());
    }

    #[test]
    fn log_gamma_recurrence_on_grid() {
        for i in 0..=390 {
            let x = 0.5 + i as f64 * 0.05;
            let lhs = log_gamma(x + 1.0).unwrap() - log_gamma(x).unwrap() - x.ln();
            assert!(lhs.abs() <= 1e-12, "x = {x}: {lhs}");
        }
    }

    #[test]
    fn inversion_examples() {
        let c = invert_information(&Info2x2::new(1.0, 0.0, 1.0).unwrap()).unwrap();
        assert_eq!((c.var1, c.var2, c.cov), (1.0, 1.0, 0.0));
        let c = invert_information(&Info2x2::new(4.0, 0.0, 1.0).unwrap()).unwrap();
        assert_eq!((c.var1, c.var2, c.cov), (0.25, 1.0, 0.0));
        let err = invert_information(&Info2x2::new(1.0, 1.0, 1.0).unwrap());
        assert!(matches!(err, Err(Error::SingularInformation { .. })));
    }

    #[test]
    fn inversion_matches_schur_complement() {
        let info = Info2x2::new(1280.0, 2.6, 0.0055625).unwrap();
        let c = invert_information(&info).unwrap();
        let schur1 = 1.0 / (info.a11 - info.a12 * info.a12 / info.a22);
        let schur2 = 1.0 / (info.a22 - info.a12 * info.a12 / info.a11);
        assert!((c.var1 - schur1).abs() < 1e-12 * schur1);
        assert!((c.var2 - schur2).abs() < 1e-9 * schur2);
    }

    #[test]
    fn z_quantiles() {
        assert!((two_sided_z(0.95).unwrap() - 1.959_963_984_540_054).abs() < 1e-9);
        assert!(two_sided_z(1.0).is_err());
    }
}
