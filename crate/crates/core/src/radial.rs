//! Radial reduction on balls.
//!
//! For `u(x) = v(|x|)` the Hessian has the eigenvalue `v''` once and `v'/r`
//! with multiplicity `N - 1`, so the equation becomes the ODE
//!
//! ```text
//! |v'|^alpha ( w(v'') v'' + (N - 1) w(v') v'/r ) = -f(v)
//! ```
//!
//! where `w(t)` is `a` or `A` depending on the sign of `t` and the variant.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::pucci::{PucciParams, Variant};

/// Zeroth-order term `f(u)` of `|Du|^alpha M(D^2 u) + f(u) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceSpec {
    /// `f(u) = k`.
    Constant { k: f64 },
    /// `f(u) = lambda |u|^alpha u`.
    EigenPower { lambda: f64 },
    /// `f(u) = lambda |u|^alpha u - mu |u|^(beta - 1) u`.
    PowerPair { lambda: f64, mu: f64, beta: f64 },
    /// `f(u) = k - slope * u`; nonincreasing when `slope >= 0`.
    Affine { k: f64, slope: f64 },
}

/// Structural hypotheses under which comparison holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SourceCase {
    /// `f` nonincreasing.
    Nonincreasing,
    /// `f = h - g` with `h` (1+alpha)-sublinear and `g` beta-superlinear.
    PowerSplit,
}

impl SourceSpec {
    pub fn validate(&self, alpha: f64) -> Result<()> {
        let finite = match *self {
            SourceSpec::Constant { k } => k.is_finite(),
            SourceSpec::EigenPower { lambda } => lambda.is_finite(),
            SourceSpec::PowerPair { lambda, mu, beta } => {
                if !(beta > 1.0 + alpha) || mu < 0.0 {
                    return Err(LabError::InvalidParams(format!(
                        "power pair needs beta > 1 + alpha and mu >= 0 (beta = {beta}, mu = {mu})"
                    )));
                }
                lambda.is_finite() && mu.is_finite() && beta.is_finite()
            }
            SourceSpec::Affine { k, slope } => k.is_finite() && slope.is_finite(),
        };
        if finite {
            Ok(())
        } else {
            Err(LabError::InvalidParams("non-finite source parameter".into()))
        }
    }

    pub fn eval(&self, u: f64, alpha: f64) -> f64 {
        match *self {
            SourceSpec::Constant { k } => k,
            SourceSpec::EigenPower { lambda } => lambda * signed_power(u, 1.0 + alpha),
            SourceSpec::PowerPair { lambda, mu, beta } => {
                lambda * signed_power(u, 1.0 + alpha) - mu * signed_power(u, beta)
            }
            SourceSpec::Affine { k, slope } => k - slope * u,
        }
    }

    /// `f'(u)`.
    pub fn derivative(&self, u: f64, alpha: f64) -> f64 {
        match *self {
            SourceSpec::Constant { .. } => 0.0,
            SourceSpec::EigenPower { lambda } => lambda * (1.0 + alpha) * u.abs().powf(alpha),
            SourceSpec::PowerPair { lambda, mu, beta } => {
                lambda * (1.0 + alpha) * u.abs().powf(alpha) - mu * beta * u.abs().powf(beta - 1.0)
            }
            SourceSpec::Affine { slope, .. } => -slope,
        }
    }

    /// Which comparison hypothesis the source satisfies, if any.
    pub fn case(&self, alpha: f64) -> Option<SourceCase> {
        match *self {
            SourceSpec::Constant { .. } => Some(SourceCase::Nonincreasing),
            SourceSpec::Affine { slope, .. } if slope >= 0.0 => Some(SourceCase::Nonincreasing),
            SourceSpec::Affine { .. } => None,
            SourceSpec::EigenPower { lambda } if lambda <= 0.0 => Some(SourceCase::Nonincreasing),
            SourceSpec::EigenPower { .. } => Some(SourceCase::PowerSplit),
            SourceSpec::PowerPair { lambda, mu, beta } => {
                if beta > 1.0 + alpha && mu >= 0.0 && lambda >= 0.0 {
                    Some(SourceCase::PowerSplit)
                } else {
                    None
                }
            }
        }
    }
}

#[inline]
fn signed_power(u: f64, e: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        u.signum() * u.abs().powf(e)
    }
}

/// Sampled radial profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub radii: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub first_zero: Option<f64>,
}

impl RadialProfile {
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// Linear interpolation of `(u, u')` at `r`.
    pub fn sample(&self, r: f64) -> Result<(f64, f64)> {
        let lo = self.radii[0];
        let hi = *self.radii.last().unwrap();
        if !(r >= lo && r <= hi) {
            return Err(LabError::OutOfDomain { value: r, lo, hi });
        }
        let k = match self.radii.partition_point(|&x| x <= r) {
            0 => 0,
            k if k >= self.len() => self.len() - 2,
            k => k - 1,
        };
        let (r0, r1) = (self.radii[k], self.radii[k + 1]);
        let t = if r1 > r0 { (r - r0) / (r1 - r0) } else { 0.0 };
        Ok((
            self.u[k] + t * (self.u[k + 1] - self.u[k]),
            self.du[k] + t * (self.du[k + 1] - self.du[k]),
        ))
    }

    /// True when `u' < 0` and `u'` is nonincreasing up to the first zero,
    /// i.e. both Hessian eigenvalues are negative along the profile.
    pub fn concave_decreasing(&self) -> bool {
        let end = self.first_zero.unwrap_or(f64::INFINITY);
        let mut prev: Option<f64> = None;
        for (r, du) in self.radii.iter().zip(&self.du) {
            if *r == 0.0 {
                continue;
            }
            if *r > end {
                break;
            }
            if *du >= 0.0 {
                return false;
            }
            if let Some(p) = prev {
                if *du > p {
                    return false;
                }
            }
            prev = Some(*du);
        }
        true
    }
}

fn check_dimension(n: usize) -> Result<()> {
    if n < 1 {
        Err(LabError::InvalidParams("dimension must be at least 1".into()))
    } else {
        Ok(())
    }
}

fn require_plus(p: &PucciParams) -> Result<()> {
    p.validate()?;
    if p.variant != Variant::Plus {
        return Err(LabError::InvalidParams(
            "the closed form is written for the Plus variant".into(),
        ));
    }
    Ok(())
}

/// `(1+alpha) / (a ((N-1)(1+alpha) + 1))`.
fn closed_form_constant_k(p: &PucciParams, n: usize) -> f64 {
    let e = 1.0 + p.alpha;
    e / (p.a * ((n as f64 - 1.0) * e + 1.0))
}

/// Positive solution of `|Du|^alpha M+(D^2 u) + 1 = 0` on `B(0, R)` with zero
/// boundary data, evaluated at radius `r`.
pub fn closed_form_constant(p: &PucciParams, n: usize, radius: f64, r: f64) -> Result<f64> {
    require_plus(p)?;
    check_dimension(n)?;
    if !(0.0..=radius).contains(&r) {
        return Err(LabError::OutOfDomain {
            value: r,
            lo: 0.0,
            hi: radius,
        });
    }
    let e = 1.0 + p.alpha;
    let q = (2.0 + p.alpha) / e;
    Ok(e / (2.0 + p.alpha)
        * closed_form_constant_k(p, n).powf(1.0 / e)
        * (radius.powf(q) - r.powf(q)))
}

/// Radial derivative of [`closed_form_constant`].
pub fn closed_form_slope(p: &PucciParams, n: usize, r: f64) -> Result<f64> {
    require_plus(p)?;
    check_dimension(n)?;
    let e = 1.0 + p.alpha;
    Ok(-(closed_form_constant_k(p, n) * r).powf(1.0 / e))
}

/// Neumann constant `c` of the closed-form solution on a ball of radius `R`.
pub fn neumann_for_radius(p: &PucciParams, n: usize, radius: f64) -> Result<f64> {
    if radius <= 0.0 {
        return Err(LabError::InvalidParams(format!("radius must be positive, got {radius}")));
    }
    closed_form_slope(p, n, radius)
}

/// Radius of the ball carrying the overdetermined solution with Neumann data `c`.
pub fn overdetermined_radius(p: &PucciParams, n: usize, c: f64) -> Result<f64> {
    require_plus(p)?;
    check_dimension(n)?;
    if !(c < 0.0) {
        return Err(LabError::InvalidNeumannData(c));
    }
    Ok(c.abs().powf(1.0 + p.alpha) / closed_form_constant_k(p, n))
}

/// `u''` from the radial equation at `(r, u, u')`.
fn second_derivative(
    p: &PucciParams,
    n: usize,
    f: &SourceSpec,
    r: f64,
    u: f64,
    du: f64,
) -> Result<f64> {
    let fu = f.eval(u, p.alpha);
    let forcing = if fu == 0.0 {
        0.0
    } else if p.alpha == 0.0 {
        fu
    } else if du == 0.0 {
        if p.alpha > 0.0 {
            return Err(LabError::SignBranchFailure { r, u, du, rhs: f64::INFINITY });
        }
        0.0
    } else {
        fu * du.abs().powf(-p.alpha)
    };
    let rhs = -forcing - (n as f64 - 1.0) * p.scalar(du) / r;
    if !rhs.is_finite() {
        return Err(LabError::SignBranchFailure { r, u, du, rhs });
    }
    // Keep the candidate whose sign selects the coefficient it was divided by.
    let mut chosen = None;
    for k in [p.a, p.big_a] {
        let candidate = rhs / k;
        if candidate == 0.0 || p.weight(candidate) == k {
            chosen = Some(candidate);
            break;
        }
    }
    chosen.ok_or(LabError::SignBranchFailure { r, u, du, rhs })
}

fn rk4_step(
    p: &PucciParams,
    n: usize,
    f: &SourceSpec,
    r: f64,
    (u, du): (f64, f64),
    h: f64,
) -> Result<(f64, f64)> {
    let k1u = du;
    let k1v = second_derivative(p, n, f, r, u, du)?;
    let k2u = du + 0.5 * h * k1v;
    let k2v = second_derivative(p, n, f, r + 0.5 * h, u + 0.5 * h * k1u, k2u)?;
    let k3u = du + 0.5 * h * k2v;
    let k3v = second_derivative(p, n, f, r + 0.5 * h, u + 0.5 * h * k2u, k3u)?;
    let k4u = du + h * k3v;
    let k4v = second_derivative(p, n, f, r + h, u + h * k3u, k4u)?;
    Ok((
        u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
        du + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
    ))
}

/// Integrates the radial equation outward from the center value `m`.
///
/// The first step starts at `r0 = 10 h` from the local model
/// `u'(r) = -(f(m)(1+alpha) r / (k((N-1)(1+alpha)+1)))^(1/(1+alpha))`, which is
/// exact for constant sources. Integration stops at the step containing the
/// first zero (located by bisection on the step length) or at `r_max`.
pub fn shoot(
    p: &PucciParams,
    n: usize,
    f: &SourceSpec,
    m: f64,
    r_max: f64,
    h: f64,
) -> Result<RadialProfile> {
    p.validate()?;
    f.validate(p.alpha)?;
    check_dimension(n)?;
    if !(m > 0.0 && m.is_finite()) {
        return Err(LabError::InvalidParams(format!("center value must be positive, got {m}")));
    }
    if !(h > 0.0) {
        return Err(LabError::InvalidParams(format!("step must be positive, got {h}")));
    }
    let r0 = 10.0 * h;
    if r0 >= r_max {
        return Err(LabError::InvalidParams(format!(
            "r_max = {r_max} must exceed the startup radius {r0}"
        )));
    }

    let e = 1.0 + p.alpha;
    let fm = f.eval(m, p.alpha);
    let (u_start, du_start) = if fm == 0.0 {
        (m, 0.0)
    } else {
        // Both Hessian eigenvalues share the sign of -f(m) near the center.
        let k = p.weight(-fm);
        let denom = k * ((n as f64 - 1.0) * e + 1.0);
        let base = fm.abs() * e / denom;
        let du = -fm.signum() * (base * r0).powf(1.0 / e);
        let u = m - fm.signum() * e / (1.0 + e) * base.powf(1.0 / e) * r0.powf((1.0 + e) / e);
        (u, du)
    };

    let mut radii = vec![0.0, r0];
    let mut us = vec![m, u_start];
    let mut dus = vec![0.0, du_start];
    let mut first_zero = None;
    let mut r = r0;
    let mut state = (u_start, du_start);

    if u_start <= 0.0 {
        first_zero = Some(bisect_zero_in_step(0.0, (m, 0.0), r0, |s, _| {
            Ok(m - (m - u_start) * (s / r0).powf((1.0 + e) / e))
        })?);
        return Ok(RadialProfile { radii, u: us, du: dus, first_zero });
    }

    while r < r_max - 1e-12 * r_max {
        let step = h.min(r_max - r);
        let next = rk4_step(p, n, f, r, state, step)?;
        let r_next = r + step;
        radii.push(r_next);
        us.push(next.0);
        dus.push(next.1);
        if next.0 <= 0.0 {
            let start = state;
            let r_start = r;
            first_zero = Some(bisect_zero_in_step(r_start, start, step, |s, st| {
                Ok(rk4_step(p, n, f, r_start, st, s)?.0)
            })?);
            break;
        }
        r = r_next;
        state = next;
    }

    Ok(RadialProfile { radii, u: us, du: dus, first_zero })
}

fn bisect_zero_in_step<F>(
    r_start: f64,
    start: (f64, f64),
    step: f64,
    u_after: F,
) -> Result<f64>
where
    F: Fn(f64, (f64, f64)) -> Result<f64>,
{
    let (mut lo, mut hi) = (0.0, step);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if u_after(mid, start)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(r_start + 0.5 * (lo + hi))
}

/// Outward normal derivative at the first zero.
pub fn neumann_constant(profile: &RadialProfile) -> Result<f64> {
    let z = profile.first_zero.ok_or(LabError::NoZeroCrossing)?;
    Ok(profile.sample(z)?.1)
}

/// Controls for [`principal_eigenvalue_ball_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallEigenOptions {
    /// Shooting steps per unit radius of the target ball.
    pub steps_per_radius: usize,
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for BallEigenOptions {
    fn default() -> Self {
        Self {
            steps_per_radius: 20_000,
            rel_tol: 1e-8,
            max_iter: 200,
        }
    }
}

/// Principal eigenvalue of the ball `B(0, R)`.
pub fn principal_eigenvalue_ball(p: &PucciParams, n: usize, radius: f64) -> Result<f64> {
    principal_eigenvalue_ball_with(p, n, radius, &BallEigenOptions::default())
}

/// Bisection in `lambda` on the first zero of the shooting solution with
/// `f = lambda |u|^alpha u`, `u(0) = 1`; the first zero decreases in `lambda`.
pub fn principal_eigenvalue_ball_with(
    p: &PucciParams,
    n: usize,
    radius: f64,
    opts: &BallEigenOptions,
) -> Result<f64> {
    p.validate()?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(LabError::InvalidParams(format!("radius must be positive, got {radius}")));
    }
    let h = radius / opts.steps_per_radius as f64;
    let r_max = 2.0 * radius;
    let zero_at = |lambda: f64| -> Result<f64> {
        let prof = shoot(p, n, &SourceSpec::EigenPower { lambda }, 1.0, r_max, h)?;
        Ok(prof.first_zero.unwrap_or(f64::INFINITY))
    };

    let scale = radius.powf(-(2.0 + p.alpha));
    let (mut lo, mut hi) = (0.0, scale);
    let mut found = false;
    for _ in 0..opts.max_iter {
        if zero_at(hi)? < radius {
            found = true;
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    if !found {
        return Err(LabError::BracketFailure { lo, hi });
    }

    for _ in 0..opts.max_iter {
        if hi - lo <= opts.rel_tol * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if zero_at(mid)? < radius {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plus(a: f64, big_a: f64, alpha: f64) -> PucciParams {
        PucciParams::new(a, big_a, Variant::Plus, alpha).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let lap = PucciParams::laplacian();
        assert!((closed_form_constant(&lap, 2, 1.0, 0.0).unwrap() - 0.25).abs() < 1e-15);
        for alpha in [-0.5, 0.0, 1.0, 2.5] {
            let p = plus(0.7, 1.3, alpha);
            assert_eq!(closed_form_constant(&p, 3, 1.7, 1.7).unwrap(), 0.0);
        }
        // (2/3) (2/5)^(1/2): alpha = 1, N = 3 gives (N-1)(1+alpha)+1 = 5.
        let v = closed_form_constant(&plus(1.0, 1.0, 1.0), 3, 1.0, 0.0).unwrap();
        assert!((v - 2.0 / 3.0 * (0.4f64).sqrt()).abs() < 1e-15);
        assert!(matches!(
            closed_form_constant(&lap, 2, 1.0, 1.5),
            Err(LabError::OutOfDomain { .. })
        ));
        let minus = PucciParams::new(1.0, 1.0, Variant::Minus, 0.0).unwrap();
        assert!(closed_form_constant(&minus, 2, 1.0, 0.5).is_err());
    }

    #[test]
    fn overdetermined_radius_examples() {
        let lap = PucciParams::laplacian();
        assert!((overdetermined_radius(&lap, 2, -0.5).unwrap() - 1.0).abs() < 1e-15);
        let p = plus(1.0, 1.0, 1.0);
        assert!((overdetermined_radius(&p, 3, -0.4).unwrap() - 0.4).abs() < 1e-14);
        for alpha in [-0.5, 0.0, 1.0] {
            for n in [2, 3] {
                let p = plus(0.8, 1.2, alpha);
                let c = neumann_for_radius(&p, n, 1.3).unwrap();
                let r = overdetermined_radius(&p, n, c).unwrap();
                assert!((r - 1.3).abs() < 1e-12);
            }
        }
        assert!(matches!(
            overdetermined_radius(&lap, 2, 0.1),
            Err(LabError::InvalidNeumannData(_))
        ));
        assert!(matches!(
            overdetermined_radius(&lap, 2, 0.0),
            Err(LabError::InvalidNeumannData(_))
        ));
    }

    #[test]
    fn shoot_laplacian_constant_source() {
        let lap = PucciParams::laplacian();
        let prof = shoot(&lap, 2, &SourceSpec::Constant { k: 1.0 }, 0.25, 2.0, 1e-4).unwrap();
        assert!((prof.first_zero.unwrap() - 1.0).abs() < 1e-6);
        assert!((neumann_constant(&prof).unwrap() + 0.5).abs() < 1e-6);
        assert!(prof.concave_decreasing());
    }

    #[test]
    fn shoot_matches_closed_form_with_unequal_ellipticity() {
        let p = plus(1.0, 2.0, 1.0);
        let m = closed_form_constant(&p, 3, 1.0, 0.0).unwrap();
        let prof = shoot(&p, 3, &SourceSpec::Constant { k: 1.0 }, m, 1.5, 1e-4).unwrap();
        let z = prof.first_zero.unwrap();
        assert!((z - 1.0).abs() < 1e-5, "zero at {z}");
        let err = prof
            .radii
            .iter()
            .zip(&prof.u)
            .filter(|(r, _)| **r <= 1.0)
            .map(|(r, u)| (u - closed_form_constant(&p, 3, 1.0, *r).unwrap()).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-5, "sup error {err}");
    }

    #[test]
    fn zero_source_gives_constant_profile() {
        let lap = PucciParams::laplacian();
        let prof = shoot(&lap, 2, &SourceSpec::Constant { k: 0.0 }, 0.3, 1.0, 1e-3).unwrap();
        assert!(prof.first_zero.is_none());
        assert!(prof.u.iter().all(|u| *u == 0.3));
        assert_eq!(neumann_constant(&prof), Err(LabError::NoZeroCrossing));
    }

    #[test]
    fn eigen_profile_scales_with_radius() {
        // lambda s^-(2+alpha) moves the first zero from z to s z.
        for alpha in [-0.5, 0.0, 1.0] {
            let p = plus(1.0, 1.5, alpha);
            let z1 = shoot(&p, 2, &SourceSpec::EigenPower { lambda: 4.0 }, 1.0, 5.0, 1e-4)
                .unwrap()
                .first_zero
                .unwrap();
            let s: f64 = 2.0;
            let lambda = 4.0 * s.powf(-(2.0 + alpha));
            let z2 = shoot(&p, 2, &SourceSpec::EigenPower { lambda }, 1.0, 10.0, 2e-4)
                .unwrap()
                .first_zero
                .unwrap();
            assert!((z2 - s * z1).abs() < 1e-6 * z2, "alpha {alpha}: {z1} {z2}");
        }
    }

    #[test]
    fn first_zero_decreases_in_lambda() {
        let p = plus(1.0, 2.0, 0.0);
        let zeros: Vec<f64> = [2.0, 4.0, 8.0, 16.0]
            .iter()
            .map(|&lambda| {
                shoot(&p, 2, &SourceSpec::EigenPower { lambda }, 1.0, 10.0, 1e-4)
                    .unwrap()
                    .first_zero
                    .unwrap()
            })
            .collect();
        assert!(zeros.windows(2).all(|w| w[1] < w[0]), "{zeros:?}");
    }

    #[test]
    fn disk_eigenvalue_laplacian() {
        let lap = PucciParams::laplacian();
        let lambda = principal_eigenvalue_ball(&lap, 2, 1.0).unwrap();
        // Square of the first zero of J0.
        assert!((lambda - 5.783185962946784).abs() < 1e-6, "{lambda}");
    }

    #[test]
    fn invalid_power_pair_rejected() {
        let s = SourceSpec::PowerPair { lambda: 1.0, mu: 1.0, beta: 0.5 };
        assert!(s.validate(0.0).is_err());
        assert_eq!(
            SourceSpec::PowerPair { lambda: 1.0, mu: 1.0, beta: 3.0 }.case(0.0),
            Some(SourceCase::PowerSplit)
        );
    }
}
