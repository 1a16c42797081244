//! The mass-radius curve over the center density and the turning point
//! principle: the unstable-mode count can change only at mass extrema, by
//! +1 when `M'R'` flips from - to + (counterclockwise bend of the oriented
//! (R, M) curve) and by -1 on the opposite flip. For small center density
//! the count starts at 1 when `gamma1 in (6/5, 4/3)` and at 0 when
//! `gamma1 in (4/3, 2)`.

use rayon::prelude::*;

use crate::eos::EquationOfState;
use crate::equilibrium::solve_profile;
use crate::error::{Error, Result};

/// Kind of a mass extremum along increasing `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    MassMax,
    MassMin,
}

/// Orientation of the (R, M) curve at a mass extremum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bend {
    /// `M'R'` changes from - to +: the count increments.
    CounterClockwise,
    /// `M'R'` changes from + to -: the count decrements.
    Clockwise,
    /// `R' = 0` at the extremum as well; the rule is silent, reported as-is.
    Degenerate,
}

#[derive(Debug, Clone, Copy)]
pub struct Extremum {
    pub mu: f64,
    pub kind: ExtremumKind,
    pub bend: Bend,
}

/// Unstable-mode count on one `mu` segment between extrema.
#[derive(Debug, Clone, Copy)]
pub struct SegmentCount {
    pub mu_lo: f64,
    pub mu_hi: f64,
    pub n_unstable: usize,
}

/// Sampled mass-radius curve.
#[derive(Debug, Clone)]
pub struct MassRadiusCurve {
    pub mus: Vec<f64>,
    pub mass: Vec<f64>,
    pub radius: Vec<f64>,
    /// dM/dmu by 4th-order differences on the logarithmic grid.
    pub dmass: Vec<f64>,
    /// dR/dmu likewise.
    pub dradius: Vec<f64>,
    pub extrema: Vec<Extremum>,
    /// Filled by [`turning_point_counts`].
    pub counts: Vec<SegmentCount>,
}

impl MassRadiusCurve {
    /// Count lookup once [`turning_point_counts`] has run.
    pub fn count_at(&self, mu: f64) -> Option<usize> {
        self.counts
            .iter()
            .find(|s| mu >= s.mu_lo && mu <= s.mu_hi)
            .map(|s| s.n_unstable)
    }
}

/// Sweep the curve for an equation of state.
pub fn sweep_curve(
    eos: &EquationOfState,
    mu_min: f64,
    mu_max: f64,
    n_points: usize,
    tol: f64,
) -> Result<MassRadiusCurve> {
    let eos = *eos;
    sweep_curve_fn(
        move |mu| {
            let p = solve_profile(&eos, mu, tol)
                .map_err(|e| Error::Tolerance(format!("profile at mu = {mu:.6e}: {e}")))?;
            Ok((p.mass(), p.r_mu()))
        },
        mu_min,
        mu_max,
        n_points,
    )
}

/// Sweep over an arbitrary `mu -> (M, R)` map; the production path wraps the
/// profile solver, tests may pass closed forms.
pub fn sweep_curve_fn<F>(solve: F, mu_min: f64, mu_max: f64, n_points: usize) -> Result<MassRadiusCurve>
where
    F: Fn(f64) -> Result<(f64, f64)> + Sync,
{
    if !(mu_min > 0.0 && mu_max > mu_min) {
        return Err(Error::Domain(format!(
            "need 0 < mu_min < mu_max, got [{mu_min}, {mu_max}]"
        )));
    }
    if n_points < 8 {
        return Err(Error::Config("n_points must be at least 8".into()));
    }

    let dlog = (mu_max / mu_min).ln() / (n_points - 1) as f64;
    let mus: Vec<f64> = (0..n_points)
        .map(|i| mu_min * (dlog * i as f64).exp())
        .collect();
    let solved: Result<Vec<(f64, f64)>> = mus.par_iter().map(|&mu| solve(mu)).collect();
    let solved = solved?;
    let mass: Vec<f64> = solved.iter().map(|s| s.0).collect();
    let radius: Vec<f64> = solved.iter().map(|s| s.1).collect();

    // d/dmu = (1/mu) d/dlog(mu), 4th order on the uniform log grid
    let ddlog = |f: &[f64]| -> Vec<f64> {
        let n = f.len();
        let mut d = vec![0.0; n];
        for i in 0..n {
            d[i] = if i >= 2 && i + 2 < n {
                (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * dlog)
            } else if i == 0 {
                (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4])
                    / (12.0 * dlog)
            } else if i == 1 {
                (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * dlog)
            } else if i + 2 == n {
                (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5])
                    / (12.0 * dlog)
            } else {
                (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4]
                    + 3.0 * f[n - 5])
                    / (12.0 * dlog)
            };
        }
        d
    };
    let dm_log = ddlog(&mass);
    let dr_log = ddlog(&radius);
    let dmass: Vec<f64> = dm_log.iter().zip(&mus).map(|(d, mu)| d / mu).collect();
    let dradius: Vec<f64> = dr_log.iter().zip(&mus).map(|(d, mu)| d / mu).collect();

    // extrema: sign changes of dM (near-zero derivatives count as candidate
    // crossings through the tie-break below), refined by ternary search on M
    // itself until the abscissa is bracketed to 1e-3 relative
    let dr_scale = dradius
        .iter()
        .zip(&mus)
        .map(|(d, mu)| (d * mu).abs())
        .fold(0.0, f64::max);
    let mut extrema = Vec::new();
    for i in 0..n_points - 1 {
        let s0 = dm_log[i];
        let s1 = dm_log[i + 1];
        if s0 * s1 >= 0.0 {
            continue;
        }
        let kind = if s0 > 0.0 {
            ExtremumKind::MassMax
        } else {
            ExtremumKind::MassMin
        };
        let mu_star = refine_extremum(&solve, mus[i], mus[i + 1], kind)?;
        // bend from the sign of M'R' on both sides, one grid point away
        let lo = i.saturating_sub(1);
        let hi = (i + 2).min(n_points - 1);
        let before = dmass[lo] * dradius[lo];
        let after = dmass[hi] * dradius[hi];
        let degen = (dradius[lo] * mus[lo]).abs() < 1e-9 * dr_scale
            || (dradius[hi] * mus[hi]).abs() < 1e-9 * dr_scale;
        let bend = if degen {
            Bend::Degenerate
        } else if before < 0.0 && after > 0.0 {
            Bend::CounterClockwise
        } else if before > 0.0 && after < 0.0 {
            Bend::Clockwise
        } else {
            Bend::Degenerate
        };
        extrema.push(Extremum {
            mu: mu_star,
            kind,
            bend,
        });
    }

    Ok(MassRadiusCurve {
        mus,
        mass,
        radius,
        dmass,
        dradius,
        extrema,
        counts: Vec::new(),
    })
}

fn refine_extremum<F>(solve: &F, mut lo: f64, mut hi: f64, kind: ExtremumKind) -> Result<f64>
where
    F: Fn(f64) -> Result<(f64, f64)> + Sync,
{
    let better = |a: f64, b: f64| match kind {
        ExtremumKind::MassMax => a > b,
        ExtremumKind::MassMin => a < b,
    };
    // ternary search in log(mu)
    let mut guard = 0;
    while (hi - lo) > 1e-3 * lo {
        let l = (2.0 * lo.ln() + hi.ln()) / 3.0;
        let r = (lo.ln() + 2.0 * hi.ln()) / 3.0;
        let (ml, _) = solve(l.exp())?;
        let (mr, _) = solve(r.exp())?;
        if better(ml, mr) {
            hi = r.exp();
        } else {
            lo = l.exp();
        }
        guard += 1;
        if guard > 200 {
            return Err(Error::Tolerance("extremum refinement stalled".into()));
        }
    }
    Ok((lo * hi).sqrt())
}

/// Fill per-segment unstable counts by the turning point rule.
pub fn turning_point_counts(mut curve: MassRadiusCurve, gamma1: f64) -> Result<MassRadiusCurve> {
    if !(gamma1 > 1.2 && gamma1 < 2.0) {
        return Err(Error::Domain(format!(
            "gamma1 must lie in (6/5, 2), got {gamma1}"
        )));
    }
    if (gamma1 - 4.0 / 3.0).abs() < 1e-9 {
        return Err(Error::MassCritical);
    }
    // segment flatness guard: M' must not vanish between extrema
    let m_scale = curve.mass.iter().cloned().fold(0.0, f64::max);
    let dlog = (curve.mus[1] / curve.mus[0]).ln();
    let near_extremum = |mu: f64| {
        curve
            .extrema
            .iter()
            .any(|e| (mu / e.mu).ln().abs() < 3.0 * dlog)
    };
    let flat = curve
        .mus
        .iter()
        .zip(&curve.dmass)
        .filter(|(mu, _)| !near_extremum(**mu))
        .filter(|(mu, dm)| (dm.abs() * **mu * dlog) < 1e-6 * m_scale)
        .count();
    if flat > 0 {
        return Err(Error::DegenerateCurve(format!(
            "M'(mu) vanishes on {flat} sample(s) away from any extremum"
        )));
    }

    let mut n: i64 = if gamma1 < 4.0 / 3.0 { 1 } else { 0 };
    let mut counts = Vec::with_capacity(curve.extrema.len() + 1);
    let mut lo = curve.mus[0];
    for e in &curve.extrema {
        counts.push(SegmentCount {
            mu_lo: lo,
            mu_hi: e.mu,
            n_unstable: n as usize,
        });
        match e.bend {
            Bend::CounterClockwise => n += 1,
            Bend::Clockwise => n -= 1,
            Bend::Degenerate => {
                return Err(Error::DegenerateCurve(format!(
                    "degenerate bend at mu = {:.6e}",
                    e.mu
                )))
            }
        }
        if n < 0 {
            return Err(Error::DegenerateCurve(
                "turning point rule drove the count negative".into(),
            ));
        }
        lo = e.mu;
    }
    counts.push(SegmentCount {
        mu_lo: lo,
        mu_hi: *curve.mus.last().unwrap(),
        n_unstable: n as usize,
    });
    curve.counts = counts;
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polytrope_monotonicity_follows_scaling_laws() {
        // gamma = 1.5: M ~ mu^{1/4} rising; gamma = 1.25: M ~ mu^{-1/8} falling
        let eos = EquationOfState::polytrope(1.0, 1.5).unwrap();
        let c = sweep_curve(&eos, 0.1, 10.0, 16, 1e-8).unwrap();
        assert!(c.dmass.iter().all(|&d| d > 0.0));
        assert!(c.extrema.is_empty());
        // measured scaling exponent
        let expo = (c.mass.last().unwrap() / c.mass[0]).ln() / (10.0f64 / 0.1).ln();
        assert_relative_eq!(expo, 0.25, max_relative = 1e-3);

        let eos = EquationOfState::polytrope(1.0, 1.25).unwrap();
        let c = sweep_curve(&eos, 0.1, 10.0, 16, 1e-8).unwrap();
        assert!(c.dmass.iter().all(|&d| d < 0.0));
        let expo = (c.mass.last().unwrap() / c.mass[0]).ln() / (10.0f64 / 0.1).ln();
        assert_relative_eq!(expo, -0.125, max_relative = 1e-3);
    }

    #[test]
    fn white_dwarf_mass_strictly_rising() {
        let eos = EquationOfState::white_dwarf(1.0, 1.0).unwrap();
        let c = sweep_curve(&eos, 0.1, 10.0, 12, 1e-8).unwrap();
        assert!(c.dmass.iter().all(|&d| d > 0.0));
        assert!(c.extrema.is_empty());
    }

    #[test]
    fn counts_constant_without_extrema() {
        let eos = EquationOfState::polytrope(1.0, 1.25).unwrap();
        let c = sweep_curve(&eos, 0.1, 10.0, 16, 1e-8).unwrap();
        let c = turning_point_counts(c, 1.25).unwrap();
        assert_eq!(c.counts.len(), 1);
        assert_eq!(c.counts[0].n_unstable, 1);
        assert_eq!(c.count_at(1.0), Some(1));

        let eos = EquationOfState::polytrope(1.0, 1.5).unwrap();
        let c = sweep_curve(&eos, 0.1, 10.0, 16, 1e-8).unwrap();
        let c = turning_point_counts(c, 1.5).unwrap();
        assert_eq!(c.counts[0].n_unstable, 0);
    }

    #[test]
    fn synthetic_mass_max_increments_count() {
        // M has a maximum at mu = 2 while R falls monotonically, so M'R'
        // flips from - ... wait: R' < 0 and M' goes + -> -, so M'R' goes
        // - -> +: counterclockwise, count 0 -> 1.
        let solve = |mu: f64| -> Result<(f64, f64)> {
            let m = 3.0 - (mu.ln() - 2.0f64.ln()).powi(2);
            let r = 2.0 / mu.sqrt();
            Ok((m, r))
        };
        let c = sweep_curve_fn(solve, 0.5, 8.0, 64).unwrap();
        assert_eq!(c.extrema.len(), 1);
        let e = &c.extrema[0];
        assert_eq!(e.kind, ExtremumKind::MassMax);
        assert_eq!(e.bend, Bend::CounterClockwise);
        assert!((e.mu - 2.0).abs() <= 2e-3 * 2.0, "mu* = {}", e.mu);
        let c = turning_point_counts(c, 1.5).unwrap();
        assert_eq!(c.counts.len(), 2);
        assert_eq!(c.counts[0].n_unstable, 0);
        assert_eq!(c.counts[1].n_unstable, 1);
        assert_eq!(c.count_at(1.0), Some(0));
        assert_eq!(c.count_at(4.0), Some(1));
    }

    #[test]
    fn synthetic_clockwise_extremum_decrements() {
        // rising R makes the same mass maximum clockwise: 1 -> 0 for the
        // supercritical start gamma1 < 4/3
        let solve = |mu: f64| -> Result<(f64, f64)> {
            let m = 3.0 - (mu.ln() - 2.0f64.ln()).powi(2);
            let r = 2.0 * mu.sqrt();
            Ok((m, r))
        };
        let c = sweep_curve_fn(solve, 0.5, 8.0, 64).unwrap();
        assert_eq!(c.extrema.len(), 1);
        assert_eq!(c.extrema[0].bend, Bend::Clockwise);
        let c = turning_point_counts(c, 1.25).unwrap();
        assert_eq!(c.counts[0].n_unstable, 1);
        assert_eq!(c.counts[1].n_unstable, 0);
    }

    #[test]
    fn mass_critical_exponent_rejected() {
        let solve = |mu: f64| -> Result<(f64, f64)> { Ok((mu, 1.0 / mu)) };
        let c = sweep_curve_fn(solve, 0.5, 8.0, 16).unwrap();
        assert!(matches!(
            turning_point_counts(c, 4.0 / 3.0),
            Err(Error::MassCritical)
        ));
    }

    #[test]
    fn flat_curve_is_degenerate() {
        let solve = |_mu: f64| -> Result<(f64, f64)> { Ok((1.0, 1.0)) };
        let c = sweep_curve_fn(solve, 0.5, 8.0, 16).unwrap();
        assert!(matches!(
            turning_point_counts(c, 1.5),
            Err(Error::DegenerateCurve(_))
        ));
    }

    #[test]
    fn validates_inputs() {
        let solve = |mu: f64| -> Result<(f64, f64)> { Ok((mu, mu)) };
        assert!(sweep_curve_fn(solve, -1.0, 2.0, 16).is_err());
        assert!(sweep_curve_fn(solve, 1.0, 2.0, 4).is_err());
        let eos = EquationOfState::polytrope(1.0, 1.5).unwrap();
        assert!(sweep_curve(&eos, 2.0, 1.0, 16, 1e-8).is_err());
    }
}
