//! Printed closed-form phase expressions and their reconciliation against
//! the first-principles engine.
//!
//! The printed Ψ-family expressions are implemented as written, including
//! the factor 2 on the dynamic term and the ½ on the √(p0·p1) cross term.
//! [`psi_overlap_exact`] is the overlap obtained by expanding
//! `⟨ψ|U_I⊗U_II|ψ⟩` directly; it differs from the printed argument in
//! the cross-term coefficient and in the sign of the imaginary part. The
//! report compares the printed forms with the engine and never patches
//! them.

use num_complex::Complex64 as Cplx;
use rayon::prelude::*;
use serde::Serialize;

use crate::angle::Angle;
use crate::error::{QsrError, Result};
use crate::phase::{self, angular_distance, PhaseValue, SINGULAR_TOL};
use crate::ring::{RingConfig, RingPosition, Segment};
use crate::states::{BellFamilyState, BellKind, EntanglementClass, Sign};

/// Agreement threshold for printed-vs-oracle comparisons.
pub const REPORT_TOL: f64 = 1e-6;

/// Note attached to every report about how the maximal-entanglement cross term is read.
pub const CROSS_TERM_READING: &str =
    "maximal-entanglement cross term read as -(+/-)1/4 sin(delta) sin(eta)";

fn check_range(delta: Angle, eta: Angle) -> Result<()> {
    let (d, e) = (delta.radians(), eta.radians());
    if !(d.is_finite() && e.is_finite()) || d < 0.0 || e < 0.0 {
        return Err(QsrError::InvalidParameter(format!(
            "need 0 <= delta <= eta, got delta = {d}, eta = {e}"
        )));
    }
    if d > e + 1e-12 {
        return Err(QsrError::DeltaExceedsEta { delta: d, eta: e });
    }
    Ok(())
}

fn check_p0(p0: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p0) {
        Ok(())
    } else {
        Err(QsrError::ProbabilityOutOfRange(p0))
    }
}

/// Φ family: `arg(cos²(δ/2)cos²(η/2) + sin²(δ/2)sin²(η/2))`.
pub fn phi_total_phase(delta: Angle, eta: Angle) -> Result<PhaseValue> {
    check_range(delta, eta)?;
    let (sd, cd) = delta.half().sin_cos();
    let (se, ce) = eta.half().sin_cos();
    let q = cd * cd * ce * ce + sd * sd * se * se;
    Ok(PhaseValue::from_overlap(q, 0.0))
}

/// The printed Ψ-family argument
/// `(cos η + cos δ)/2 ∓ √(p0p1)(sin δ sin η)/2 + i(p0−p1)(sin δ sin η)/2`.
pub fn psi_printed_argument(delta: Angle, eta: Angle, p0: f64, sign: Sign) -> Cplx {
    let (sd, cd) = delta.sin_cos();
    let (se, ce) = eta.sin_cos();
    let p1 = 1.0 - p0;
    let ss = sd * se;
    Cplx::new(
        (ce + cd) / 2.0 - sign.value() * (p0 * p1).sqrt() * ss / 2.0,
        (p0 - p1) * ss / 2.0,
    )
}

/// Ψ-family overlap `⟨ψ(0)|U|ψ(0)⟩` on the δ-arm, expanded exactly:
/// `(cos δ + cos η)/2 ∓ √(p0p1)·sin δ sin η − i(p0−p1)(sin δ sin η)/2`.
pub fn psi_overlap_exact(delta: Angle, eta: Angle, p0: f64, sign: Sign) -> Cplx {
    let (sd, cd) = delta.sin_cos();
    let (se, ce) = eta.sin_cos();
    let p1 = 1.0 - p0;
    let ss = sd * se;
    Cplx::new(
        (cd + ce) / 2.0 - sign.value() * (p0 * p1).sqrt() * ss,
        -(p0 - p1) * ss / 2.0,
    )
}

/// Printed dynamic term `−2(sin η)(p0−p1)δ`.
pub fn psi_printed_dynamic(delta: Angle, eta: Angle, p0: f64) -> f64 {
    -2.0 * eta.sin() * (2.0 * p0 - 1.0) * delta.radians()
}

/// The printed dynamic phase at a ring position: zero for Φ and on the
/// η-arms, the printed Ψ term on the δ-arms.
pub fn printed_dynamic_phase(state: &BellFamilyState, cfg: &RingConfig, pos: &RingPosition) -> f64 {
    match (state.kind, pos.segment) {
        (BellKind::Psi, Segment::DeltaArm) => psi_printed_dynamic(pos.coord, cfg.eta, state.p0()),
        _ => 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsiClosedForm {
    /// `arg` of the printed argument.
    pub total: PhaseValue,
    pub dynamic_printed: f64,
    /// `total − dynamic_printed`.
    pub geometric: PhaseValue,
}

/// Printed general Ψ-family geometric phase.
pub fn psi_geometric_closed(
    delta: Angle,
    eta: Angle,
    p0: f64,
    sign: Sign,
) -> Result<PsiClosedForm> {
    check_range(delta, eta)?;
    check_p0(p0)?;
    let z = psi_printed_argument(delta, eta, p0, sign);
    let total = PhaseValue::from_overlap(z.re, z.im);
    let dynamic_printed = psi_printed_dynamic(delta, eta, p0);
    Ok(PsiClosedForm {
        total,
        dynamic_printed,
        geometric: total.minus(dynamic_printed),
    })
}

/// Maximal entanglement: `arg(½(cos δ + cos η) ∓ ¼ sin δ sin η + i0)`.
pub fn psi_maximal_geometric(delta: Angle, eta: Angle, sign: Sign) -> Result<PhaseValue> {
    check_range(delta, eta)?;
    let (sd, cd) = delta.sin_cos();
    let (se, ce) = eta.sin_cos();
    let a = 0.5 * (cd + ce) - sign.value() * 0.25 * sd * se;
    Ok(PhaseValue::from_overlap(a, 0.0))
}

/// No entanglement, `p0 ∈ {0, 1}`:
/// `tan⁻¹[∓ sin δ sin η / (cos δ + cos η)] ∓ 2(sin η)δ`, upper sign for
/// `(p0, p1) = (0, 1)`. The arctangent is taken over the full quadrant.
pub fn psi_unentangled_geometric(delta: Angle, eta: Angle, p0: f64) -> Result<PhaseValue> {
    check_range(delta, eta)?;
    if p0 != 0.0 && p0 != 1.0 {
        return Err(QsrError::InvalidParameter(format!(
            "unentangled form needs p0 in {{0, 1}}, got {p0}"
        )));
    }
    let (sd, cd) = delta.sin_cos();
    let (se, ce) = eta.sin_cos();
    let s = 2.0 * p0 - 1.0; // −1 for (0, 1), +1 for (1, 0)
    let (num, den) = (s * sd * se, cd + ce);
    let atan = PhaseValue::from_overlap(den / 2.0, num / 2.0);
    Ok(atan.minus(-s * 2.0 * se * delta.radians()))
}

/// Partial entanglement:
/// `tan⁻¹[(p0−p1) sin δ sin η / ((cos δ + cos η) ∓ √(p0p1) sin η sin δ)] + 2(sin η)(p0−p1)δ`.
pub fn psi_partial_geometric(delta: Angle, eta: Angle, p0: f64, sign: Sign) -> Result<PhaseValue> {
    check_range(delta, eta)?;
    check_p0(p0)?;
    let (sd, cd) = delta.sin_cos();
    let (se, ce) = eta.sin_cos();
    let p1 = 1.0 - p0;
    let num = (p0 - p1) * sd * se;
    let den = (cd + ce) - sign.value() * (p0 * p1).sqrt() * se * sd;
    let atan = PhaseValue::from_overlap(den / 2.0, num / 2.0);
    Ok(atan.minus(-2.0 * se * (p0 - p1) * delta.radians()))
}

/// The printed maximal-entanglement switching expression
/// `2(cos δ + cos η) ∓ sin δ sin η`; γ = 0 where positive, π where negative.
pub fn printed_switching_denominator(delta: Angle, eta: Angle, sign: Sign) -> f64 {
    let (sd, cd) = delta.sin_cos();
    let (se, ce) = eta.sin_cos();
    2.0 * (cd + ce) - sign.value() * sd * se
}

/// Real part of the Ψ-family overlap, scaled by 4 to share the printed
/// expression's normalization: `2(cos δ + cos η) ∓ 4√(p0p1) sin δ sin η`.
///
/// At `p0 = ½` the imaginary part vanishes and the sign of this value
/// decides γ ∈ {0, π}.
pub fn switching_denominator(delta: Angle, eta: Angle, p0: f64, sign: Sign) -> f64 {
    4.0 * psi_overlap_exact(delta, eta, p0, sign).re
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum EqId {
    /// Φ-family total phase.
    Eq8,
    /// General Ψ-family geometric phase.
    Eq14,
    /// Printed Ψ-family dynamic term against the oracle dynamic phase.
    Eq14D,
    Eq19,
    Eq20,
    Eq21,
}

impl EqId {
    pub fn as_str(self) -> &'static str {
        match self {
            EqId::Eq8 => "Eq8",
            EqId::Eq14 => "Eq14",
            EqId::Eq14D => "Eq14D",
            EqId::Eq19 => "Eq19",
            EqId::Eq20 => "Eq20",
            EqId::Eq21 => "Eq21",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Match,
    Mismatch,
    BothUndefined,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Match => "match",
            Verdict::Mismatch => "mismatch",
            Verdict::BothUndefined => "both-undefined",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormReport {
    pub eq_id: EqId,
    pub delta: f64,
    pub eta: f64,
    pub p0: f64,
    pub sign: Sign,
    pub printed: Option<f64>,
    pub oracle: Option<f64>,
    pub diff: Option<f64>,
    pub verdict: Verdict,
}

impl ClosedFormReport {
    fn compare(
        eq_id: EqId,
        delta: Angle,
        eta: Angle,
        state: &BellFamilyState,
        printed: Option<f64>,
        oracle: Option<f64>,
        angular: bool,
    ) -> Self {
        let diff = match (printed, oracle) {
            (Some(p), Some(o)) if angular => Some(angular_distance(p, o)),
            (Some(p), Some(o)) => Some((p - o).abs()),
            _ => None,
        };
        let verdict = match (printed, oracle, diff) {
            (None, None, _) => Verdict::BothUndefined,
            (_, _, Some(d)) if d <= REPORT_TOL => Verdict::Match,
            _ => Verdict::Mismatch,
        };
        ClosedFormReport {
            eq_id,
            delta: delta.radians(),
            eta: eta.radians(),
            p0: state.p0(),
            sign: state.sign,
            printed,
            oracle,
            diff,
            verdict,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyGrid {
    pub family: BellKind,
    pub signs: Vec<Sign>,
    pub p0s: Vec<f64>,
    /// η values are `eta_max·i/eta_points`, `i = 1..=eta_points`.
    pub eta_points: usize,
    /// δ values are `η·j/(delta_points−1)`, `j = 0..delta_points`.
    pub delta_points: usize,
    pub eta_max: Angle,
    pub quad_steps: usize,
}

impl VerifyGrid {
    pub fn new(family: BellKind, p0s: Vec<f64>) -> Self {
        VerifyGrid {
            family,
            signs: vec![Sign::Plus, Sign::Minus],
            p0s,
            eta_points: 16,
            delta_points: 16,
            eta_max: Angle::pi_fraction(2, 1),
            quad_steps: phase::DEFAULT_QUAD_STEPS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.eta_points < 1 || self.delta_points < 2 {
            return Err(QsrError::InvalidParameter(
                "verify grid needs eta_points >= 1 and delta_points >= 2".into(),
            ));
        }
        if self.quad_steps < 1 {
            return Err(QsrError::InvalidParameter(
                "quadrature steps must be >= 1".into(),
            ));
        }
        if !(self.eta_max.radians() > 0.0 && self.eta_max.radians().is_finite()) {
            return Err(QsrError::InvalidParameter("eta_max must be > 0".into()));
        }
        if self.signs.is_empty() || self.p0s.is_empty() {
            return Err(QsrError::InvalidParameter("empty sign or p0 list".into()));
        }
        self.p0s.iter().try_for_each(|&p| check_p0(p))
    }

    /// `(state, η, δ)` in deterministic order.
    pub fn points(&self) -> Vec<(BellFamilyState, Angle, Angle)> {
        let n = self.eta_points as i64;
        let m = self.delta_points as i64 - 1;
        let mut out = Vec::new();
        for &sign in &self.signs {
            for &p0 in &self.p0s {
                let state = BellFamilyState::new(self.family, sign, p0).expect("validated p0");
                for i in 1..=n {
                    let eta = self.eta_max.scaled(i, n);
                    for j in 0..=m {
                        out.push((state, eta, eta.scaled(j, m)));
                    }
                }
            }
        }
        out
    }
}

/// Which prediction the fitted dynamic coefficient agrees with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientVerdict {
    /// c = 1, the sum of the per-particle cone energies.
    EnergySums,
    /// c = 2, the printed dynamic term.
    PrintedDynamicTerm,
    Neither,
}

/// Least-squares fit of `D_oracle = −c·(p0−p1)·sin η·δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientFit {
    pub coefficient: f64,
    pub residual_rms: f64,
    pub residual_max: f64,
    pub samples: usize,
    pub agrees_with: CoefficientVerdict,
}

impl CoefficientFit {
    pub fn verdict_line(&self) -> String {
        let which = match self.agrees_with {
            CoefficientVerdict::EnergySums => "agrees with the cone-energy sums (c = 1)",
            CoefficientVerdict::PrintedDynamicTerm => {
                "agrees with the printed dynamic term (c = 2)"
            }
            CoefficientVerdict::Neither => "agrees with neither c = 1 nor c = 2",
        };
        format!(
            "dynamic coefficient c = {:.12} (rms residual {:.3e}, max {:.3e}, n = {}): {which}",
            self.coefficient, self.residual_rms, self.residual_max, self.samples
        )
    }
}

/// Fits `c` from `(x, D)` samples with `x = (p0−p1)·sin η·δ`. `None` when
/// every `x` vanishes.
pub fn fit_dynamic_coefficient(samples: &[(f64, f64)]) -> Option<CoefficientFit> {
    let sxx: f64 = samples.iter().map(|(x, _)| x * x).sum();
    if sxx < 1e-300 {
        return None;
    }
    let sxd: f64 = samples.iter().map(|(x, d)| x * d).sum();
    let c = -sxd / sxx;
    let residuals: Vec<f64> = samples.iter().map(|(x, d)| d + c * x).collect();
    let residual_rms = (residuals.iter().map(|r| r * r).sum::<f64>() / samples.len() as f64).sqrt();
    let residual_max = residuals.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
    let agrees_with = if (c - 1.0).abs() < REPORT_TOL {
        CoefficientVerdict::EnergySums
    } else if (c - 2.0).abs() < REPORT_TOL {
        CoefficientVerdict::PrintedDynamicTerm
    } else {
        CoefficientVerdict::Neither
    };
    Some(CoefficientFit {
        coefficient: c,
        residual_rms,
        residual_max,
        samples: samples.len(),
        agrees_with,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EqSummary {
    pub eq_id: EqId,
    pub matches: usize,
    pub mismatches: usize,
    pub both_undefined: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub family: BellKind,
    pub notes: Vec<String>,
    pub summary: Vec<EqSummary>,
    pub coefficient_fit: Option<CoefficientFit>,
    pub rows: Vec<ClosedFormReport>,
}

impl VerifyReport {
    pub fn rows_for(&self, eq: EqId) -> impl Iterator<Item = &ClosedFormReport> {
        self.rows.iter().filter(move |r| r.eq_id == eq)
    }

    /// CSV with columns `eq_id, delta, eta, p0, sign, printed, oracle, diff, verdict`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| QsrError::InvalidParameter(e.to_string());
        w.write_record([
            "eq_id", "delta", "eta", "p0", "sign", "printed", "oracle", "diff", "verdict",
        ])
        .map_err(io)?;
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.15e}")).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.eq_id.as_str().to_string(),
                format!("{:.15e}", r.delta),
                format!("{:.15e}", r.eta),
                format!("{}", r.p0),
                r.sign.symbol().to_string(),
                opt(r.printed),
                opt(r.oracle),
                opt(r.diff),
                r.verdict.as_str().to_string(),
            ])
            .map_err(io)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| QsrError::InvalidParameter(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Report rows for one point plus its `(x, D)` fit sample, if any.
type PointRows = (Vec<ClosedFormReport>, Option<(f64, f64)>);

fn rows_for_point(
    state: &BellFamilyState,
    eta: Angle,
    delta: Angle,
    quad_steps: usize,
) -> Result<PointRows> {
    let cfg = RingConfig::new(eta)?;
    let pos = RingPosition::delta_arm(delta);
    let psi = state.vector();
    let total = phase::total_phase_of(&psi, &cfg, &pos)?;
    let d_oracle = phase::dynamic_phase_quadrature_of(&psi, &cfg, &pos, quad_steps)?;
    let geometric = total.minus(d_oracle);
    let mut rows = Vec::new();
    let mut cmp = |id, printed: PhaseValue, oracle: PhaseValue| {
        rows.push(ClosedFormReport::compare(
            id,
            delta,
            eta,
            state,
            printed.angle(),
            oracle.angle(),
            true,
        ));
    };
    match state.kind {
        BellKind::Phi => {
            cmp(EqId::Eq8, phi_total_phase(delta, eta)?, total);
            Ok((rows, None))
        }
        BellKind::Psi => {
            let (p0, sign) = (state.p0(), state.sign);
            let general = psi_geometric_closed(delta, eta, p0, sign)?;
            cmp(EqId::Eq14, general.geometric, geometric);
            match state.entanglement_class() {
                EntanglementClass::Maximal => cmp(
                    EqId::Eq19,
                    psi_maximal_geometric(delta, eta, sign)?,
                    geometric,
                ),
                EntanglementClass::None => cmp(
                    EqId::Eq20,
                    psi_unentangled_geometric(delta, eta, p0.round())?,
                    geometric,
                ),
                EntanglementClass::Partial => cmp(
                    EqId::Eq21,
                    psi_partial_geometric(delta, eta, p0, sign)?,
                    geometric,
                ),
            }
            rows.push(ClosedFormReport::compare(
                EqId::Eq14D,
                delta,
                eta,
                state,
                Some(general.dynamic_printed),
                Some(d_oracle),
                false,
            ));
            let x = (p0 - state.p1()) * eta.sin() * delta.radians();
            Ok((rows, Some((x, d_oracle))))
        }
    }
}

/// Compares every applicable printed expression with the oracle over the
/// grid. For the Ψ family, also fits the dynamic coefficient from the
/// quadrature oracle.
pub fn verify_closed_forms(grid: &VerifyGrid) -> Result<VerifyReport> {
    grid.validate()?;
    let per_point: Vec<_> = grid
        .points()
        .par_iter()
        .map(|(state, eta, delta)| rows_for_point(state, *eta, *delta, grid.quad_steps))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut samples = Vec::new();
    for (r, s) in per_point {
        rows.extend(r);
        samples.extend(s);
    }
    let mut ids: Vec<EqId> = rows.iter().map(|r| r.eq_id).collect();
    ids.sort();
    ids.dedup();
    let summary = ids
        .into_iter()
        .map(|eq_id| {
            let of = |v| {
                rows.iter()
                    .filter(|r| r.eq_id == eq_id && r.verdict == v)
                    .count()
            };
            EqSummary {
                eq_id,
                matches: of(Verdict::Match),
                mismatches: of(Verdict::Mismatch),
                both_undefined: of(Verdict::BothUndefined),
            }
        })
        .collect();
    Ok(VerifyReport {
        family: grid.family,
        notes: vec![
            CROSS_TERM_READING.to_string(),
            format!("singular tolerance {SINGULAR_TOL:e}, report tolerance {REPORT_TOL:e}"),
        ],
        summary,
        coefficient_fit: fit_dynamic_coefficient(&samples),
        rows,
    })
}
