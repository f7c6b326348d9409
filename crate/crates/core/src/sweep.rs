//! Parameter scans, switching loci, phase taxonomy and arm coloring.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::angle::Angle;
use crate::closed_forms::{
    phi_total_phase, printed_switching_denominator, psi_geometric_closed, psi_overlap_exact,
    switching_denominator,
};
use crate::error::{QsrError, Result};
use crate::phase::{self, angular_distance, PhaseValue, SINGULAR_TOL};
use crate::ring::{RingConfig, RingPosition, Segment};
use crate::roots::{locate_zeros, ZeroKind};
use crate::states::{BellFamilyState, BellKind, EntanglementClass, Sign};

/// Tolerance for calling a phase discrete (0 or π) or a dynamic phase zero.
pub const CLASSIFY_TOL: f64 = 1e-6;

/// Default δ samples per arm.
pub const DEFAULT_DELTA_POINTS: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Oracle,
    Closed,
    Both,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub family: BellKind,
    pub sign: Sign,
    pub p0s: Vec<f64>,
    pub etas: Vec<Angle>,
    pub delta_points: usize,
    pub engine: Engine,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.delta_points < 2 {
            return Err(QsrError::InvalidParameter(
                "delta resolution must be >= 2".into(),
            ));
        }
        if self.p0s.is_empty() || self.etas.is_empty() {
            return Err(QsrError::InvalidParameter("empty p0 or eta list".into()));
        }
        for &p in &self.p0s {
            BellFamilyState::new(self.family, self.sign, p)?;
        }
        for eta in &self.etas {
            if !(eta.radians() > 0.0 && eta.radians().is_finite()) {
                return Err(QsrError::InvalidRing(format!("eta must be > 0, got {eta}")));
            }
        }
        Ok(())
    }
}

/// δ values `η·j/(n−1)`, exact when η is symbolic.
pub fn delta_grid(eta: Angle, points: usize) -> Vec<Angle> {
    let m = points.max(2) as i64 - 1;
    (0..=m).map(|j| eta.scaled(j, m)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub family: BellKind,
    pub sign: Sign,
    pub p0: f64,
    pub eta: f64,
    pub delta: f64,
    pub total: Option<f64>,
    pub dynamic_oracle: f64,
    pub dynamic_printed: f64,
    pub geometric: Option<f64>,
    pub defined: bool,
    pub overlap: f64,
    pub engine: Engine,
}

fn sweep_point(
    state: &BellFamilyState,
    eta: Angle,
    delta: Angle,
    engine: Engine,
) -> Result<SweepRow> {
    let cfg = RingConfig::new(eta)?;
    let pos = RingPosition::delta_arm(delta);
    let b = phase::evaluate(state, &cfg, &pos)?;
    let (total, geometric) = match engine {
        Engine::Closed => match state.kind {
            BellKind::Phi => {
                let t = phi_total_phase(delta, eta)?;
                (t, t)
            }
            BellKind::Psi => {
                let c = psi_geometric_closed(delta, eta, state.p0(), state.sign)?;
                (c.total, c.geometric)
            }
        },
        _ => (b.total, b.geometric),
    };
    Ok(SweepRow {
        family: state.kind,
        sign: state.sign,
        p0: state.p0(),
        eta: eta.radians(),
        delta: delta.radians(),
        total: total.angle(),
        dynamic_oracle: b.dynamic_oracle,
        dynamic_printed: b.dynamic_printed,
        geometric: geometric.angle(),
        defined: geometric.is_defined(),
        overlap: total.magnitude(),
        engine,
    })
}

/// Evaluates every grid point; rows are ordered by (p0, η, engine, δ)
/// regardless of how the work is scheduled.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let engines: &[Engine] = match spec.engine {
        Engine::Both => &[Engine::Oracle, Engine::Closed],
        Engine::Oracle => &[Engine::Oracle],
        Engine::Closed => &[Engine::Closed],
    };
    let mut jobs = Vec::new();
    for &p0 in &spec.p0s {
        let state = BellFamilyState::new(spec.family, spec.sign, p0)?;
        for &eta in &spec.etas {
            for &engine in engines {
                for delta in delta_grid(eta, spec.delta_points) {
                    jobs.push((state, eta, delta, engine));
                }
            }
        }
    }
    jobs.par_iter()
        .map(|(s, e, d, g)| sweep_point(s, *e, *d, *g))
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let io = |e: csv::Error| QsrError::InvalidParameter(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "family",
        "sign",
        "p0",
        "eta",
        "delta",
        "total",
        "dynamic_oracle",
        "dynamic_printed",
        "geometric",
        "defined",
        "overlap",
        "engine",
    ])
    .map_err(io)?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        w.write_record([
            match r.family {
                BellKind::Phi => "phi".to_string(),
                BellKind::Psi => "psi".to_string(),
            },
            r.sign.symbol().to_string(),
            r.p0.to_string(),
            r.eta.to_string(),
            r.delta.to_string(),
            opt(r.total),
            r.dynamic_oracle.to_string(),
            r.dynamic_printed.to_string(),
            opt(r.geometric),
            r.defined.to_string(),
            r.overlap.to_string(),
            match r.engine {
                Engine::Oracle => "oracle".to_string(),
                Engine::Closed => "closed".to_string(),
                Engine::Both => "both".to_string(),
            },
        ])
        .map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| QsrError::InvalidParameter(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DynamicClass {
    Zero,
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeometricClass {
    DiscreteZero,
    DiscretePi,
    /// Every defined point is 0 or π, and both occur.
    DiscreteZeroOrPi,
    Continuous,
    Undefined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Location {
    /// δ = 0: the η-arms up to the corner.
    DeltaZero,
    DeltaPositive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TaxonomyCell {
    pub dynamic_class: DynamicClass,
    pub geometric_class: GeometricClass,
    pub location: Location,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointClassification {
    pub state: BellFamilyState,
    pub eta: Angle,
    pub corner: TaxonomyCell,
    pub delta_arm: TaxonomyCell,
    /// Scan coordinates with an undefined phase, `(location, coord)`.
    pub undefined_points: Vec<(Location, f64)>,
}

pub fn classify_dynamic(values: &[f64]) -> DynamicClass {
    if values.iter().all(|d| d.abs() < CLASSIFY_TOL) {
        DynamicClass::Zero
    } else {
        DynamicClass::Continuous
    }
}

pub fn classify_geometric(values: &[f64]) -> GeometricClass {
    if values.is_empty() {
        return GeometricClass::Undefined;
    }
    let near = |g: f64, t: f64| angular_distance(g, t) < CLASSIFY_TOL;
    let zeros = values.iter().filter(|&&g| near(g, 0.0)).count();
    let pis = values.iter().filter(|&&g| near(g, PI)).count();
    match (zeros, pis) {
        (z, _) if z == values.len() => GeometricClass::DiscreteZero,
        (_, p) if p == values.len() => GeometricClass::DiscretePi,
        (z, p) if z + p == values.len() => GeometricClass::DiscreteZeroOrPi,
        _ => GeometricClass::Continuous,
    }
}

/// Classifies the dynamic and geometric phases on the η-arms (δ = 0) and
/// along the δ-arms (δ > 0) from the oracle. Undefined points are skipped.
pub fn classify_point(
    state: &BellFamilyState,
    eta: Angle,
    delta_points: usize,
) -> Result<PointClassification> {
    let cfg = RingConfig::new(eta)?;
    let grid = delta_grid(eta, delta_points);
    let psi = state.vector();
    let mut undefined_points = Vec::new();
    let mut scan = |location: Location, positions: Vec<RingPosition>| -> Result<TaxonomyCell> {
        let mut dyn_values = Vec::new();
        let mut geo_values = Vec::new();
        for pos in positions {
            let total = phase::total_phase_of(&psi, &cfg, &pos)?;
            let d = phase::dynamic_phase_of(&psi, &cfg, &pos)?;
            dyn_values.push(d);
            match total.minus(d).angle() {
                Some(g) => geo_values.push(g),
                None => undefined_points.push((location, pos.coord.radians())),
            }
        }
        Ok(TaxonomyCell {
            dynamic_class: classify_dynamic(&dyn_values),
            geometric_class: classify_geometric(&geo_values),
            location,
        })
    };
    let corner = scan(
        Location::DeltaZero,
        grid.iter().map(|&s| RingPosition::eta_arm(s)).collect(),
    )?;
    let delta_arm = scan(
        Location::DeltaPositive,
        grid.iter()
            .skip(1)
            .map(|&d| RingPosition::delta_arm(d))
            .collect(),
    )?;
    Ok(PointClassification {
        state: *state,
        eta,
        corner,
        delta_arm,
        undefined_points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocusKind {
    /// The denominator changes sign: γ flips between 0 and π.
    SignChange,
    /// The denominator touches zero without crossing; γ is undefined there
    /// only.
    UndefinedTouch,
    /// Singular corner (δ = 0) after which the δ-arm is at π.
    CornerOnset,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwitchLocus {
    pub eta: f64,
    pub delta_star: f64,
    pub kind: LocusKind,
    /// Denominator value at `delta_star`.
    pub denominator: f64,
    /// `|⟨ψ(0)|U|ψ(0)⟩|` at `delta_star`, from the exact overlap.
    pub overlap: f64,
}

fn loci_from_zeros<F: Fn(f64) -> f64>(
    f: &F,
    eta: Angle,
    overlap_at: &dyn Fn(f64) -> f64,
    require_vanishing_overlap: bool,
) -> Vec<SwitchLocus> {
    let e = eta.radians();
    let samples = DEFAULT_DELTA_POINTS.max((e / (PI / 64.0)).ceil() as usize);
    let zeros = locate_zeros(f, 0.0, e, samples, 4.0 * SINGULAR_TOL);
    zeros
        .into_iter()
        .filter_map(|z| {
            let overlap = overlap_at(z.at);
            if require_vanishing_overlap && overlap >= SINGULAR_TOL {
                return None;
            }
            let kind = if z.at == 0.0 {
                let after = f(e.min(1e-6));
                if after < 0.0 {
                    LocusKind::CornerOnset
                } else {
                    LocusKind::UndefinedTouch
                }
            } else {
                match z.kind {
                    ZeroKind::SignChange => LocusKind::SignChange,
                    ZeroKind::Touch => LocusKind::UndefinedTouch,
                }
            };
            Some(SwitchLocus {
                eta: e,
                delta_star: z.at,
                kind,
                denominator: f(z.at),
                overlap,
            })
        })
        .collect()
}

/// Points on the δ-arm where the discrete geometric phase switches or is
/// undefined.
///
/// For the Ψ family this locates zeros of [`switching_denominator`] (the
/// real part of the exact overlap) and keeps those where the whole overlap
/// vanishes; for `p0 ≠ ½` a real-part zero with a live imaginary part is
/// not a switch. For the Φ family the overlap is real and non-negative, so
/// only touches occur.
pub fn find_switch_loci(state: &BellFamilyState, eta: Angle) -> Result<Vec<SwitchLocus>> {
    RingConfig::new(eta)?;
    let (p0, sign) = (state.p0(), state.sign);
    Ok(match state.kind {
        BellKind::Psi => {
            let f = |d: f64| switching_denominator(d.into(), eta, p0, sign);
            let ov = |d: f64| psi_overlap_exact(d.into(), eta, p0, sign).norm();
            loci_from_zeros(&f, eta, &ov, true)
        }
        BellKind::Phi => {
            let ov = |d: f64| {
                phi_total_phase(d.into(), eta)
                    .map(|v| v.magnitude())
                    .unwrap_or(0.0)
            };
            loci_from_zeros(&ov, eta, &ov, true)
        }
    })
}

/// Zeros of the printed maximal-entanglement switching expression
/// `2(cos δ + cos η) ∓ sin δ sin η` on `[0, η]`. The reported overlap is
/// the exact one at that point, so a non-zero value exposes a printed
/// locus that is not a singular point.
pub fn find_printed_switch_loci(eta: Angle, sign: Sign) -> Result<Vec<SwitchLocus>> {
    RingConfig::new(eta)?;
    let f = |d: f64| printed_switching_denominator(d.into(), eta, sign);
    let ov = |d: f64| psi_overlap_exact(d.into(), eta, 0.5, sign).norm();
    Ok(loci_from_zeros(&f, eta, &ov, false))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArmId {
    /// Horizontal η-arm of path I.
    Eta1,
    /// Vertical η-arm of path II.
    Eta2,
    /// Vertical δ-arm of path I.
    Delta1,
    /// Horizontal δ-arm of path II.
    Delta2,
}

impl ArmId {
    pub const ALL: [ArmId; 4] = [ArmId::Eta1, ArmId::Eta2, ArmId::Delta1, ArmId::Delta2];

    pub fn segment(self) -> Segment {
        match self {
            ArmId::Eta1 | ArmId::Eta2 => Segment::EtaArm,
            ArmId::Delta1 | ArmId::Delta2 => Segment::DeltaArm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SegmentColor {
    /// γ = 0 (blue).
    Zero,
    /// γ = π (red).
    Pi,
    Continuous,
    /// Singular point; zero-length marker.
    Undefined,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColoredSegment {
    pub start: f64,
    pub end: f64,
    pub color: SegmentColor,
    /// `(coord, γ)` samples, only for continuous segments.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub samples: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArmColors {
    pub arm: ArmId,
    pub segments: Vec<ColoredSegment>,
}

impl ArmColors {
    pub fn color_at(&self, coord: f64) -> Option<SegmentColor> {
        self.segments
            .iter()
            .filter(|s| s.color != SegmentColor::Undefined)
            .find(|s| s.start <= coord && coord <= s.end)
            .map(|s| s.color)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArmColoring {
    pub state: BellFamilyState,
    pub eta: Angle,
    pub arms: Vec<ArmColors>,
}

impl ArmColoring {
    pub fn arm(&self, id: ArmId) -> &ArmColors {
        self.arms
            .iter()
            .find(|a| a.arm == id)
            .expect("all four arms present")
    }
}

fn color_arm(
    state: &BellFamilyState,
    cfg: &RingConfig,
    segment: Segment,
    samples: usize,
) -> Result<Vec<ColoredSegment>> {
    let psi = state.vector();
    let eta = cfg.eta.radians();
    let at = |c: f64| RingPosition {
        segment,
        coord: Angle::from(c.clamp(0.0, eta)),
    };
    let overlap = |c: f64| phase::overlap(&psi, cfg, &at(c)).expect("position validated by clamp");
    let re = |c: f64| overlap(c).re;
    let zeros = locate_zeros(&re, 0.0, eta, samples, 4.0 * SINGULAR_TOL);
    let singular: Vec<f64> = zeros
        .into_iter()
        .map(|z| z.at)
        .filter(|&c| overlap(c).norm() < SINGULAR_TOL)
        .collect();

    let mut breaks = vec![0.0];
    breaks.extend(singular.iter().copied().filter(|&c| c > 0.0 && c < eta));
    breaks.push(eta);
    breaks.dedup();

    let mut out = Vec::new();
    let mark = |c: f64, out: &mut Vec<ColoredSegment>| {
        if singular.iter().any(|&s| (s - c).abs() < 1e-9) {
            out.push(ColoredSegment {
                start: c,
                end: c,
                color: SegmentColor::Undefined,
                samples: vec![],
            });
        }
    };
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        mark(a, &mut out);
        if b <= a {
            continue;
        }
        let k = (samples as f64 * ((b - a) / eta.max(f64::MIN_POSITIVE)))
            .ceil()
            .max(8.0) as usize;
        let mut pts = Vec::with_capacity(k);
        for i in 1..=k {
            let c = a + (b - a) * i as f64 / (k + 1) as f64;
            let g = phase::geometric_phase_of(&psi, cfg, &at(c))?;
            if let Some(g) = g.angle() {
                pts.push((c, g));
            }
        }
        let values: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let (color, samples_kept) = match classify_geometric(&values) {
            GeometricClass::DiscreteZero => (SegmentColor::Zero, vec![]),
            GeometricClass::DiscretePi => (SegmentColor::Pi, vec![]),
            GeometricClass::Undefined => (SegmentColor::Undefined, vec![]),
            _ => (SegmentColor::Continuous, pts),
        };
        out.push(ColoredSegment {
            start: a,
            end: b,
            color,
            samples: samples_kept,
        });
    }
    if let Some(&last) = breaks.last() {
        if last > 0.0 {
            mark(last, &mut out);
        }
    }
    Ok(out)
}

/// Per-arm coloring by the oracle geometric phase. Each arm is split at
/// the singular points of the overlap along it; every piece in between is
/// classified from interior samples.
///
/// Both particles advance in lockstep, so the two η-arms (and the two
/// δ-arms) carry the same pair phase.
pub fn arm_coloring(
    state: &BellFamilyState,
    eta: Angle,
    delta_points: usize,
) -> Result<ArmColoring> {
    let cfg = RingConfig::new(eta)?;
    let samples = delta_points.max(2);
    let eta_arm = color_arm(state, &cfg, Segment::EtaArm, samples)?;
    let delta_arm = color_arm(state, &cfg, Segment::DeltaArm, samples)?;
    let arms = ArmId::ALL
        .iter()
        .map(|&arm| ArmColors {
            arm,
            segments: match arm.segment() {
                Segment::EtaArm => eta_arm.clone(),
                Segment::DeltaArm => delta_arm.clone(),
            },
        })
        .collect();
    Ok(ArmColoring {
        state: *state,
        eta,
        arms,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    NoEntanglement,
    Maximal,
    Partial,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::NoEntanglement => "(p0,p1) = (0,1) or (1,0), NO ENTG.",
            Regime::Maximal => "p0 = p1 = 1/2, MAX. ENTG.",
            Regime::Partial => "p0 != p1 != 0, PARTIAL ENTG.",
        }
    }

    fn p0s(self) -> &'static [f64] {
        match self {
            Regime::NoEntanglement => &[0.0, 1.0],
            Regime::Maximal => &[0.5],
            Regime::Partial => &[0.25, 0.8],
        }
    }

    fn matches(self, class: EntanglementClass) -> bool {
        matches!(
            (self, class),
            (Regime::NoEntanglement, EntanglementClass::None)
                | (Regime::Maximal, EntanglementClass::Maximal)
                | (Regime::Partial, EntanglementClass::Partial)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DynamicPattern {
    Zero,
    /// Zero at η = nπ, continuous elsewhere.
    ZeroAtMultiplesOfPi,
    Irregular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeometricPattern {
    Zero,
    /// Only 0 and π at every η, with π occurring.
    DiscreteZeroOrPi,
    /// Discrete 0 at η = 2nπ, discrete π at η = (2n+1)π, continuous elsewhere.
    AlternatingAtMultiplesOfPi,
    Irregular,
}

impl DynamicPattern {
    pub fn describe(self) -> &'static str {
        match self {
            DynamicPattern::Zero => "0",
            DynamicPattern::ZeroAtMultiplesOfPi => "0 (eta=n*pi); continuous otherwise",
            DynamicPattern::Irregular => "irregular",
        }
    }
}

impl GeometricPattern {
    pub fn describe(self) -> &'static str {
        match self {
            GeometricPattern::Zero => "0",
            GeometricPattern::DiscreteZeroOrPi => "Discrete 0 or pi",
            GeometricPattern::AlternatingAtMultiplesOfPi => {
                "Discrete 0 (eta=2n*pi); Discrete pi (eta=(2n+1)*pi); continuous otherwise"
            }
            GeometricPattern::Irregular => "irregular",
        }
    }
}

/// The η values scanned for the taxonomy: even and odd multiples of π plus
/// generic arm lengths.
pub fn table1_etas() -> Vec<Angle> {
    vec![
        Angle::pi_fraction(1, 1),
        Angle::pi_fraction(2, 1),
        Angle::pi_fraction(3, 1),
        Angle::from_radians(0.7),
        Angle::from_radians(2.2),
        Angle::from_radians(4.0),
    ]
}

/// Odd multiples of π/2. Not part of the pattern inference: there a
/// product state leaves the η-arm along the δ-arm's precession axis, so
/// its geometric phase on the δ-arm is exactly 0 instead of continuous.
pub fn table1_special_etas() -> Vec<Angle> {
    vec![Angle::pi_fraction(1, 2), Angle::pi_fraction(3, 2)]
}

/// Class the reference pattern predicts at an η that is not a multiple of
/// π, `None` when any discrete class is allowed.
fn generic_expectation(g: GeometricPattern) -> Option<GeometricClass> {
    match g {
        GeometricPattern::Zero => Some(GeometricClass::DiscreteZero),
        GeometricPattern::AlternatingAtMultiplesOfPi => Some(GeometricClass::Continuous),
        _ => None,
    }
}

fn infer_dynamic(obs: &[(Angle, DynamicClass)]) -> DynamicPattern {
    if obs.iter().all(|(_, c)| *c == DynamicClass::Zero) {
        return DynamicPattern::Zero;
    }
    let alternating = obs.iter().all(|(eta, c)| match eta.pi_multiple(1e-12) {
        Some(_) => *c == DynamicClass::Zero,
        None => *c == DynamicClass::Continuous,
    });
    if alternating {
        DynamicPattern::ZeroAtMultiplesOfPi
    } else {
        DynamicPattern::Irregular
    }
}

fn infer_geometric(obs: &[(Angle, GeometricClass)]) -> GeometricPattern {
    use GeometricClass as G;
    let defined: Vec<_> = obs.iter().filter(|(_, c)| *c != G::Undefined).collect();
    if defined.iter().all(|(_, c)| *c == G::DiscreteZero) {
        return GeometricPattern::Zero;
    }
    let alternating = defined.iter().all(|(eta, c)| match eta.pi_multiple(1e-12) {
        Some(n) if n % 2 == 0 => *c == G::DiscreteZero,
        Some(_) => *c == G::DiscretePi,
        None => *c == G::Continuous,
    });
    if alternating {
        return GeometricPattern::AlternatingAtMultiplesOfPi;
    }
    if defined
        .iter()
        .all(|(_, c)| matches!(c, G::DiscreteZero | G::DiscretePi | G::DiscreteZeroOrPi))
    {
        return GeometricPattern::DiscreteZeroOrPi;
    }
    GeometricPattern::Irregular
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Table1Cell {
    pub family: BellKind,
    pub regime: Regime,
    pub location: Location,
    pub dynamic: DynamicPattern,
    pub geometric: GeometricPattern,
    pub expected_dynamic: DynamicPattern,
    pub expected_geometric: GeometricPattern,
    pub matches: bool,
    /// Closed-form expression shown next to the cell.
    pub annotation: &'static str,
}

/// Reference taxonomy: `(dynamic, geometric, annotation)` per cell.
pub fn table1_expected(
    family: BellKind,
    regime: Regime,
    location: Location,
) -> (DynamicPattern, GeometricPattern, &'static str) {
    use DynamicPattern as D;
    use GeometricPattern as G;
    match (family, regime, location) {
        (BellKind::Phi, _, _) => (D::Zero, G::Zero, "gamma = arg(cos^2(d/2)cos^2(e/2) + sin^2(d/2)sin^2(e/2)) = 0, D = 0"),
        (BellKind::Psi, _, Location::DeltaZero) => (D::Zero, G::Zero, "a(0, eta) >= 0, D = 0"),
        (BellKind::Psi, Regime::Maximal, Location::DeltaPositive) => {
            (D::Zero, G::DiscreteZeroOrPi, "gamma = arg(a(delta, eta) + i0), D = 0")
        }
        (BellKind::Psi, Regime::NoEntanglement, Location::DeltaPositive) => (
            D::ZeroAtMultiplesOfPi,
            G::AlternatingAtMultiplesOfPi,
            "gamma = atan(-/+ sin d sin e / (cos d + cos e)) -/+ 2 sin(e) d",
        ),
        (BellKind::Psi, Regime::Partial, Location::DeltaPositive) => (
            D::ZeroAtMultiplesOfPi,
            G::AlternatingAtMultiplesOfPi,
            "gamma = atan((p0-p1) sin d sin e / ((cos d + cos e) -/+ sqrt(p0 p1) sin e sin d)) + 2 sin(e)(p0-p1) d",
        ),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Report {
    pub etas: Vec<Angle>,
    pub delta_points: usize,
    pub cells: Vec<Table1Cell>,
    /// η values probed outside the pattern inference.
    pub special_etas: Vec<Angle>,
    pub exceptions: Vec<Table1Exception>,
}

/// A special-η point whose class departs from the generic-η prediction of
/// its cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Exception {
    pub state: BellFamilyState,
    pub eta: Angle,
    pub location: Location,
    pub observed: GeometricClass,
    pub predicted: GeometricClass,
}

impl Table1Report {
    pub fn all_match(&self) -> bool {
        self.cells.iter().all(|c| c.matches)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str("Geometric and dynamic phase taxonomy on the square ring\n");
        let etas: Vec<String> = self.etas.iter().map(|e| e.to_string()).collect();
        out.push_str(&format!(
            "eta scanned: {}; {} delta samples per arm\n",
            etas.join(", "),
            self.delta_points
        ));
        for family in [BellKind::Phi, BellKind::Psi] {
            out.push('\n');
            out.push_str(match family {
                BellKind::Phi => "|phi(0)> = sqrt(p0)|00> +/- sqrt(p1)|11>\n",
                BellKind::Psi => "|psi(0)> = +/-sqrt(p0)|10> + sqrt(p1)|01>\n",
            });
            for c in self.cells.iter().filter(|c| c.family == family) {
                let loc = match c.location {
                    Location::DeltaZero => "delta=0",
                    Location::DeltaPositive => "delta>0",
                };
                out.push_str(&format!(
                    "  {:<36} {:<8} dynamic: {:<40} geometric: {:<75} [{}]\n",
                    c.regime.label(),
                    loc,
                    c.dynamic.describe(),
                    c.geometric.describe(),
                    if c.matches { "ok" } else { "MISMATCH" }
                ));
                out.push_str(&format!("      {}\n", c.annotation));
            }
        }
        out.push_str(&format!(
            "\n{} of {} cells reproduced\n",
            self.cells.iter().filter(|c| c.matches).count(),
            self.cells.len()
        ));
        if !self.special_etas.is_empty() {
            let etas: Vec<String> = self.special_etas.iter().map(|e| e.to_string()).collect();
            out.push_str(&format!(
                "\nspecial eta ({}): {} exceptions to the generic-eta pattern\n",
                etas.join(", "),
                self.exceptions.len()
            ));
            for e in &self.exceptions {
                out.push_str(&format!(
                    "  {} eta={} {:?}: geometric {:?}, pattern predicts {:?}\n",
                    e.state, e.eta, e.location, e.observed, e.predicted
                ));
            }
        }
        out
    }
}

/// Runs the classification over every regime × location and compares the
/// inferred patterns with the reference taxonomy.
///
/// Points at `special` η are classified too and listed as exceptions where
/// they depart from what their cell predicts for a generic η.
pub fn table1_report(
    etas: &[Angle],
    special: &[Angle],
    delta_points: usize,
) -> Result<Table1Report> {
    let classify_all = |etas: &[Angle]| -> Result<Vec<(BellKind, Regime, PointClassification)>> {
        let mut jobs = Vec::new();
        for family in [BellKind::Phi, BellKind::Psi] {
            for regime in [Regime::NoEntanglement, Regime::Maximal, Regime::Partial] {
                for &p0 in regime.p0s() {
                    for sign in [Sign::Plus, Sign::Minus] {
                        let state = BellFamilyState::new(family, sign, p0)?;
                        debug_assert!(regime.matches(state.entanglement_class()));
                        for &eta in etas {
                            jobs.push((family, regime, state, eta));
                        }
                    }
                }
            }
        }
        jobs.par_iter()
            .map(|(f, r, s, e)| classify_point(s, *e, delta_points).map(|c| (*f, *r, c)))
            .collect()
    };
    let results = classify_all(etas)?;

    let mut exceptions = Vec::new();
    for (family, regime, c) in classify_all(special)? {
        for cell in [c.corner, c.delta_arm] {
            let (_, g, _) = table1_expected(family, regime, cell.location);
            if let Some(predicted) = generic_expectation(g) {
                if cell.geometric_class != predicted {
                    exceptions.push(Table1Exception {
                        state: c.state,
                        eta: c.eta,
                        location: cell.location,
                        observed: cell.geometric_class,
                        predicted,
                    });
                }
            }
        }
    }

    let mut cells = Vec::new();
    for family in [BellKind::Phi, BellKind::Psi] {
        for regime in [Regime::NoEntanglement, Regime::Maximal, Regime::Partial] {
            for location in [Location::DeltaZero, Location::DeltaPositive] {
                let pick = |c: &PointClassification| match location {
                    Location::DeltaZero => c.corner,
                    Location::DeltaPositive => c.delta_arm,
                };
                let obs: Vec<_> = results
                    .iter()
                    .filter(|(f, r, _)| *f == family && *r == regime)
                    .map(|(_, _, c)| (c.eta, pick(c)))
                    .collect();
                let dyn_obs: Vec<_> = obs.iter().map(|(e, c)| (*e, c.dynamic_class)).collect();
                let geo_obs: Vec<_> = obs.iter().map(|(e, c)| (*e, c.geometric_class)).collect();
                let dynamic = infer_dynamic(&dyn_obs);
                let geometric = infer_geometric(&geo_obs);
                let (expected_dynamic, expected_geometric, annotation) =
                    table1_expected(family, regime, location);
                cells.push(Table1Cell {
                    family,
                    regime,
                    location,
                    dynamic,
                    geometric,
                    expected_dynamic,
                    expected_geometric,
                    matches: dynamic == expected_dynamic && geometric == expected_geometric,
                    annotation,
                });
            }
        }
    }
    Ok(Table1Report {
        etas: etas.to_vec(),
        delta_points,
        cells,
        special_etas: special.to_vec(),
        exceptions,
    })
}

/// Exact total-phase value of the overlap for a Ψ-family point, exposed for
/// cross-checks against the matrix route.
pub fn psi_total_exact(delta: Angle, eta: Angle, p0: f64, sign: Sign) -> PhaseValue {
    let z = psi_overlap_exact(delta, eta, p0, sign);
    PhaseValue::from_overlap(z.re, z.im)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pi(n: i64, d: i64) -> Angle {
        Angle::pi_fraction(n, d)
    }

    fn psi(sign: Sign, p0: f64) -> BellFamilyState {
        BellFamilyState::psi(sign, p0).unwrap()
    }

    #[test]
    fn geometric_classes() {
        assert_eq!(
            classify_geometric(&[0.0, 1e-9, -1e-8]),
            GeometricClass::DiscreteZero
        );
        assert_eq!(
            classify_geometric(&[PI, -PI + 1e-9]),
            GeometricClass::DiscretePi
        );
        assert_eq!(
            classify_geometric(&[0.0, PI]),
            GeometricClass::DiscreteZeroOrPi
        );
        assert_eq!(classify_geometric(&[0.0, 0.3]), GeometricClass::Continuous);
        assert_eq!(classify_geometric(&[]), GeometricClass::Undefined);
    }

    #[test]
    fn phi_is_trivial_everywhere() {
        let st = BellFamilyState::phi(Sign::Plus, 0.3).unwrap();
        for eta in [pi(1, 2), pi(1, 1), Angle::from(2.2)] {
            let c = classify_point(&st, eta, 64).unwrap();
            for cell in [c.corner, c.delta_arm] {
                assert_eq!(cell.dynamic_class, DynamicClass::Zero);
                assert_eq!(cell.geometric_class, GeometricClass::DiscreteZero);
            }
        }
    }

    #[test]
    fn maximal_psi_switches_at_quarter_turn() {
        let c = classify_point(&psi(Sign::Plus, 0.5), pi(1, 2), 128).unwrap();
        assert_eq!(c.delta_arm.dynamic_class, DynamicClass::Zero);
        assert_eq!(
            c.delta_arm.geometric_class,
            GeometricClass::DiscreteZeroOrPi
        );
        let loci = find_switch_loci(&psi(Sign::Plus, 0.5), pi(1, 2)).unwrap();
        assert_eq!(loci.len(), 1);
        assert_eq!(loci[0].kind, LocusKind::SignChange);
        assert!((loci[0].delta_star - PI / 4.0).abs() < 1e-9);
        assert!(find_switch_loci(&psi(Sign::Minus, 0.5), pi(1, 2))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn unentangled_generic_eta_is_continuous() {
        let c = classify_point(&psi(Sign::Plus, 1.0), 0.7.into(), 128).unwrap();
        assert_eq!(c.delta_arm.dynamic_class, DynamicClass::Continuous);
        assert_eq!(c.delta_arm.geometric_class, GeometricClass::Continuous);
        assert_eq!(c.corner.dynamic_class, DynamicClass::Zero);
    }

    #[test]
    fn full_turn_has_only_a_touch() {
        let loci = find_switch_loci(&psi(Sign::Plus, 0.5), pi(2, 1)).unwrap();
        assert!(loci.iter().all(|l| l.kind == LocusKind::UndefinedTouch));
        assert_eq!(loci.len(), 1);
        assert!((loci[0].delta_star - PI).abs() < 1e-6);
    }

    #[test]
    fn half_turn_onsets_at_corner() {
        let loci = find_switch_loci(&psi(Sign::Plus, 0.5), pi(1, 1)).unwrap();
        assert_eq!(loci.len(), 1);
        assert_eq!(
            (loci[0].delta_star, loci[0].kind),
            (0.0, LocusKind::CornerOnset)
        );
    }

    #[test]
    fn printed_quarter_turn_locus_is_not_singular() {
        let loci = find_printed_switch_loci(pi(1, 2), Sign::Plus).unwrap();
        assert_eq!(loci.len(), 1);
        let d = loci[0].delta_star;
        assert!((2.0 * d.cos() - d.sin()).abs() < 1e-9);
        assert!((d - 2f64.atan()).abs() < 1e-9);
        assert!(loci[0].overlap > 0.1);
    }

    #[test]
    fn coloring_examples() {
        let c = arm_coloring(&psi(Sign::Plus, 0.5), pi(1, 1), 64).unwrap();
        assert!(c
            .arm(ArmId::Eta1)
            .segments
            .iter()
            .any(|s| s.color == SegmentColor::Zero));
        assert_eq!(c.arm(ArmId::Delta2).color_at(1.0), Some(SegmentColor::Pi));
        let c = arm_coloring(&psi(Sign::Minus, 0.5), pi(2, 1), 64).unwrap();
        for arm in &c.arms {
            assert!(arm
                .segments
                .iter()
                .all(|s| matches!(s.color, SegmentColor::Zero | SegmentColor::Undefined)));
        }
        let c = arm_coloring(
            &BellFamilyState::phi(Sign::Plus, 0.2).unwrap(),
            2.0.into(),
            64,
        )
        .unwrap();
        for arm in &c.arms {
            assert!(arm.segments.iter().all(|s| s.color == SegmentColor::Zero));
        }
    }

    #[test]
    fn sweep_rejects_bad_specs() {
        let mut spec = SweepSpec {
            family: BellKind::Psi,
            sign: Sign::Plus,
            p0s: vec![0.5],
            etas: vec![pi(1, 1)],
            delta_points: 8,
            engine: Engine::Oracle,
        };
        assert!(run_sweep(&spec).is_ok());
        spec.delta_points = 1;
        assert!(run_sweep(&spec).is_err());
        spec.delta_points = 8;
        spec.etas = vec![Angle::ZERO];
        assert!(run_sweep(&spec).is_err());
        spec.etas = vec![pi(1, 1)];
        spec.p0s = vec![2.0];
        assert!(run_sweep(&spec).is_err());
    }

    #[test]
    fn sweep_csv_header_and_order() {
        let spec = SweepSpec {
            family: BellKind::Psi,
            sign: Sign::Minus,
            p0s: vec![0.5, 1.0],
            etas: vec![pi(1, 1), pi(1, 2)],
            delta_points: 4,
            engine: Engine::Both,
        };
        let rows = run_sweep(&spec).unwrap();
        assert_eq!(rows.len(), 2 * 2 * 2 * 4);
        assert_eq!((rows[0].p0, rows[0].engine), (0.5, Engine::Oracle));
        assert_eq!(rows[4].engine, Engine::Closed);
        let csv = sweep_csv(&rows).unwrap();
        assert!(csv.starts_with(
            "family,sign,p0,eta,delta,total,dynamic_oracle,dynamic_printed,geometric,defined,overlap,engine\n"
        ));
        assert_eq!(csv.lines().count(), rows.len() + 1);
    }
}
