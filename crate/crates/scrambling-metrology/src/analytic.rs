//! Closed-form information matrices and asymptotic sloppiness series for the
//! four probe/scrambler combinations.
//!
//! The expressions here were obtained by normal-ordering the Heisenberg-
//! picture generators and taking moments in the probe state; they are exact
//! in `gamma` (polynomial for coherent probes, hyperbolic-polynomial for
//! squeezed ones) and serve as the analytic engine. The numeric engine in
//! [`crate::model`] reproduces them to near machine precision, which is
//! exercised continuously by the cross-check tooling.

use crate::error::{Error, Result};
use crate::fock::ProbeKind;
use crate::model::InfoMatrices;

// ---------------------------------------------------------------------------
// case identifiers
// ---------------------------------------------------------------------------

/// One of the four studied combinations of probe family and scrambling order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CaseId {
    pub probe: ProbeKind,
    pub m: u8,
}

impl CaseId {
    pub const SQUEEZED_CUBIC: CaseId = CaseId {
        probe: ProbeKind::SqueezedVacuum,
        m: 3,
    };
    pub const SQUEEZED_QUADRATIC: CaseId = CaseId {
        probe: ProbeKind::SqueezedVacuum,
        m: 2,
    };
    pub const COHERENT_CUBIC: CaseId = CaseId {
        probe: ProbeKind::Coherent,
        m: 3,
    };
    pub const COHERENT_QUADRATIC: CaseId = CaseId {
        probe: ProbeKind::Coherent,
        m: 2,
    };
    pub const ALL: [CaseId; 4] = [
        Self::SQUEEZED_CUBIC,
        Self::SQUEEZED_QUADRATIC,
        Self::COHERENT_CUBIC,
        Self::COHERENT_QUADRATIC,
    ];

    pub fn new(probe: ProbeKind, m: u8) -> Result<Self> {
        if !(2..=3).contains(&m) {
            return Err(Error::InvalidInput(format!(
                "scrambling order must be 2 or 3 (got {m})"
            )));
        }
        Ok(Self { probe, m })
    }

    pub fn label(&self) -> &'static str {
        match (self.probe, self.m) {
            (ProbeKind::SqueezedVacuum, 3) => "squeezed-cubic",
            (ProbeKind::SqueezedVacuum, _) => "squeezed-quadratic",
            (ProbeKind::Coherent, 3) => "coherent-cubic",
            (ProbeKind::Coherent, _) => "coherent-quadratic",
        }
    }

    pub fn is_quadratic(&self) -> bool {
        self.m == 2
    }
}

impl std::fmt::Display for CaseId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "squeezed-cubic" | "sq3" => Ok(Self::SQUEEZED_CUBIC),
            "squeezed-quadratic" | "sq2" => Ok(Self::SQUEEZED_QUADRATIC),
            "coherent-cubic" | "ch3" => Ok(Self::COHERENT_CUBIC),
            "coherent-quadratic" | "ch2" => Ok(Self::COHERENT_QUADRATIC),
            other => Err(Error::InvalidInput(format!(
                "unknown case {other:?}; expected one of squeezed-cubic, \
                 squeezed-quadratic, coherent-cubic, coherent-quadratic"
            ))),
        }
    }
}

impl serde::Serialize for CaseId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl<'de> serde::Deserialize<'de> for CaseId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// closed-form information matrices
// ---------------------------------------------------------------------------

fn check_point(nbar: f64, gamma: f64) -> Result<()> {
    if !nbar.is_finite() || nbar < 0.0 {
        return Err(Error::InvalidInput(format!(
            "mean photon number must be finite and >= 0 (got {nbar})"
        )));
    }
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::InvalidInput(format!(
            "gamma must be finite and >= 0 (got {gamma})"
        )));
    }
    Ok(())
}

/// Exact information matrices for `case` at mean photon number `nbar`,
/// scrambling strength `gamma` and signal phase `phi1`.
///
/// The signal phase is the angle of the coherent amplitude
/// (`alpha = sqrt(nbar) e^{i phi1}`) or of the squeezing parameter — either
/// imprinted at preparation or, equivalently, accumulated in the first
/// interferometer arm: only the combination matters, which is also why the
/// second phase never appears below.
pub fn analytic_info(case: CaseId, nbar: f64, gamma: f64, phi1: f64) -> Result<InfoMatrices> {
    check_point(nbar, gamma)?;
    if !phi1.is_finite() {
        return Err(Error::InvalidInput("phi1 must be finite".into()));
    }
    let g = gamma;
    let p = phi1;
    let (q11, q12, q22, d12) = match (case.probe, case.m) {
        (ProbeKind::SqueezedVacuum, 3) => {
            let r = nbar.sqrt().asinh();
            let (ch, sh) = (r.cosh(), r.sinh());
            let (c2, s2) = ((2.0 * r).cosh(), (2.0 * r).sinh());
            let (c4, s4) = ((4.0 * r).cosh(), (4.0 * r).sinh());
            let (c6, c8) = ((6.0 * r).cosh(), (8.0 * r).cosh());
            let q11 = 8.0 * ch * ch * sh * sh;
            let q22 = 0.5
                * (2.0 * (-1.0 + 4374.0 * g.powi(4) + c4)
                    + 9.0
                        * g
                        * g
                        * (5.0 * c2
                            + 51.0 * c6
                            + 108.0
                                * g
                                * g
                                * (20.0 * c4
                                    + 35.0 * c8
                                    + 128.0 * (4.0 * p).cos() * ch.powi(4) * sh.powi(4))
                            - 41.0 * p.cos() * s2
                            - 3.0
                                * p.cos()
                                * (37.0 * c4 + 576.0 * g * g * (9.0 * c2 + 7.0 * c6))
                                * s2
                            + 12.0
                                * (2.0 * p).cos()
                                * (-c2 + 144.0 * g * g * (5.0 + 7.0 * c4))
                                * s2
                                * s2
                            + 6.0 * (3.0 * p).cos() * (5.0 - 1152.0 * g * g * c2) * s2.powi(3)));
            let q12 = 2.0
                * s2
                * (s2 + 27.0 * g * g * (-4.0 * p.cos() * c4 + (3.0 + (2.0 * p).cos()) * s4));
            let d12 = 216.0 * g * g * p.sin() * s2 * (c2 - p.cos() * s2);
            (q11, q12, q22, d12)
        }
        (ProbeKind::SqueezedVacuum, _) => {
            let r = nbar.sqrt().asinh();
            let (ch, sh) = (r.cosh(), r.sinh());
            let (c2, s2) = ((2.0 * r).cosh(), (2.0 * r).sinh());
            let (c4, s4) = ((4.0 * r).cosh(), (4.0 * r).sinh());
            let q11 = 8.0 * ch * ch * sh * sh;
            let q22 = 4.0
                * (-0.25
                    + 2.0 * g * g
                    + 8.0 * g.powi(4)
                    + (0.25 + 6.0 * g * g + 24.0 * g.powi(4)) * c4
                    + 4.0
                        * g
                        * g
                        * ((-1.0 + 4.0 * g * g) * (2.0 * p).cos() - 4.0 * g * (2.0 * p).sin())
                        * s2
                        * s2
                    - 2.0 * g * (1.0 + 8.0 * g * g) * (2.0 * g * p.cos() - p.sin()) * s4);
            let q12 =
                2.0 * s2 * (4.0 * g * c2 * (-2.0 * g * p.cos() + p.sin()) + (1.0 + 8.0 * g * g) * s2);
            let d12 = 8.0 * g * (p.cos() + 2.0 * g * p.sin()) * s2;
            (q11, q12, q22, d12)
        }
        (ProbeKind::Coherent, 3) => {
            let a = nbar.sqrt();
            let (a2, a3, a4, a5, a6) = (nbar, a.powi(3), a.powi(4), a.powi(5), a.powi(6));
            let q11 = 4.0 * a2;
            let q12 = 4.0
                * (a2 - 3.0 * g * (3.0 * a3 * (3.0 * p).sin() + (3.0 * a3 + a) * p.sin())
                    + 9.0
                        * g
                        * g
                        * (4.0 * a4 * (4.0 * p).cos()
                            + (16.0 * a4 + 12.0 * a2) * (2.0 * p).cos()
                            + 12.0 * a4
                            + 12.0 * a2));
            let q22 = 4.0
                * (a2 - 3.0 * g * (6.0 * a3 * (3.0 * p).sin() + (6.0 * a3 + 2.0 * a) * p.sin())
                    + 9.0
                        * g
                        * g
                        * (2.0 * a4 * (4.0 * p).cos()
                            + (40.0 * a4 + 40.0 * a2) * (2.0 * p).cos()
                            + 38.0 * a4
                            + 48.0 * a2
                            + 7.0)
                    - 27.0
                        * g.powi(3)
                        * (32.0 * a5 * (5.0 * p).sin()
                            + (96.0 * a5 + 144.0 * a3) * (3.0 * p).sin()
                            + (64.0 * a5 + 144.0 * a3 + 48.0 * a) * p.sin())
                    + 81.0
                        * g.powi(4)
                        * (32.0 * a6 * (6.0 * p).cos()
                            + (192.0 * a6 + 336.0 * a4) * (4.0 * p).cos()
                            + (480.0 * a6 + 1344.0 * a4 + 768.0 * a2) * (2.0 * p).cos()
                            + 320.0 * a6
                            + 1008.0 * a4
                            + 768.0 * a2
                            + 96.0));
            let d12 = -4.0
                * (3.0 * g * (3.0 * a3 * (3.0 * p).cos() + (a3 + a) * p.cos())
                    + 9.0
                        * g
                        * g
                        * (4.0 * a4 * (4.0 * p).sin() + (8.0 * a4 + 12.0 * a2) * (2.0 * p).sin()));
            (q11, q12, q22, d12)
        }
        (ProbeKind::Coherent, _) => {
            let a2 = nbar;
            let q11 = 4.0 * a2;
            let q12 = 4.0
                * (a2 - 4.0 * g * a2 * (2.0 * p).sin()
                    + 8.0 * g * g * (a2 * (2.0 * p).cos() + a2));
            let q22 = 4.0
                * (a2 - 8.0 * g * a2 * (2.0 * p).sin()
                    + 8.0 * g * g * (2.0 * a2 * (2.0 * p).cos() + 4.0 * a2 + 1.0)
                    - 16.0 * g.powi(3) * (4.0 * a2 * (2.0 * p).sin())
                    + 16.0 * g.powi(4) * (8.0 * a2 * (2.0 * p).cos() + 8.0 * a2 + 2.0));
            let d12 = -16.0 * a2 * g * ((2.0 * p).cos() + 2.0 * g * (2.0 * p).sin());
            (q11, q12, q22, d12)
        }
    };
    Ok(InfoMatrices {
        q11,
        q12,
        q22,
        d12,
        raw_asymmetry: 0.0,
    })
}

// ---------------------------------------------------------------------------
// closed-form sloppiness for quadratic scrambling
// ---------------------------------------------------------------------------

/// Exact sloppiness `S = 1 / det Q` for the two quadratic cases, in the
/// compact factored form. At `gamma = 0` (or a phase that annihilates the
/// determinant) the model is degenerate and the sloppiness is infinite.
pub fn sloppiness_closed_quadratic(
    case: CaseId,
    nbar: f64,
    gamma: f64,
    phi1: f64,
) -> Result<f64> {
    check_point(nbar, gamma)?;
    if case.m != 2 {
        return Err(Error::InvalidInput(format!(
            "closed-form sloppiness covers quadratic scrambling only (got {})",
            case.label()
        )));
    }
    let g = gamma;
    let p = phi1;
    let denom = match case.probe {
        ProbeKind::SqueezedVacuum => {
            256.0 * g * g * nbar * (1.0 + nbar) * (p.cos() + 2.0 * g * p.sin()).powi(2)
        }
        ProbeKind::Coherent => {
            128.0
                * g
                * g
                * nbar
                * ((1.0 + nbar) * (1.0 + 4.0 * g * g)
                    + nbar * ((1.0 - 4.0 * g * g) * (4.0 * p).cos() + 4.0 * g * (4.0 * p).sin()))
        }
    };
    Ok(if denom <= 0.0 { f64::INFINITY } else { denom.recip() })
}

/// Sloppiness-minimizing signal phase for quadratic scrambling:
/// `arctan(2 gamma)` for the squeezed probe and the continuous branch of
/// `(1/4) arctan(4 gamma / (1 - 4 gamma^2))` for the coherent one.
pub fn optimal_phase_quadratic(case: CaseId, gamma: f64) -> Result<f64> {
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::InvalidInput(format!(
            "gamma must be finite and >= 0 (got {gamma})"
        )));
    }
    if case.m != 2 {
        return Err(Error::InvalidInput(format!(
            "closed-form optimal phase covers quadratic scrambling only (got {})",
            case.label()
        )));
    }
    Ok(match case.probe {
        ProbeKind::SqueezedVacuum => (2.0 * gamma).atan(),
        // atan2 keeps the branch continuous through gamma = 1/2, where the
        // plain arctan would jump; the result grows from 0 towards pi/4.
        ProbeKind::Coherent => 0.25 * (4.0 * gamma).atan2(1.0 - 4.0 * gamma * gamma),
    })
}

// ---------------------------------------------------------------------------
// asymptotic series
// ---------------------------------------------------------------------------

/// Coefficients of the two asymptotic regimes of the sloppiness:
/// `S ~ 1/(f gamma^2) - g` for weak scrambling and `S ~ 1/(kappa gamma^4)`
/// for strong scrambling.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct AsymptoticCoefficients {
    pub f: f64,
    pub g: f64,
    pub kappa: f64,
}

/// Asymptotic coefficients for `case` at mean photon number `nbar`.
///
/// Reference phases (the series describe `S` at a fixed signal phase, not
/// always at the per-`gamma` optimum):
///
/// * quadratic cases — weak- and strong-scrambling series both describe the
///   phase-optimized sloppiness;
/// * squeezed cubic — the weak series describes `phi1 = pi/2`; the true
///   optimum lies at a nearby phase and is lower by a modest factor
///   (about 17% at `nbar = 1`). The strong series does describe the optimum.
/// * coherent cubic — both series describe `phi1 = 0`; the optimized value
///   drifts slightly below this for large `gamma` (about 2% at `nbar = 2`).
pub fn asymptotic_coefficients(case: CaseId, nbar: f64) -> Result<AsymptoticCoefficients> {
    check_point(nbar, 0.0)?;
    if nbar == 0.0 {
        return Err(Error::InvalidInput(
            "asymptotic coefficients require nbar > 0".into(),
        ));
    }
    let n = nbar;
    Ok(match (case.probe, case.m) {
        (ProbeKind::SqueezedVacuum, 3) => {
            let poly = 7.0 + 60.0 * n * (1.0 + n);
            let kappa_core = 1.0
                + 8.0 * (n * (1.0 + n)).sqrt()
                + 80.0 * (n.powi(3) * (1.0 + n)).sqrt()
                + 192.0 * (n.powi(5) * (1.0 + n)).sqrt()
                + 128.0 * (n.powi(7) * (1.0 + n)).sqrt()
                + 32.0 * n * (1.0 + n) * (1.0 + 2.0 * n).powi(2);
            AsymptoticCoefficients {
                f: 288.0 * n * (1.0 + n) * (1.0 + 2.0 * n) * poly,
                g: 3.0 * (1.0 + n + n * n) / (n * (1.0 + n) * poly * poly),
                kappa: 62208.0 * n * (1.0 + n) * kappa_core,
            }
        }
        (ProbeKind::SqueezedVacuum, _) => AsymptoticCoefficients {
            f: 256.0 * n * (1.0 + n),
            g: 1.0 / (64.0 * n * (1.0 + n)),
            kappa: 1024.0 * n * (1.0 + n),
        },
        (ProbeKind::Coherent, 3) => {
            let poly = 7.0 + 8.0 * n * (5.0 + 2.0 * n);
            AsymptoticCoefficients {
                f: 144.0 * n * poly,
                g: 6.0 * (1.0 + 2.0 * n * (5.0 + 6.0 * n)) / (n * poly * poly),
                kappa: 124416.0 * n * (1.0 + 2.0 * n * (5.0 + 6.0 * n)),
            }
        }
        (ProbeKind::Coherent, _) => AsymptoticCoefficients {
            f: 128.0 * n * (1.0 + 2.0 * n),
            g: 1.0 / (32.0 * n * (1.0 + 2.0 * n)),
            kappa: 512.0 * n,
        },
    })
}

/// Weak-scrambling expansion `S ~ 1/(f gamma^2) - g`; see
/// [`asymptotic_coefficients`] for the reference phase of each case.
/// Diverges as `gamma -> 0` — the two phases become indistinguishable.
pub fn sloppiness_series_small_gamma(case: CaseId, nbar: f64, gamma: f64) -> Result<f64> {
    check_point(nbar, gamma)?;
    let c = asymptotic_coefficients(case, nbar)?;
    Ok(if gamma == 0.0 {
        f64::INFINITY
    } else {
        (c.f * gamma * gamma).recip() - c.g
    })
}

/// Strong-scrambling expansion `S ~ 1/(kappa gamma^4)`; see
/// [`asymptotic_coefficients`] for the reference phase of each case.
pub fn sloppiness_series_large_gamma(case: CaseId, nbar: f64, gamma: f64) -> Result<f64> {
    check_point(nbar, gamma)?;
    let c = asymptotic_coefficients(case, nbar)?;
    if gamma == 0.0 {
        return Err(Error::InvalidInput(
            "strong-scrambling series needs gamma > 0".into(),
        ));
    }
    Ok((c.kappa * gamma.powi(4)).recip())
}

/// Strong-scrambling limit of the per-phase precision floor, `1/Q11`:
/// `1/(8 nbar (1+nbar))` for squeezed probes, `1/(4 nbar)` for coherent
/// ones, independent of the scrambling order.
pub fn limit_bounds_large_gamma(probe: ProbeKind, nbar: f64) -> Result<f64> {
    check_point(nbar, 0.0)?;
    if nbar == 0.0 {
        return Err(Error::InvalidInput(
            "the limiting bound requires nbar > 0".into(),
        ));
    }
    Ok(match probe {
        ProbeKind::SqueezedVacuum => 1.0 / (8.0 * nbar * (1.0 + nbar)),
        ProbeKind::Coherent => 1.0 / (4.0 * nbar),
    })
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------

#[cfg(test)]
// Reference values are frozen verbatim from an independent high-precision
// implementation; keep every digit they came with.
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    // Frozen from an independent high-precision implementation of the same
    // moment algebra. Layout per row: (nbar, gamma, phi1, [q11, q12, q22, d12]).
    type Row = (f64, f64, f64, [f64; 4]);

    const SQ3_TABLE: [Row; 4] = [
        (0.5, 0.3, 0.0, [6.0, 3.5825261060271951, 8.5408465692825359, 0.0]),
        (
            1.0,
            0.5,
            0.9,
            [
                1.5999999999999996e1,
                1.9876518398160198e2,
                5.9058033111858931e3,
                1.4857337048521489e2,
            ],
        ),
        (
            2.0,
            1.7,
            2.6,
            [
                4.8000000000000021e1,
                2.5836296973667128e5,
                1.8599727074048979e9,
                1.4500226941659545e4,
            ],
        ),
        (
            0.7,
            0.05,
            5.1,
            [
                9.5200000000000014,
                1.1885629728763012e1,
                2.5117959666348238e1,
                -1.7182974134961657,
            ],
        ),
    ];

    const SQ2_TABLE: [Row; 4] = [
        (0.5, 0.3, 0.0, [6.0, 5.3316936742016345, 7.6178262392536205, 4.1569219381653060]),
        (
            1.0,
            0.5,
            0.9,
            [
                16.0,
                5.3488855001575402e1,
                1.9460688163324787e2,
                1.5895046296013389e1,
            ],
        ),
        (
            2.0,
            1.7,
            2.6,
            [
                48.0,
                2.3000392379501686e3,
                1.1028630758775644e5,
                5.9684739271603789e1,
            ],
        ),
        (
            0.7,
            0.05,
            5.1,
            [9.52, 7.6921399912097810, 6.2217490285160313, 2.4906446375153071e-1],
        ),
    ];

    const CH3_TABLE: [Row; 4] = [
        (0.5, 0.3, 0.0, [2.0, 6.6800000000000011e1, 4.5990416000000014e3, -7.6367532368147133]),
        (
            1.0,
            0.5,
            0.9,
            [
                4.0,
                1.0396908547404421e2,
                2.0224448322092932e4,
                -1.5054785866240132e2,
            ],
        ),
        (
            2.0,
            1.7,
            2.6,
            [
                8.0,
                1.0577603980951553e4,
                3.0090233733900663e7,
                6.5900758477921954e3,
            ],
        ),
        (
            0.7,
            0.05,
            5.1,
            [2.8, 4.0673199931515134, 8.8365061473283504, 1.2447688891893827],
        ),
    ];

    const CH2_TABLE: [Row; 4] = [
        (0.5, 0.3, 0.0, [2.0, 4.88, 1.8704e1, -2.4]),
        (
            1.0,
            0.5,
            0.9,
            [4.0, 2.3916021954297424, 2.6349613172578451e1, -5.9731642894808648],
        ),
        (
            2.0,
            1.7,
            2.6,
            [
                8.0,
                3.2767677679489412e2,
                1.6960676512585691e4,
                1.3791646620325903e2,
            ],
        ),
        (
            0.7,
            0.05,
            5.1,
            [2.8, 3.2079309485388605, 3.8249791350192757, 4.3918174764047058e-1],
        ),
    ];

    fn check_table(case: CaseId, table: &[Row]) {
        for (nbar, gamma, phi1, want) in table {
            let info = analytic_info(case, *nbar, *gamma, *phi1).unwrap();
            let scale = 1.0f64.max(want[0].abs()).max(want[2].abs());
            for (got, want) in [info.q11, info.q12, info.q22, info.d12].iter().zip(want) {
                let rel = (got - want).abs() / (want.abs() + 1e-6 * scale);
                assert!(
                    rel <= 1e-11,
                    "{case} at ({nbar}, {gamma}, {phi1}): got {got}, want {want}, rel {rel:.2e}"
                );
            }
        }
    }

    #[test]
    fn squeezed_cubic_matches_frozen_values() {
        check_table(CaseId::SQUEEZED_CUBIC, &SQ3_TABLE);
    }

    #[test]
    fn squeezed_quadratic_matches_frozen_values() {
        check_table(CaseId::SQUEEZED_QUADRATIC, &SQ2_TABLE);
    }

    #[test]
    fn coherent_cubic_matches_frozen_values() {
        check_table(CaseId::COHERENT_CUBIC, &CH3_TABLE);
    }

    #[test]
    fn coherent_quadratic_matches_frozen_values() {
        check_table(CaseId::COHERENT_QUADRATIC, &CH2_TABLE);
    }

    #[test]
    fn closed_quadratic_sloppiness_equals_inverse_determinant() {
        for case in [CaseId::SQUEEZED_QUADRATIC, CaseId::COHERENT_QUADRATIC] {
            for (nbar, gamma, phi1) in [
                (0.5, 0.3, 0.0),
                (1.0, 0.5, 0.9),
                (2.0, 1.7, 2.6),
                (0.7, 0.05, 5.1),
                (1.0, 3.0, 1.2),
            ] {
                let info = analytic_info(case, nbar, gamma, phi1).unwrap();
                let closed = sloppiness_closed_quadratic(case, nbar, gamma, phi1).unwrap();
                let direct = 1.0 / info.det_q();
                let rel = (closed - direct).abs() / direct.abs();
                assert!(
                    rel <= 1e-9,
                    "{case} at ({nbar}, {gamma}, {phi1}): closed {closed}, det {direct}"
                );
            }
        }
    }

    #[test]
    fn closed_quadratic_diverges_without_scrambling() {
        let s = sloppiness_closed_quadratic(CaseId::SQUEEZED_QUADRATIC, 1.0, 0.0, 0.3).unwrap();
        assert!(s.is_infinite());
    }

    #[test]
    fn closed_quadratic_rejects_cubic_cases() {
        assert!(sloppiness_closed_quadratic(CaseId::SQUEEZED_CUBIC, 1.0, 0.5, 0.0).is_err());
        assert!(optimal_phase_quadratic(CaseId::COHERENT_CUBIC, 0.5).is_err());
    }

    #[test]
    fn quadratic_optimal_phase_minimizes_closed_form() {
        for case in [CaseId::SQUEEZED_QUADRATIC, CaseId::COHERENT_QUADRATIC] {
            for gamma in [0.05, 0.3, 0.5, 0.9, 2.0] {
                let star = optimal_phase_quadratic(case, gamma).unwrap();
                let best = sloppiness_closed_quadratic(case, 1.0, gamma, star).unwrap();
                for k in 1..=200 {
                    let p = 2.0 * std::f64::consts::PI * k as f64 / 201.0;
                    let s = sloppiness_closed_quadratic(case, 1.0, gamma, star + p).unwrap();
                    assert!(
                        s >= best * (1.0 - 1e-9),
                        "{case} gamma={gamma}: S({p:.3}) = {s} below S* = {best}"
                    );
                }
            }
        }
    }

    #[test]
    fn coherent_optimal_phase_branch_is_continuous() {
        // the arctan argument blows up at gamma = 1/2; the branch must not jump
        let mut prev = optimal_phase_quadratic(CaseId::COHERENT_QUADRATIC, 0.40).unwrap();
        for k in 1..=40 {
            let gamma = 0.40 + 0.005 * k as f64;
            let cur = optimal_phase_quadratic(CaseId::COHERENT_QUADRATIC, gamma).unwrap();
            assert!(
                (cur - prev).abs() < 0.02,
                "jump at gamma={gamma}: {prev} -> {cur}"
            );
            prev = cur;
        }
        assert!(prev < std::f64::consts::FRAC_PI_4);
    }

    #[test]
    fn weak_scrambling_series_tracks_reference_phase() {
        // reference phases: pi/2 (squeezed cubic), 0 (coherent cubic),
        // closed-form optimum (quadratic cases)
        let gamma = 1e-3;
        for nbar in [0.5, 1.0, 2.0] {
            let series =
                sloppiness_series_small_gamma(CaseId::SQUEEZED_CUBIC, nbar, gamma).unwrap();
            let info = analytic_info(
                CaseId::SQUEEZED_CUBIC,
                nbar,
                gamma,
                std::f64::consts::FRAC_PI_2,
            )
            .unwrap();
            let rel = (series - 1.0 / info.det_q()).abs() * info.det_q();
            assert!(rel <= 1e-7, "squeezed cubic nbar={nbar}: rel {rel:.2e}");

            let series =
                sloppiness_series_small_gamma(CaseId::COHERENT_CUBIC, nbar, gamma).unwrap();
            let info = analytic_info(CaseId::COHERENT_CUBIC, nbar, gamma, 0.0).unwrap();
            let rel = (series - 1.0 / info.det_q()).abs() * info.det_q();
            assert!(rel <= 1e-6, "coherent cubic nbar={nbar}: rel {rel:.2e}");

            for case in [CaseId::SQUEEZED_QUADRATIC, CaseId::COHERENT_QUADRATIC] {
                let series = sloppiness_series_small_gamma(case, nbar, gamma).unwrap();
                let star = optimal_phase_quadratic(case, gamma).unwrap();
                let exact = sloppiness_closed_quadratic(case, nbar, gamma, star).unwrap();
                let rel = (series - exact).abs() / exact;
                assert!(rel <= 1e-6, "{case} nbar={nbar}: rel {rel:.2e}");
            }
        }
    }

    #[test]
    fn strong_scrambling_series_tracks_reference_phase() {
        let gamma = 1e3;
        for nbar in [0.5, 1.0, 2.0] {
            // squeezed cubic: series describes the phase optimum; scan for it
            let series =
                sloppiness_series_large_gamma(CaseId::SQUEEZED_CUBIC, nbar, gamma).unwrap();
            let mut best = f64::INFINITY;
            for k in 0..20000 {
                let p = 2.0 * std::f64::consts::PI * k as f64 / 20000.0;
                let info = analytic_info(CaseId::SQUEEZED_CUBIC, nbar, gamma, p).unwrap();
                let det = info.det_q();
                if det > 1e-10 * (info.q11 * info.q22).abs() {
                    best = best.min(1.0 / det);
                }
            }
            let rel = (series - best).abs() / best;
            assert!(rel <= 1e-6, "squeezed cubic nbar={nbar}: rel {rel:.2e}");

            let series =
                sloppiness_series_large_gamma(CaseId::COHERENT_CUBIC, nbar, gamma).unwrap();
            let info = analytic_info(CaseId::COHERENT_CUBIC, nbar, gamma, 0.0).unwrap();
            let rel = (series - 1.0 / info.det_q()).abs() * info.det_q();
            assert!(rel <= 1e-6, "coherent cubic nbar={nbar}: rel {rel:.2e}");

            let series =
                sloppiness_series_large_gamma(CaseId::SQUEEZED_QUADRATIC, nbar, gamma).unwrap();
            let star = optimal_phase_quadratic(CaseId::SQUEEZED_QUADRATIC, gamma).unwrap();
            let exact =
                sloppiness_closed_quadratic(CaseId::SQUEEZED_QUADRATIC, nbar, gamma, star)
                    .unwrap();
            let rel = (series - exact).abs() / exact;
            assert!(rel <= 1e-5, "squeezed quadratic nbar={nbar}: rel {rel:.2e}");

            let series =
                sloppiness_series_large_gamma(CaseId::COHERENT_QUADRATIC, nbar, gamma).unwrap();
            let info = analytic_info(CaseId::COHERENT_QUADRATIC, nbar, gamma, 0.0).unwrap();
            let rel = (series - 1.0 / info.det_q()).abs() * info.det_q();
            assert!(rel <= 1e-5, "coherent quadratic nbar={nbar}: rel {rel:.2e}");
        }
    }

    #[test]
    fn limiting_bounds() {
        assert!((limit_bounds_large_gamma(ProbeKind::SqueezedVacuum, 1.0).unwrap() - 1.0 / 16.0)
            .abs()
            <= 1e-15);
        assert!((limit_bounds_large_gamma(ProbeKind::Coherent, 1.0).unwrap() - 0.25).abs() <= 1e-15);
        assert!(limit_bounds_large_gamma(ProbeKind::Coherent, 0.0).is_err());
    }

    #[test]
    fn case_labels_round_trip() {
        for case in CaseId::ALL {
            let parsed: CaseId = case.label().parse().unwrap();
            assert_eq!(parsed, case);
        }
        assert_eq!("sq3".parse::<CaseId>().unwrap(), CaseId::SQUEEZED_CUBIC);
        assert!("octic".parse::<CaseId>().is_err());
        assert!(CaseId::new(ProbeKind::Coherent, 5).is_err());
    }

    #[test]
    fn input_validation() {
        assert!(analytic_info(CaseId::SQUEEZED_CUBIC, -1.0, 0.5, 0.0).is_err());
        assert!(analytic_info(CaseId::SQUEEZED_CUBIC, 1.0, -0.5, 0.0).is_err());
        assert!(analytic_info(CaseId::SQUEEZED_CUBIC, 1.0, f64::NAN, 0.0).is_err());
    }
}
