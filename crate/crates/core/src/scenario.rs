//! Experiment configuration: link parameters, unit conversions, the
//! oscillator technology catalog, and the scenario file format.
//!
//! Conventions baked in here:
//!
//! * Es/σw² is accepted in dB and normalized to Es = 1,
//!   σw² = 10^(−SNR_dB/10); only the ratio enters any formula.
//! * Velocities are accepted in km/h in configs and stored in m/s.
//! * The Doppler formula uses c = 3×10⁸ m/s.
//!
//! All types are immutable after construction and safe to share across
//! concurrent workers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Propagation constant of the Doppler formula, m/s.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Full configuration of one block-transmission experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkScenario {
    /// Block length K, symbols.
    pub block_len: usize,
    /// Symbol energy, linear (normalized to 1 by the config loader).
    pub es: f64,
    /// AWGN variance, linear.
    pub sigma2_w: f64,
    /// Center frequency, Hz.
    pub f0_hz: f64,
    /// System bandwidth BW = 1/Ts, Hz.
    pub bw_hz: f64,
    /// Relative transmitter/receiver speed, m/s.
    pub velocity_mps: f64,
}

impl LinkScenario {
    pub fn new(
        block_len: usize,
        es: f64,
        sigma2_w: f64,
        f0_hz: f64,
        bw_hz: f64,
        velocity_mps: f64,
    ) -> Result<Self> {
        let check = |key: &str, ok: bool, reason: &str| -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidValue {
                    key: key.into(),
                    reason: reason.into(),
                })
            }
        };
        check("K", block_len >= 1, "block length must be >= 1")?;
        check("es", es > 0.0 && es.is_finite(), "symbol energy must be > 0")?;
        check(
            "sigma2_w",
            sigma2_w > 0.0 && sigma2_w.is_finite(),
            "AWGN variance must be > 0",
        )?;
        check("f0_hz", f0_hz > 0.0 && f0_hz.is_finite(), "center frequency must be > 0")?;
        check("bw_hz", bw_hz > 0.0 && bw_hz.is_finite(), "bandwidth must be > 0")?;
        check(
            "v_kmh",
            velocity_mps >= 0.0 && velocity_mps.is_finite(),
            "velocity must be >= 0",
        )?;
        let snr = es / sigma2_w;
        check("es_over_sigma2w_db", snr.is_finite() && snr > 0.0, "Es/σw² must be finite")?;
        Ok(Self {
            block_len,
            es,
            sigma2_w,
            f0_hz,
            bw_hz,
            velocity_mps,
        })
    }

    /// Builds a scenario from ratio-form parameters: SNR in dB with Es
    /// normalized to 1, velocity in km/h.
    pub fn from_db(
        block_len: usize,
        es_over_sigma2w_db: f64,
        f0_hz: f64,
        bw_hz: f64,
        v_kmh: f64,
    ) -> Result<Self> {
        Self::new(
            block_len,
            1.0,
            10f64.powf(-es_over_sigma2w_db / 10.0),
            f0_hz,
            bw_hz,
            kmh_to_mps(v_kmh),
        )
    }

    /// Es/σw², linear.
    pub fn snr_awgn(&self) -> f64 {
        self.es / self.sigma2_w
    }

    /// Maximum Doppler frequency of this scenario, Hz.
    pub fn doppler_hz(&self) -> f64 {
        doppler_frequency(self.velocity_mps, self.f0_hz)
    }

    /// Copy with a different center frequency and bandwidth (sweep helper).
    pub fn with_f0_bw(&self, f0_hz: f64, bw_hz: f64) -> Self {
        Self {
            f0_hz,
            bw_hz,
            ..self.clone()
        }
    }
}

pub fn kmh_to_mps(v_kmh: f64) -> f64 {
    v_kmh * (1000.0 / 3600.0)
}

/// Maximum Doppler frequency f_D = v·f0/c.
///
/// Linear in both arguments; zero velocity gives a static channel.
pub fn doppler_frequency(velocity_mps: f64, f0_hz: f64) -> f64 {
    velocity_mps * f0_hz / SPEED_OF_LIGHT
}

/// One row of the oscillator design-parameter catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct TechnologyParams {
    pub name: &'static str,
    /// Safe operating voltage, V.
    pub v_cd: f64,
    /// Collector/drain current, A.
    pub i_cd: f64,
    /// Unloaded resonator quality factor.
    pub q0: f64,
}

/// Built-in catalog of oscillator transistor/resonator parameters.
pub const TECHNOLOGIES: [TechnologyParams; 5] = [
    TechnologyParams { name: "Si CMOS", v_cd: 1.0, i_cd: 0.005, q0: 15.0 },
    TechnologyParams { name: "SiGe HBT", v_cd: 2.0, i_cd: 0.030, q0: 15.0 },
    TechnologyParams { name: "InGaP HBT", v_cd: 5.0, i_cd: 0.025, q0: 40.0 },
    TechnologyParams { name: "GaN HEMT", v_cd: 20.0, i_cd: 0.040, q0: 40.0 },
    TechnologyParams { name: "GaAs HEMT", v_cd: 4.0, i_cd: 0.025, q0: 40.0 },
];

/// Looks up a catalog row by name (case-insensitive, surrounding whitespace
/// ignored).
pub fn builtin_technology(name: &str) -> Result<TechnologyParams> {
    let wanted = name.trim().to_ascii_lowercase();
    TECHNOLOGIES
        .iter()
        .find(|t| t.name.to_ascii_lowercase() == wanted)
        .cloned()
        .ok_or_else(|| Error::UnknownTechnology(name.to_string()))
}

/// How the oscillator pair of a scenario is characterized. Exactly one
/// variant; the innovation variance is resolved against the scenario's
/// (f0, BW) where the variant needs them.
#[derive(Debug, Clone, PartialEq)]
pub enum OscillatorSpec {
    /// Explicit per-symbol innovation variance σζ², rad². The only variant
    /// that admits zero.
    InnovationVariance(f64),
    /// 3-dB single-sided bandwidth of the Lorentzian SSB spectrum, Hz.
    ThreeDbBandwidth(f64),
    /// A single SSB spectrum measurement: level in dBc/Hz at the given
    /// offset from the carrier.
    SsbPoint { level_dbc_hz: f64, offset_hz: f64 },
    /// Use the technology floor for the given catalog row.
    TechnologyFloor(TechnologyParams),
}

impl OscillatorSpec {
    /// Resolves this description to a per-symbol innovation variance for a
    /// link at the given center frequency and bandwidth.
    pub fn innovation_variance(&self, f0_hz: f64, bw_hz: f64) -> Result<f64> {
        match self {
            OscillatorSpec::InnovationVariance(v) => Ok(*v),
            OscillatorSpec::ThreeDbBandwidth(f3db) => {
                Ok(crate::oscillator::innovation_variance(*f3db, bw_hz))
            }
            OscillatorSpec::SsbPoint { level_dbc_hz, offset_hz } => {
                let params = crate::oscillator::WienerProcessParams::from_ssb_point(
                    *level_dbc_hz,
                    *offset_hz,
                    bw_hz,
                )?;
                Ok(params.sigma2_zeta)
            }
            OscillatorSpec::TechnologyFloor(tech) => {
                Ok(crate::oscillator::technology_floor_variance(tech, f0_hz, bw_hz))
            }
        }
    }
}

/// A parsed scenario document: the link plus its oscillator description.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub link: LinkScenario,
    pub oscillator: OscillatorSpec,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct ScenarioDoc {
    #[serde(rename = "K")]
    k: Option<i64>,
    es_over_sigma2w_db: Option<f64>,
    f0_hz: Option<f64>,
    bw_hz: Option<f64>,
    v_kmh: Option<f64>,
    oscillator: Option<OscillatorDoc>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct OscillatorDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma2_zeta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    f3db_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ssb_level_dbc_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ssb_offset_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    technology: Option<String>,
}

fn positive(key: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidValue {
            key: key.into(),
            reason: format!("must be > 0, got {v}"),
        })
    }
}

fn parse_oscillator(doc: OscillatorDoc) -> Result<OscillatorSpec> {
    let mut chosen: Vec<&'static str> = Vec::new();
    if doc.sigma2_zeta.is_some() {
        chosen.push("sigma2_zeta");
    }
    if doc.f3db_hz.is_some() {
        chosen.push("f3db_hz");
    }
    if doc.ssb_level_dbc_hz.is_some() || doc.ssb_offset_hz.is_some() {
        chosen.push("ssb_level_dbc_hz/ssb_offset_hz");
    }
    if doc.technology.is_some() {
        chosen.push("technology");
    }
    if chosen.len() != 1 {
        return Err(Error::InvalidValue {
            key: "oscillator".into(),
            reason: format!(
                "exactly one variant must be set (sigma2_zeta | f3db_hz | \
                 ssb_level_dbc_hz + ssb_offset_hz | technology); found: [{}]",
                chosen.join(", ")
            ),
        });
    }
    if let Some(v) = doc.sigma2_zeta {
        if v < 0.0 || !v.is_finite() {
            return Err(Error::InvalidValue {
                key: "oscillator.sigma2_zeta".into(),
                reason: format!("must be >= 0, got {v}"),
            });
        }
        return Ok(OscillatorSpec::InnovationVariance(v));
    }
    if let Some(v) = doc.f3db_hz {
        return Ok(OscillatorSpec::ThreeDbBandwidth(positive("oscillator.f3db_hz", v)?));
    }
    if let Some(t) = doc.technology {
        return Ok(OscillatorSpec::TechnologyFloor(builtin_technology(&t)?));
    }
    let level = doc
        .ssb_level_dbc_hz
        .ok_or(Error::MissingKey("oscillator.ssb_level_dbc_hz"))?;
    let offset = doc
        .ssb_offset_hz
        .ok_or(Error::MissingKey("oscillator.ssb_offset_hz"))?;
    if !level.is_finite() {
        return Err(Error::InvalidValue {
            key: "oscillator.ssb_level_dbc_hz".into(),
            reason: "must be finite".into(),
        });
    }
    positive("oscillator.ssb_offset_hz", offset)?;
    Ok(OscillatorSpec::SsbPoint {
        level_dbc_hz: level,
        offset_hz: offset,
    })
}

/// Parses a scenario document (TOML; keys `K`, `es_over_sigma2w_db`, `f0_hz`,
/// `bw_hz`, `v_kmh`, plus an `[oscillator]` table with exactly one variant).
///
/// Es is normalized to 1 with σw² = 10^(−SNR_dB/10); velocity is converted
/// from km/h to m/s.
pub fn load_scenario(text: &str) -> Result<Scenario> {
    let doc: ScenarioDoc = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let k = doc.k.ok_or(Error::MissingKey("K"))?;
    if k < 1 {
        return Err(Error::InvalidValue {
            key: "K".into(),
            reason: format!("must be >= 1, got {k}"),
        });
    }
    let snr_db = doc
        .es_over_sigma2w_db
        .ok_or(Error::MissingKey("es_over_sigma2w_db"))?;
    let f0 = positive("f0_hz", doc.f0_hz.ok_or(Error::MissingKey("f0_hz"))?)?;
    let bw = positive("bw_hz", doc.bw_hz.ok_or(Error::MissingKey("bw_hz"))?)?;
    let v_kmh = doc.v_kmh.ok_or(Error::MissingKey("v_kmh"))?;
    if v_kmh < 0.0 || !v_kmh.is_finite() {
        return Err(Error::InvalidValue {
            key: "v_kmh".into(),
            reason: format!("must be >= 0, got {v_kmh}"),
        });
    }
    let oscillator = parse_oscillator(doc.oscillator.ok_or(Error::MissingKey("oscillator"))?)?;
    Ok(Scenario {
        link: LinkScenario::from_db(k as usize, snr_db, f0, bw, v_kmh)?,
        oscillator,
    })
}

/// Inverse of [`load_scenario`]: renders a scenario back to the document
/// format, so `load_scenario(serialize_scenario(s)) == s` for every valid
/// scenario.
pub fn serialize_scenario(s: &Scenario) -> String {
    let osc = match &s.oscillator {
        OscillatorSpec::InnovationVariance(v) => OscillatorDoc {
            sigma2_zeta: Some(*v),
            ..Default::default()
        },
        OscillatorSpec::ThreeDbBandwidth(f) => OscillatorDoc {
            f3db_hz: Some(*f),
            ..Default::default()
        },
        OscillatorSpec::SsbPoint { level_dbc_hz, offset_hz } => OscillatorDoc {
            ssb_level_dbc_hz: Some(*level_dbc_hz),
            ssb_offset_hz: Some(*offset_hz),
            ..Default::default()
        },
        OscillatorSpec::TechnologyFloor(t) => OscillatorDoc {
            technology: Some(t.name.to_string()),
            ..Default::default()
        },
    };
    let doc = ScenarioDoc {
        k: Some(s.link.block_len as i64),
        es_over_sigma2w_db: Some(10.0 * (s.link.snr_awgn()).log10()),
        f0_hz: Some(s.link.f0_hz),
        bw_hz: Some(s.link.bw_hz),
        v_kmh: Some(s.link.velocity_mps * 3.6),
        oscillator: Some(osc),
    };
    toml::to_string(&doc).expect("scenario document serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC_3C: &str = r#"
K = 100
es_over_sigma2w_db = 20.0
f0_hz = 60e9
bw_hz = 2.16e9
v_kmh = 0.5

[oscillator]
ssb_level_dbc_hz = -95.0
ssb_offset_hz = 1e6
"#;

    #[test]
    fn loads_wide_band_scenario() {
        let s = load_scenario(DOC_3C).unwrap();
        assert_eq!(s.link.block_len, 100);
        assert!((s.link.snr_awgn() - 100.0).abs() < 1e-12);
        assert!((s.link.velocity_mps - 0.1388888888888889).abs() < 1e-12);
        assert_eq!(s.link.f0_hz, 60e9);
        assert_eq!(s.link.bw_hz, 2.16e9);
        match s.oscillator {
            OscillatorSpec::SsbPoint { level_dbc_hz, offset_hz } => {
                assert_eq!(level_dbc_hz, -95.0);
                assert_eq!(offset_hz, 1e6);
            }
            other => panic!("wrong variant {other:?}"),
        }
    }

    #[test]
    fn loads_identity_scenario() {
        let doc = r#"
K = 1
es_over_sigma2w_db = 0.0
f0_hz = 1e9
bw_hz = 1e6
v_kmh = 0.0

[oscillator]
sigma2_zeta = 1e-6
"#;
        let s = load_scenario(doc).unwrap();
        assert_eq!(s.link.block_len, 1);
        assert!((s.link.snr_awgn() - 1.0).abs() < 1e-15);
        assert_eq!(s.link.velocity_mps, 0.0);
    }

    #[test]
    fn loads_narrow_band_scenario() {
        let doc = r#"
K = 100
es_over_sigma2w_db = 20.0
f0_hz = 2.4e9
bw_hz = 0.02e9
v_kmh = 0.5

[oscillator]
ssb_level_dbc_hz = -115.0
ssb_offset_hz = 1e6
"#;
        let s = load_scenario(doc).unwrap();
        assert_eq!(s.link.f0_hz, 2.4e9);
        assert_eq!(s.link.bw_hz, 0.02e9);
    }

    #[test]
    fn missing_key_is_named() {
        let doc = "K = 100\nes_over_sigma2w_db = 20.0\nbw_hz = 1e6\nv_kmh = 0.0\n[oscillator]\nsigma2_zeta = 1e-6\n";
        match load_scenario(doc).unwrap_err() {
            Error::MissingKey(k) => assert_eq!(k, "f0_hz"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_positive_value_is_named() {
        let doc = "K = 100\nes_over_sigma2w_db = 20.0\nf0_hz = 1e9\nbw_hz = -1.0\nv_kmh = 0.0\n[oscillator]\nsigma2_zeta = 1e-6\n";
        match load_scenario(doc).unwrap_err() {
            Error::InvalidValue { key, .. } => assert_eq!(key, "bw_hz"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unparseable_number_is_reported() {
        let doc = "K = 100\nes_over_sigma2w_db = \"twenty\"\nf0_hz = 1e9\nbw_hz = 1e6\nv_kmh = 0.0\n";
        assert!(matches!(load_scenario(doc).unwrap_err(), Error::Parse(_)));
    }

    #[test]
    fn oscillator_variant_must_be_unique() {
        let doc = "K = 1\nes_over_sigma2w_db = 0.0\nf0_hz = 1e9\nbw_hz = 1e6\nv_kmh = 0.0\n[oscillator]\nsigma2_zeta = 1e-6\nf3db_hz = 100.0\n";
        match load_scenario(doc).unwrap_err() {
            Error::InvalidValue { key, .. } => assert_eq!(key, "oscillator"),
            other => panic!("unexpected {other:?}"),
        }
        let doc_none = "K = 1\nes_over_sigma2w_db = 0.0\nf0_hz = 1e9\nbw_hz = 1e6\nv_kmh = 0.0\n[oscillator]\n";
        assert!(load_scenario(doc_none).is_err());
    }

    #[test]
    fn catalog_rows_are_exact() {
        let si = builtin_technology("Si CMOS").unwrap();
        assert_eq!((si.v_cd, si.i_cd, si.q0), (1.0, 0.005, 15.0));
        let gan = builtin_technology("GaN HEMT").unwrap();
        assert_eq!((gan.v_cd, gan.i_cd, gan.q0), (20.0, 0.040, 40.0));
        let ingap = builtin_technology("InGaP HBT").unwrap();
        assert_eq!((ingap.v_cd, ingap.i_cd, ingap.q0), (5.0, 0.025, 40.0));
        let sige = builtin_technology("SiGe HBT").unwrap();
        assert_eq!((sige.v_cd, sige.i_cd, sige.q0), (2.0, 0.030, 15.0));
        let gaas = builtin_technology("GaAs HEMT").unwrap();
        assert_eq!((gaas.v_cd, gaas.i_cd, gaas.q0), (4.0, 0.025, 40.0));
        // Round-trip through the catalog list itself.
        for t in &TECHNOLOGIES {
            assert_eq!(&builtin_technology(t.name).unwrap(), t);
        }
        assert!(builtin_technology(" gan hemt ").is_ok());
        assert!(matches!(
            builtin_technology("unobtainium").unwrap_err(),
            Error::UnknownTechnology(_)
        ));
    }

    #[test]
    fn doppler_values() {
        assert_eq!(doppler_frequency(0.0, 10e9), 0.0);
        let v50 = kmh_to_mps(50.0);
        assert!((doppler_frequency(v50, 10e9) - 462.962962962963).abs() < 1e-9);
        let v05 = kmh_to_mps(0.5);
        assert!((doppler_frequency(v05, 60e9) - 27.77777777777778).abs() < 1e-10);
    }

    #[test]
    fn doppler_linearity() {
        for a in [0.0, 0.5, 2.0, 17.3] {
            for v in [0.1, 3.0, 40.0] {
                let lhs = doppler_frequency(a * v, 7e9);
                let rhs = a * doppler_frequency(v, 7e9);
                assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
            }
        }
    }

    #[test]
    fn serialize_roundtrip() {
        let scenarios = [
            load_scenario(DOC_3C).unwrap(),
            Scenario {
                link: LinkScenario::from_db(7, 13.5, 5e9, 1e7, 3.0).unwrap(),
                oscillator: OscillatorSpec::TechnologyFloor(builtin_technology("GaAs HEMT").unwrap()),
            },
            Scenario {
                link: LinkScenario::from_db(1, 0.0, 1e9, 1e6, 0.0).unwrap(),
                oscillator: OscillatorSpec::InnovationVariance(0.0),
            },
            Scenario {
                link: LinkScenario::from_db(250, 25.0, 28e9, 1e8, 120.0).unwrap(),
                oscillator: OscillatorSpec::ThreeDbBandwidth(812.5),
            },
        ];
        for s in scenarios {
            let text = serialize_scenario(&s);
            let back = load_scenario(&text).unwrap();
            assert_eq!(back.oscillator, s.oscillator, "doc:\n{text}");
            assert_eq!(back.link.block_len, s.link.block_len);
            for (a, b) in [
                (back.link.es, s.link.es),
                (back.link.sigma2_w, s.link.sigma2_w),
                (back.link.f0_hz, s.link.f0_hz),
                (back.link.bw_hz, s.link.bw_hz),
                (back.link.velocity_mps, s.link.velocity_mps),
            ] {
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300), "{a} vs {b}");
            }
        }
    }
}
