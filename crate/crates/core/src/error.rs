use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("material `{material}` queried at {f_ghz} GHz outside its band [{lo_ghz}, {hi_ghz}] GHz")]
    BandViolation {
        material: String,
        f_ghz: f64,
        lo_ghz: f64,
        hi_ghz: f64,
    },
    #[error("invalid material `{material}`: {reason}")]
    InvalidMaterial { material: String, reason: String },
    #[error("material `{material}` has Re(eps) = {eps_real} < 1 at {f_ghz} GHz")]
    IndexBelowUnity {
        material: String,
        f_ghz: f64,
        eps_real: f64,
    },
    #[error("invalid array configuration: {0}")]
    InvalidArray(String),
    #[error("weight vector has {got} entries, array has {expected} elements")]
    LengthMismatch { expected: usize, got: usize },
    #[error("degenerate pattern: total radiated power is zero")]
    DegeneratePattern,
    #[error("pattern has no row for {f_ghz} GHz")]
    MissingFrequency { f_ghz: f64 },
    #[error("beam too broad: no -3 dB crossing on the {side} side of the peak")]
    BeamTooBroad { side: &'static str },
    #[error("lens index {n} does not refract (must exceed 1)")]
    NoRefraction { n: f64 },
    #[error("lens geometry error: {0}")]
    LensGeometry(String),
    #[error("total internal reflection (critical angle {critical_angle_deg:.4} deg)")]
    TotalInternalReflection { critical_angle_deg: f64 },
    #[error("{discarded} of {total} rays discarded by total internal reflection")]
    ExcessiveDiscard { discarded: usize, total: usize },
    #[error("target {target_deg} deg is outside the feed plane scan range (max {max_deg:.3} deg)")]
    ScanRange { target_deg: f64, max_deg: f64 },
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
