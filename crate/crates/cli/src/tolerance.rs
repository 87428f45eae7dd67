use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Named tolerances used by the embedded checks; `--tol NAME=VALUE`
/// overrides them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Tolerance {
    /// `|∫ r²R² dr − 1|` of sampled states.
    Norm,
    /// `|⟨p̂_r⟩|` for hydrogen states.
    MeanPr,
    /// Disagreement between the two `⟨δp̂_r²⟩` forms.
    Ibp,
    /// `|∫ r³RR′ dr + 3/2|`.
    RCubed,
    /// Quadrature `⟨r⟩`, `⟨δr²⟩` against exact moments.
    Moments,
    /// Quadrature `⟨δp̂_r²⟩` and product against the closed forms.
    Product,
    /// Slack below 1/4 before the bound counts as violated.
    Bound,
    /// Most negative `I_direct` accepted.
    WeylMin,
    /// `|I_direct − I_quadratic|`.
    WeylGap,
    /// `|I₃ coefficient − 1|`.
    Linear,
    /// Relative vertex error.
    Vertex,
    /// Minimum-state equation residual.
    Residual,
    /// `|product − 1/4|` at `r̄/σ ≥ 20`.
    Saturation,
    /// `|⟨p̂_r²⟩ − 2[E − ⟨U_eff⟩]|` for solved states.
    Energy,
}

impl Tolerance {
    pub const ALL: [Tolerance; 14] = [
        Tolerance::Norm,
        Tolerance::MeanPr,
        Tolerance::Ibp,
        Tolerance::RCubed,
        Tolerance::Moments,
        Tolerance::Product,
        Tolerance::Bound,
        Tolerance::WeylMin,
        Tolerance::WeylGap,
        Tolerance::Linear,
        Tolerance::Vertex,
        Tolerance::Residual,
        Tolerance::Saturation,
        Tolerance::Energy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Tolerance::Norm => "norm",
            Tolerance::MeanPr => "mean_pr",
            Tolerance::Ibp => "ibp",
            Tolerance::RCubed => "r_cubed",
            Tolerance::Moments => "moments",
            Tolerance::Product => "product",
            Tolerance::Bound => "bound",
            Tolerance::WeylMin => "weyl_min",
            Tolerance::WeylGap => "weyl_gap",
            Tolerance::Linear => "linear",
            Tolerance::Vertex => "vertex",
            Tolerance::Residual => "residual",
            Tolerance::Saturation => "saturation",
            Tolerance::Energy => "energy",
        }
    }

    pub fn default_value(self) -> f64 {
        match self {
            Tolerance::Norm => 1e-10,
            Tolerance::MeanPr => 1e-8,
            Tolerance::Ibp => 1e-5,
            Tolerance::RCubed => 1e-6,
            Tolerance::Moments => 1e-8,
            Tolerance::Product => 1e-6,
            Tolerance::Bound => 1e-9,
            Tolerance::WeylMin => 1e-10,
            Tolerance::WeylGap => 1e-5,
            Tolerance::Linear => 1e-5,
            Tolerance::Vertex => 1e-4,
            Tolerance::Residual => 1e-6,
            Tolerance::Saturation => 1e-3,
            Tolerance::Energy => 1e-5,
        }
    }
}

impl fmt::Display for Tolerance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tolerance {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|t| t.name()).collect();
            format!("unknown tolerance {s:?}; expected one of {}", names.join(", "))
        })
    }
}

/// `NAME=VALUE` as accepted by `--tol`.
pub fn parse_override(s: &str) -> Result<(Tolerance, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got {s:?}"))?;
    let tol = name.trim().parse::<Tolerance>()?;
    let value: f64 = value.trim().parse().map_err(|e| format!("invalid value for {tol}: {e}"))?;
    if !(value >= 0.0 && value.is_finite()) {
        return Err(format!("tolerance {tol} must be finite and nonnegative"));
    }
    Ok((tol, value))
}

#[derive(Debug, Clone, Default)]
pub struct Tolerances {
    overrides: BTreeMap<Tolerance, f64>,
}

impl Tolerances {
    pub fn new(overrides: &[(Tolerance, f64)]) -> Self {
        Self { overrides: overrides.iter().copied().collect() }
    }

    pub fn get(&self, t: Tolerance) -> f64 {
        self.overrides.get(&t).copied().unwrap_or_else(|| t.default_value())
    }

    pub fn overrides(&self) -> impl Iterator<Item = (Tolerance, f64)> + '_ {
        self.overrides.iter().map(|(&t, &v)| (t, v))
    }
}
