//! Static tables of scenarios and checks, shared by `list`, validation and `run`.

use serde::Serialize;

use crate::config::Scenario;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ParamInfo {
    pub name: &'static str,
    pub default: f64,
    /// Open interval of admissible values.
    #[serde(skip)]
    pub range: Option<(f64, f64)>,
    pub meaning: &'static str,
}

const fn param(name: &'static str, default: f64, range: Option<(f64, f64)>, meaning: &'static str) -> ParamInfo {
    ParamInfo {
        name,
        default,
        range,
        meaning,
    }
}

/// Indexed complex list `<prefix><k>_re`, `<prefix><k>_im`, numbered from `first`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct IndexedInfo {
    pub prefix: &'static str,
    pub first: u32,
    pub defaults: &'static [(f64, f64)],
    pub meaning: &'static str,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScenarioInfo {
    pub name: &'static str,
    pub reproduces: &'static str,
    pub params: &'static [ParamInfo],
    pub indexed: &'static [IndexedInfo],
    pub checks: &'static [&'static str],
    pub default_checks: &'static [&'static str],
}

const UNIT: Option<(f64, f64)> = Some((0.0, 1.0));
const POSITIVE: Option<(f64, f64)> = Some((0.0, f64::INFINITY));

/// `(0.9 + 0.01k) exp(i(kπ/4 + 0.3 sin k))` for `k = 0..7`: no rotational symmetry,
/// so the basis solutions keep simple zeros and critical points.
const BLASCHKE_DEFAULT: [(f64, f64); 8] = [
    (0.9, 0.0),
    (0.46235492404092104, 0.783790740067216),
    (-0.2478650866649829, 0.8859813196747212),
    (-0.684852299069578, 0.6291878324150216),
    (-0.9158765671376772, 0.21158949352012735),
    (-0.8347393020725777, -0.45355297107987946),
    (-0.08037745659730353, -0.956629219954601),
    (0.8069275573944109, -0.5383009540373208),
];

const SCENARIOS: [ScenarioInfo; 7] = [
    ScenarioInfo {
        name: "gamma_example",
        reproduces: "separation theorem on the explicit example with real zeros at hyperbolic spacing pi/(2 gamma)",
        params: &[
            param("gamma", 1.0, POSITIVE, "frequency of the solution"),
            param("scan_radius", 0.9999, UNIT, "real-axis scan covers (-r, r)"),
        ],
        indexed: &[],
        checks: &[
            "zero_lattice",
            "separation",
            "balance",
            "log_derivative",
            "wronskian",
            "residual",
            "normality_functional",
            "quotient_growth",
            "coefficient_growth",
            "cross_zero_separation",
            "carleson",
        ],
        default_checks: &["zero_lattice", "separation", "balance", "wronskian"],
    },
    ScenarioInfo {
        name: "q_example",
        reproduces: "sharpness of the separation theorem with the logarithmic gauge",
        params: &[
            param("q", 2.0, Some((1.0, f64::INFINITY)), "exponent of the logarithmic gauge"),
            param("scan_radius", 0.9999, UNIT, "real-axis scan covers (-r, r)"),
            param("radius", 0.9, UNIT, "disc searched for non-real zeros and critical points"),
        ],
        indexed: &[],
        checks: &[
            "zero_lattice",
            "separation",
            "balance",
            "log_derivative",
            "wronskian",
            "residual",
            "normality_functional",
            "quotient_growth",
            "coefficient_growth",
            "cross_zero_separation",
            "carleson",
        ],
        default_checks: &["zero_lattice", "separation", "balance", "wronskian"],
    },
    ScenarioInfo {
        name: "blaschke_quotient",
        reproduces: "separation theorem for the equation of a bounded zero-free quotient 2/(B+2)",
        params: &[
            param("solution", 1.0, Some((-0.5, 2.5)), "0: the quotient itself, 1: data (0,1) at 0, 2: data (1,0) at 0"),
            param("radius", 0.97, UNIT, "disc searched for zeros and critical points"),
        ],
        indexed: &[IndexedInfo {
            prefix: "z",
            first: 1,
            defaults: &BLASCHKE_DEFAULT,
            meaning: "zeros of B",
        }],
        checks: &[
            "separation",
            "balance",
            "log_derivative",
            "wronskian",
            "residual",
            "normality_functional",
            "quotient_growth",
            "coefficient_growth",
            "cross_zero_separation",
            "carleson",
        ],
        default_checks: &["residual", "separation", "balance", "wronskian"],
    },
    ScenarioInfo {
        name: "nonnormal_witness",
        reproduces: "non-normal solution with prescribed dyadic zeros (finite truncation)",
        params: &[param("n", 15.0, Some((0.5, 40.5)), "number of zeros 1 - 2^-k, k = 1..n")],
        indexed: &[],
        checks: &["residual", "removability", "normality_growth", "normality_functional"],
        default_checks: &["residual", "removability", "normality_growth"],
    },
    ScenarioInfo {
        name: "prescribed_values",
        reproduces: "zero-free solution taking value a on one sequence and b on another",
        params: &[
            param("n", 5.0, Some((0.5, 12.5)), "points 1 - 3^-k, k = 1..n, and their reflections"),
            param("a_re", 1.0, None, "value on the first sequence"),
            param("a_im", 0.0, None, "value on the first sequence"),
            param("b_re", 0.0, None, "value on the reflected sequence"),
            param("b_im", 2.0, None, "value on the reflected sequence"),
        ],
        indexed: &[],
        checks: &["residual", "interpolation", "normality_functional"],
        default_checks: &["residual", "interpolation"],
    },
    ScenarioInfo {
        name: "lappan",
        reproduces: "locally univalent function that is not normal: bounded Schwarzian norm, growing normality gauge",
        params: &[param("radius", 0.9, UNIT, "disc searched for zeros and critical points")],
        indexed: &[],
        checks: &["schwarzian_sup", "normality_gauge", "univalence", "normality_functional"],
        default_checks: &["schwarzian_sup", "normality_gauge", "univalence"],
    },
    ScenarioInfo {
        name: "custom_coefficient",
        reproduces: "any polynomial coefficient A(z) = sum c_k z^k, solved numerically",
        params: &[
            param("f0_re", 0.0, None, "f(0)"),
            param("f0_im", 0.0, None, "f(0)"),
            param("f1_re", 1.0, None, "f'(0)"),
            param("f1_im", 0.0, None, "f'(0)"),
            param("radius", 0.9, UNIT, "disc searched for zeros and critical points"),
        ],
        indexed: &[IndexedInfo {
            prefix: "c",
            first: 0,
            defaults: &[(4.0, 0.0)],
            meaning: "coefficient of z^k in A",
        }],
        checks: &[
            "separation",
            "balance",
            "log_derivative",
            "wronskian",
            "residual",
            "normality_functional",
            "quotient_growth",
            "coefficient_growth",
            "cross_zero_separation",
            "carleson",
        ],
        default_checks: &["separation", "balance", "wronskian", "coefficient_growth"],
    },
];

pub fn scenario_info(s: Scenario) -> &'static ScenarioInfo {
    let name = match s {
        Scenario::GammaExample => "gamma_example",
        Scenario::QExample => "q_example",
        Scenario::BlaschkeQuotient => "blaschke_quotient",
        Scenario::NonnormalWitness => "nonnormal_witness",
        Scenario::PrescribedValues => "prescribed_values",
        Scenario::Lappan => "lappan",
        Scenario::CustomCoefficient => "custom_coefficient",
    };
    SCENARIOS.iter().find(|i| i.name == name).expect("every scenario has a table entry")
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CheckInfo {
    pub name: &'static str,
    /// Diagnostic checks never fail a run.
    pub diagnostic: bool,
    pub meaning: &'static str,
}

pub const CHECKS: [CheckInfo; 17] = [
    CheckInfo { name: "zero_lattice", diagnostic: false, meaning: "located zeros match the closed form within 1e-8" },
    CheckInfo { name: "separation", diagnostic: false, meaning: "hyperbolic distance of zero/critical and zero/zero pairs against the gauge bounds" },
    CheckInfo { name: "balance", diagnostic: false, meaning: "(f')^# f^# <= |A|/4 on the grid" },
    CheckInfo { name: "log_derivative", diagnostic: false, meaning: "(f'/f)^# <= |A| + 1 on the grid" },
    CheckInfo { name: "wronskian", diagnostic: false, meaning: "basis Wronskian drift < 1e-10 along rays to 0.99" },
    CheckInfo { name: "residual", diagnostic: false, meaning: "relative residual of f'' + Af < 1e-8" },
    CheckInfo { name: "normality_functional", diagnostic: true, meaning: "(1-|z|^2)|f'| at each located zero" },
    CheckInfo { name: "quotient_growth", diagnostic: true, meaning: "weighted sup of the basis quotient above the growth threshold" },
    CheckInfo { name: "coefficient_growth", diagnostic: true, meaning: "smallest C with (1-|z|^2)^2|A| <= 1 + C(1-|z|)" },
    CheckInfo { name: "cross_zero_separation", diagnostic: true, meaning: "largest delta separating zeros of the two basis solutions" },
    CheckInfo { name: "carleson", diagnostic: true, meaning: "Carleson-box ratio of |A|^2(1-|z|^2)^3" },
    CheckInfo { name: "removability", diagnostic: false, meaning: "A finite at every prescribed zero (4-direction agreement 1e-6)" },
    CheckInfo { name: "normality_growth", diagnostic: false, meaning: "delta 2^n < (1-|z_n|^2)|f'(z_n)| <= 2^n at every prescribed zero" },
    CheckInfo { name: "interpolation", diagnostic: false, meaning: "prescribed values within 1e-7 and no zeros inside |z| = 0.999" },
    CheckInfo { name: "schwarzian_sup", diagnostic: true, meaning: "grid estimate of sup (1-|z|^2)^2 |S_w|" },
    CheckInfo { name: "normality_gauge", diagnostic: true, meaning: "sup of (1-|z|^2) w^# on circles approaching the boundary" },
    CheckInfo { name: "univalence", diagnostic: false, meaning: "w injective on pseudo-hyperbolic discs of radius sqrt(2/||S_w||)" },
];

pub fn check_info(name: &str) -> Option<&'static CheckInfo> {
    CHECKS.iter().find(|c| c.name == name)
}
