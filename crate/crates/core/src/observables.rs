use serde::{Deserialize, Serialize};

/// Edge-spin expectation values: `M = <S^z_1>`, `C^a = <S^a_1 S^a_N>`.
/// `temperature` is `k_B T / J`; zero means the ground state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeObservables {
    #[serde(rename = "m")]
    pub magnetization_m: f64,
    pub cx: f64,
    pub cz: f64,
    pub temperature: f64,
}

impl EdgeObservables {
    /// Bounds every physical state satisfies, with round-off slack.
    pub fn is_physical(&self) -> bool {
        const SLACK: f64 = 1e-12;
        self.magnetization_m.abs() <= 0.5 + SLACK
            && self.cx.abs() <= 0.25 + SLACK
            && self.cz.abs() <= 0.25 + SLACK
    }
}
