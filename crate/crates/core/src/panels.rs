//! Reference configurations used for figures and regression tests.

use crate::error::Result;
use crate::wavefield::WellParams;

/// A named parameter set: `Λ = lambda.0/lambda.1`, `t/T = tau.0/tau.1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Panel {
    pub name: &'static str,
    pub lambda: (i64, i64),
    pub tau: (i64, i64),
    pub n_state: u32,
    pub fragmented: bool,
}

impl Panel {
    pub fn params(&self) -> Result<WellParams> {
        WellParams::from_parts(self.lambda.0, self.lambda.1, self.n_state, self.tau.0, self.tau.1)
    }
}

const fn panel(
    name: &'static str,
    lambda: (i64, i64),
    tau: (i64, i64),
    n_state: u32,
    fragmented: bool,
) -> Panel {
    Panel {
        name,
        lambda,
        tau,
        n_state,
        fragmented,
    }
}

pub const PANELS: [Panel; 12] = [
    panel("frag-a", (107, 10), (2, 7), 1, true),
    panel("frag-b", (107, 10), (1, 12), 2, true),
    panel("frag-c", (107, 10), (3, 10), 1, true),
    panel("nonfrag-1", (5, 2), (1, 3), 1, false),
    panel("nonfrag-2", (5, 2), (13, 18), 3, false),
    panel("nonfrag-3", (5, 4), (11, 6), 2, false),
    panel("nonfrag-4", (7, 2), (8, 5), 3, false),
    panel("nonfrag-5", (11, 4), (3, 7), 6, false),
    panel("nonfrag-6", (13, 6), (7, 10), 3, false),
    panel("nonfrag-7", (3, 2), (5, 3), 1, false),
    panel("nonfrag-8", (3, 2), (1, 6), 3, false),
    panel("nonfrag-9", (3, 2), (7, 18), 3, false),
];

pub fn panel_by_name(name: &str) -> Option<&'static Panel> {
    PANELS.iter().find(|p| p.name == name)
}
