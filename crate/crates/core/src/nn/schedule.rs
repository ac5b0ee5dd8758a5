#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

/// Which reading of the annealing formula to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleForm {
    /// `eta0 * (1 + 10p)^-0.75`, decreasing in progress.
    #[default]
    Decreasing,
    /// `eta0 / (1 + 10p)^-0.75`, the formula as literally printed; it grows with progress.
    AsPrinted,
}

/// Learning rate at training progress `p`, clamped to `[0, 1]`.
pub fn lr_schedule(eta0: f64, p: f64, form: ScheduleForm) -> f64 {
    let p = p.clamp(0.0, 1.0);
    let factor = (1.0 + 10.0 * p).powf(-0.75);
    match form {
        ScheduleForm::Decreasing => eta0 * factor,
        ScheduleForm::AsPrinted => eta0 / factor,
    }
}
