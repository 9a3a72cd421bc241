//! Calibrated tolerance constants with their generating sweeps.
//!
//! The asymptotic statements checked by the statistics modules carry
//! unquantified O(1) constants. These fixtures pin the monitored bounds: the
//! value is 2x the maximum observed over the sweep recorded next to it, so a
//! regression that doubles a remainder term trips the monitor while routine
//! numerical noise does not.

use std::sync::OnceLock;

use serde::Deserialize;

#[derive(Debug, Deserialize)]
pub struct Calibration {
    pub c_even: f64,
    pub c_even_sweep: String,
    pub c_sq: f64,
    pub c_sq_sweep: String,
    pub c_mean: f64,
    pub c_mean_sweep: String,
    pub c_t: f64,
    pub c_t_sweep: String,
    pub c_st: f64,
    pub c_st_sweep: String,
    pub c_eo: f64,
    pub c_eo_sweep: String,
}

pub fn calibration() -> &'static Calibration {
    static CAL: OnceLock<Calibration> = OnceLock::new();
    CAL.get_or_init(|| {
        serde_json::from_str(include_str!("fixtures/calibration.json"))
            .expect("embedded calibration fixture is valid")
    })
}

#[cfg(test)]
mod tests {
    #[test]
    fn fixture_parses_and_is_positive() {
        let c = super::calibration();
        assert!(c.c_even > 0.0);
        assert!(c.c_sq > 0.0);
    }
}
