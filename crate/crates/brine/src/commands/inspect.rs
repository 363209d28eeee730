use brine_core::salt::SaltSplit;
use brine_core::{big_g, free_energy, optimal_theta, script_g, xi, Error};
use serde::Serialize;

use super::{default_params, json_output};
use crate::cli::InspectArgs;
use crate::settings::Settings;
use crate::{CliError, Output};

#[derive(Debug, Serialize)]
struct Inspection {
    m: f64,
    h: f64,
    c: f64,
    kappa: f64,
    m_star: f64,
    /// Optimal split and its occupation probabilities.
    theta_star: f64,
    p_plus: f64,
    p_minus: f64,
    /// Split at which `xi` and `script_g` are evaluated.
    theta: f64,
    xi: f64,
    script_g: f64,
    big_g: f64,
    free_energy: f64,
}

pub fn run(args: &InspectArgs, settings: &mut Settings) -> Result<Output, CliError> {
    let params = settings.params(&args.physics, default_params())?;
    let model = settings.model(&args.model, &params)?;
    let m = settings.get("m", args.m, 0.0)?;
    if m.is_nan() || m.abs() >= 1.0 {
        return Err(Error::OutOfDomain { m }.into());
    }
    let star = optimal_theta(m, params.c, params.kappa)?;
    let theta = match settings.opt("theta", args.theta)? {
        Some(theta) => {
            if !(0.0..=1.0).contains(&theta) {
                return Err(CliError::Config(format!("theta = {theta} out of [0, 1]")));
            }
            if !SaltSplit::new(m, theta, params.c).is_feasible() {
                return Err(Error::Infeasible { m, c: params.c }.into());
            }
            theta
        }
        None => star.theta,
    };
    let report = Inspection {
        m,
        h: params.h,
        c: params.c,
        kappa: params.kappa,
        m_star: model.spontaneous_m(),
        theta_star: star.theta,
        p_plus: star.p_plus,
        p_minus: star.p_minus,
        theta,
        xi: xi(m, theta, params.c),
        script_g: script_g(m, theta, &params, &model),
        big_g: big_g(m, &params, &model),
        free_energy: free_energy(m, &model)?,
    };
    json_output("inspect.json", &report)
}
