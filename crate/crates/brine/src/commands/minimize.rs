use brine_core::minimize_g;

use super::{default_params, json_output};
use crate::cli::MinimizeArgs;
use crate::settings::Settings;
use crate::{CliError, Output};

pub fn run(args: &MinimizeArgs, settings: &mut Settings) -> Result<Output, CliError> {
    let params = settings.params(&args.physics, default_params())?;
    let model = settings.model(&args.model, &params)?;
    let solution = minimize_g(&params, &model)?;
    json_output("minimize.json", &solution)
}
