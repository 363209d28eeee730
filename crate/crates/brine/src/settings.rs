use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use brine_core::{Boundary, MagnetizationModel, ModelParams, TabulatedCurve};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::cli::{Bc, ModelArgs, ModelKind, PhysicsArgs};
use crate::formats::read_table;
use crate::manifest::sha256_hex;
use crate::CliError;

/// Resolves every setting as flag, then config file, then default, and
/// records the value actually used.
#[derive(Debug, Default)]
pub struct Settings {
    file: Map<String, Value>,
    resolved: Map<String, Value>,
    inputs: BTreeMap<String, String>,
}

impl Settings {
    /// Reads the optional JSON config. A run manifest is unwrapped to the
    /// configuration it records.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Settings::default());
        };
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let Value::Object(mut map) = value else {
            return Err(CliError::Config(format!(
                "{}: expected a JSON object",
                path.display()
            )));
        };
        if map.contains_key("command") {
            if let Some(Value::Object(inner)) = map.remove("config") {
                map = inner;
            }
        }
        Ok(Settings {
            file: map,
            ..Settings::default()
        })
    }

    pub fn get<T: Serialize + DeserializeOwned>(
        &mut self,
        key: &str,
        flag: Option<T>,
        default: T,
    ) -> Result<T, CliError> {
        let value = match self.opt(key, flag)? {
            Some(v) => v,
            None => {
                self.record(key, &default)?;
                default
            }
        };
        Ok(value)
    }

    /// Like [`Settings::get`] without a default; absent settings stay absent.
    pub fn opt<T: Serialize + DeserializeOwned>(
        &mut self,
        key: &str,
        flag: Option<T>,
    ) -> Result<Option<T>, CliError> {
        let value = match flag {
            Some(v) => Some(v),
            None => match self.file.get(key) {
                Some(Value::Null) | None => None,
                Some(v) => Some(
                    serde_json::from_value(v.clone())
                        .map_err(|e| CliError::Config(format!("config key \"{key}\": {e}")))?,
                ),
            },
        };
        if let Some(v) = &value {
            self.record(key, v)?;
        }
        Ok(value)
    }

    fn record<T: Serialize>(&mut self, key: &str, value: &T) -> Result<(), CliError> {
        let v = serde_json::to_value(value).map_err(|e| CliError::Config(e.to_string()))?;
        self.resolved.insert(key.to_string(), v);
        Ok(())
    }

    /// The configuration as resolved so far.
    pub fn resolved(&self) -> &Map<String, Value> {
        &self.resolved
    }

    /// Digests of the input files read while resolving.
    pub fn inputs(&self) -> &BTreeMap<String, String> {
        &self.inputs
    }

    /// Physical parameters with the given defaults for `J`, `h`, `kappa`, `c`.
    pub fn params(
        &mut self,
        args: &PhysicsArgs,
        defaults: ModelParams,
    ) -> Result<ModelParams, CliError> {
        let bc = args.bc.map(|b| match b {
            Bc::Plus => Boundary::Plus,
            Bc::Minus => Boundary::Minus,
        });
        let params = ModelParams {
            j: self.get("J", args.j, defaults.j)?,
            h: self.get("h", args.h, defaults.h)?,
            kappa: self.get("kappa", args.kappa, defaults.kappa)?,
            c: self.get("c", args.c, defaults.c)?,
            d: self.get("d", args.d, defaults.d)?,
            bc: self.get("bc", bc, defaults.bc)?,
        };
        Ok(params.validate()?)
    }

    pub fn model(
        &mut self,
        args: &ModelArgs,
        params: &ModelParams,
    ) -> Result<MagnetizationModel, CliError> {
        let default = if params.d == 2 {
            ModelKind::Onsager
        } else {
            ModelKind::MeanField
        };
        let kind = self.get(
            "model",
            args.model.map(KindName::from),
            KindName::from(default),
        )?;
        Ok(match kind.0 {
            ModelKind::MeanField => MagnetizationModel::mean_field(params.j, params.d),
            ModelKind::Onsager => {
                if params.d != 2 {
                    return Err(CliError::Config("the onsager model needs d = 2".into()));
                }
                MagnetizationModel::onsager(params.j)
            }
            ModelKind::Tabulated => {
                let path: PathBuf = self
                    .opt("table", args.table.clone())?
                    .ok_or_else(|| CliError::Config("the tabulated model needs --table".into()))?;
                let bytes = fs::read(&path).map_err(|source| CliError::Io {
                    path: path.clone(),
                    source,
                })?;
                self.inputs
                    .insert(path.display().to_string(), sha256_hex(&bytes));
                let rows = read_table(&bytes)?;
                MagnetizationModel::tabulated(TabulatedCurve::new(&rows)?)
            }
        })
    }
}

/// Model names as written on the command line and in config files.
#[derive(Debug, Clone, Copy)]
struct KindName(ModelKind);

impl From<ModelKind> for KindName {
    fn from(k: ModelKind) -> Self {
        KindName(k)
    }
}

impl Serialize for KindName {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use clap::ValueEnum;
        let value = self.0.to_possible_value().expect("no skipped variants");
        s.serialize_str(value.get_name())
    }
}

impl<'de> serde::Deserialize<'de> for KindName {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use clap::ValueEnum;
        let name = String::deserialize(d)?;
        ModelKind::from_str(&name, true)
            .map(KindName)
            .map_err(|_| serde::de::Error::custom(format!("unknown model \"{name}\"")))
    }
}
