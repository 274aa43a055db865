//! Problem definitions read from TOML files.
//!
//! ```toml
//! dimension = 1
//! orders = [0.5]
//! interval = [0, 1]
//! z_init = 0
//! lagrangian = "pow(d1 - 2/gamma(2.5)*pow(t,1.5), 2)"
//! bc.left = [0]
//! bc.right = ["free"]        # or numbers
//! solver.tol = 1e-8          # optional
//! solver.max_iter = 100      # optional
//! solver.slope_range = [-10, 10]
//! ```

use toml::{Table, Value};

use crate::approx::SolverSettings;
use crate::error::{Error, Result};
use crate::expr::problems::{BoundaryCondition, LagrangianDef, ProblemSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig {
    pub problem: ProblemSpec,
    pub solver: SolverSettings,
}

fn cfg(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn number(v: &Value, key: &str) -> Result<f64> {
    match v {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        other => Err(cfg(format!("{key}: expected a number, got {}", other.type_str()))),
    }
}

fn get<'a>(t: &'a Table, key: &str) -> Result<&'a Value> {
    t.get(key).ok_or_else(|| cfg(format!("missing key '{key}'")))
}

fn numbers(v: &Value, key: &str) -> Result<Vec<f64>> {
    v.as_array()
        .ok_or_else(|| cfg(format!("{key}: expected an array")))?
        .iter()
        .map(|x| number(x, key))
        .collect()
}

fn pair(v: &Value, key: &str) -> Result<(f64, f64)> {
    match numbers(v, key)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        other => Err(cfg(format!("{key}: expected two numbers, got {}", other.len()))),
    }
}

pub fn parse_config(text: &str) -> Result<ProblemConfig> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| cfg(e.to_string()))?;
    const KNOWN: [&str; 8] = ["name", "dimension", "orders", "interval", "z_init", "lagrangian", "bc", "solver"];
    if let Some(k) = table.keys().find(|k| !KNOWN.contains(&k.as_str())) {
        return Err(cfg(format!("unknown key '{k}'")));
    }
    let dimension = get(&table, "dimension")?
        .as_integer()
        .filter(|d| *d >= 1)
        .ok_or_else(|| cfg("dimension: expected a positive integer"))? as usize;
    let orders = numbers(get(&table, "orders")?, "orders")?;
    let interval = pair(get(&table, "interval")?, "interval")?;
    let z_init = table.get("z_init").map_or(Ok(0.0), |v| number(v, "z_init"))?;
    let src = get(&table, "lagrangian")?.as_str().ok_or_else(|| cfg("lagrangian: expected a string"))?;
    let name = table.get("name").and_then(Value::as_str).unwrap_or("config").to_string();

    let bc = get(&table, "bc")?.as_table().ok_or_else(|| cfg("bc: expected a table"))?;
    let bc_left = numbers(get(bc, "left")?, "bc.left")?;
    let bc_right = get(bc, "right")?
        .as_array()
        .ok_or_else(|| cfg("bc.right: expected an array"))?
        .iter()
        .map(|v| match v {
            Value::String(s) if s == "free" => Ok(BoundaryCondition::Free),
            Value::String(s) => Err(cfg(format!("bc.right: unknown keyword '{s}'"))),
            other => number(other, "bc.right").map(BoundaryCondition::Fixed),
        })
        .collect::<Result<Vec<_>>>()?;

    let mut solver = SolverSettings::default();
    if let Some(s) = table.get("solver") {
        let s = s.as_table().ok_or_else(|| cfg("solver: expected a table"))?;
        for (k, v) in s {
            match k.as_str() {
                "tol" => solver.tol = number(v, "solver.tol")?,
                "max_iter" => {
                    solver.max_iter = v
                        .as_integer()
                        .filter(|i| *i >= 1)
                        .ok_or_else(|| cfg("solver.max_iter: expected a positive integer"))? as usize
                }
                "slope_range" => {
                    let r = pair(v, "solver.slope_range")?;
                    if !(r.0 < r.1) {
                        return Err(cfg("solver.slope_range: lower bound must be below upper bound"));
                    }
                    solver.slope_range = r;
                }
                other => return Err(cfg(format!("unknown key 'solver.{other}'"))),
            }
        }
    }
    let lag = LagrangianDef::new(src, dimension, orders)?;
    let problem = ProblemSpec::new(name, lag, interval, z_init, bc_left, bc_right)?;
    Ok(ProblemConfig { problem, solver })
}
