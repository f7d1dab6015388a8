//! Circuits as JSON lists of `{gate, controls, targets, params}` objects.

use d4qms_core::circuits::Circuit;
use serde_json::{json, Map, Value};

pub fn circuit_to_json(c: &Circuit) -> Value {
    Value::Array(
        c.gates()
            .iter()
            .map(|g| {
                let params: Map<String, Value> = g.params().into_iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
                json!({
                    "gate": g.name(),
                    "controls": g.controls(),
                    "targets": g.targets(),
                    "params": params,
                })
            })
            .collect(),
    )
}
