//! Name-keyed factories for the interchangeable strategy families
//! (potentials, kernel flavors, Green's functions, gamma representations).
//!
//! Every factory receives the JSON parameter record it was selected with,
//! minus the tag key, and is expected to reject unknown fields.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::error::{Error, Result};

pub type Factory<T> = Box<dyn Fn(&Value) -> Result<Box<T>> + Send + Sync>;

pub struct Registry<T: ?Sized> {
    kind: &'static str,
    factories: BTreeMap<String, Factory<T>>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            factories: BTreeMap::new(),
        }
    }

    pub fn register<F>(&mut self, name: &str, factory: F) -> &mut Self
    where
        F: Fn(&Value) -> Result<Box<T>> + Send + Sync + 'static,
    {
        self.factories.insert(name.to_string(), Box::new(factory));
        self
    }

    pub fn kind(&self) -> &'static str {
        self.kind
    }

    pub fn names(&self) -> Vec<&str> {
        self.factories.keys().map(String::as_str).collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.factories.contains_key(name)
    }

    pub fn build(&self, name: &str, params: &Value) -> Result<Box<T>> {
        let factory = self.factories.get(name).ok_or_else(|| Error::UnknownName {
            kind: self.kind,
            name: name.to_string(),
            known: self.names().join(", "),
        })?;
        factory(params)
    }

    /// Builds from a record such as `{"kind": "yukawa_tanh", "g1": 1.0, ...}`.
    pub fn build_tagged(&self, record: &Value, tag: &str) -> Result<Box<T>> {
        let obj = record
            .as_object()
            .ok_or_else(|| Error::params(self.kind, "expected a JSON object"))?;
        let name = obj
            .get(tag)
            .and_then(Value::as_str)
            .ok_or_else(|| Error::params(self.kind, format!("missing string field `{tag}`")))?;
        let mut params = obj.clone();
        params.remove(tag);
        self.build(name, &Value::Object(params))
    }
}

impl<T: ?Sized> fmt::Debug for Registry<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registry")
            .field("kind", &self.kind)
            .field("names", &self.names())
            .finish()
    }
}

/// Deserializes factory parameters; an empty/null record maps to `{}`.
pub fn parse_params<P: DeserializeOwned>(what: &str, params: &Value) -> Result<P> {
    let value = if params.is_null() {
        Value::Object(Default::default())
    } else {
        params.clone()
    };
    serde_json::from_value(value).map_err(|e| Error::params(what, e.to_string()))
}
