//! `name:key=val,key=val` strings, as used by `--estimator` and `--scenario`.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{Error, Result};

pub(crate) struct Params {
    pub name: String,
    values: BTreeMap<String, String>,
    context: String,
}

impl Params {
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let (name, rest) = text.split_once(':').unwrap_or((text, ""));
        if name.is_empty() {
            return Err(Error::Format(format!("`{text}`: missing name before `:`")));
        }
        let mut values = BTreeMap::new();
        for pair in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = pair.split_once('=').ok_or_else(|| {
                Error::Format(format!("`{text}`: expected key=value, got `{pair}`"))
            })?;
            if values
                .insert(k.trim().to_ascii_lowercase(), v.trim().to_string())
                .is_some()
            {
                return Err(Error::Format(format!(
                    "`{text}`: key `{}` given twice",
                    k.trim()
                )));
            }
        }
        Ok(Self {
            name: name.trim().to_ascii_lowercase(),
            values,
            context: text.to_string(),
        })
    }

    /// Removes and parses the first of `keys` that is present.
    pub fn take<T: FromStr>(&mut self, keys: &[&str]) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        for key in keys {
            if let Some(raw) = self.values.remove(*key) {
                return raw.parse().map(Some).map_err(|e| {
                    Error::Format(format!("`{}`: bad value for `{key}`: {e}", self.context))
                });
            }
        }
        Ok(None)
    }

    pub fn take_or<T: FromStr>(&mut self, keys: &[&str], default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.take(keys)?.unwrap_or(default))
    }

    /// Fails if any key was not consumed.
    pub fn finish(self) -> Result<()> {
        match self.values.keys().next() {
            None => Ok(()),
            Some(k) => Err(Error::Format(format!(
                "`{}`: unknown key `{k}`",
                self.context
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_tracks_unknown_keys() {
        let mut p = Params::parse("Welch:segment=64, overlap=0.5").unwrap();
        assert_eq!(p.name, "welch");
        assert_eq!(
            p.take::<usize>(&["segment_len", "segment"]).unwrap(),
            Some(64)
        );
        assert!(p.finish().is_err());
        assert!(Params::parse("wp:depth").is_err());
        assert!(Params::parse("wp:depth=1,depth=2").is_err());
        let mut p = Params::parse("wp:depth=x").unwrap();
        assert!(p.take::<u32>(&["depth"]).is_err());
        assert!(Params::parse("periodogram").unwrap().finish().is_ok());
    }
}
