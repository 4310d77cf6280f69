//! `key=value` command parameters.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::Failure;

#[derive(Debug, Default)]
pub struct Params(BTreeMap<String, String>);

impl Params {
    pub fn parse(args: &[String]) -> Result<Self, Failure> {
        let mut map = BTreeMap::new();
        for a in args {
            let (k, v) = a
                .split_once('=')
                .ok_or_else(|| Failure::Usage(format!("expected key=value, got {a:?}")))?;
            if map.insert(k.to_string(), v.to_string()).is_some() {
                return Err(Failure::Usage(format!("parameter {k} given twice")));
            }
        }
        Ok(Self(map))
    }

    /// Rejects keys outside `allowed`.
    pub fn only(&self, allowed: &[&str]) -> Result<(), Failure> {
        match self.0.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Failure::Usage(format!("unknown parameter {k}"))),
            None => Ok(()),
        }
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn optional<T: FromStr>(&self, key: &str) -> Result<Option<T>, Failure> {
        self.text(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Failure::Usage(format!("bad value {v:?} for {key}")))
            })
            .transpose()
    }

    pub fn required<T: FromStr>(&self, key: &str) -> Result<T, Failure> {
        self.optional(key)?
            .ok_or_else(|| Failure::Usage(format!("missing parameter {key}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(args: &[&str]) -> Result<Params, Failure> {
        Params::parse(&args.iter().map(|s| s.to_string()).collect::<Vec<_>>())
    }

    #[test]
    fn parses_pairs() {
        let ps = p(&["n=4", "variant=copy"]).unwrap();
        assert_eq!(ps.required::<usize>("n").unwrap(), 4);
        assert_eq!(ps.text("variant"), Some("copy"));
        assert!(ps.required::<usize>("r").is_err());
        assert!(ps.only(&["n"]).is_err());
    }

    #[test]
    fn rejects_malformed() {
        assert!(p(&["n4"]).is_err());
        assert!(p(&["n=4", "n=5"]).is_err());
        assert!(p(&["n=x"]).unwrap().required::<usize>("n").is_err());
    }
}
