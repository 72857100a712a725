//! The `family(key=value, ...)` call syntax shared by weight and function specs.

use crate::error::{Error, Result};

/// One argument of a call: `key=value` or a bare positional value.
#[derive(Debug, Clone, PartialEq)]
pub struct Arg {
    pub key: Option<String>,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Call {
    pub name: String,
    pub args: Vec<Arg>,
}

/// Parses `name`, `name()` or `name(a, k=v, ...)`.
pub fn parse_call(src: &str) -> Result<Call> {
    let src = src.trim();
    let (name, rest) = match src.find('(') {
        Some(i) => (&src[..i], Some(&src[i + 1..])),
        None => (src, None),
    };
    let name = name.trim();
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(Error::Parse(format!("bad family name in `{src}`")));
    }
    let mut args = Vec::new();
    if let Some(rest) = rest {
        let inner = rest
            .strip_suffix(')')
            .ok_or_else(|| Error::Parse(format!("missing `)` in `{src}`")))?;
        if inner.contains('(') || inner.contains(')') {
            return Err(Error::Parse(format!("nested parentheses in `{src}`")));
        }
        if !inner.trim().is_empty() {
            for part in inner.split(',') {
                let part = part.trim();
                if part.is_empty() {
                    return Err(Error::Parse(format!("empty argument in `{src}`")));
                }
                match part.split_once('=') {
                    Some((k, v)) => {
                        let k = k.trim();
                        if k.is_empty() {
                            return Err(Error::Parse(format!("empty key in `{src}`")));
                        }
                        args.push(Arg { key: Some(k.to_string()), value: v.trim().to_string() });
                    }
                    None => args.push(Arg { key: None, value: part.to_string() }),
                }
            }
        }
    }
    Ok(Call { name: name.to_string(), args })
}

impl Call {
    /// Rejects keys outside `allowed` and any positional argument.
    pub fn expect_keys(&self, allowed: &[&str]) -> Result<()> {
        for a in &self.args {
            match &a.key {
                None => return Err(Error::Parse(format!("`{}` takes only key=value arguments", self.name))),
                Some(k) if !allowed.contains(&k.as_str()) => {
                    return Err(Error::Parse(format!("unknown key `{k}` for `{}`", self.name)))
                }
                Some(k) => {
                    if self.args.iter().filter(|b| b.key.as_deref() == Some(k)).count() > 1 {
                        return Err(Error::Parse(format!("duplicate key `{k}` for `{}`", self.name)));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.args.iter().find(|a| a.key.as_deref() == Some(key)).map(|a| a.value.as_str())
    }

    pub fn float(&self, key: &str) -> Result<Option<f64>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => parse_float(v).map(Some),
        }
    }

    pub fn float_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.float(key)?.unwrap_or(default))
    }

    pub fn required(&self, key: &str) -> Result<f64> {
        self.float(key)?.ok_or_else(|| Error::Parse(format!("`{}` requires `{key}=`", self.name)))
    }

    pub fn positional(&self) -> Result<Vec<f64>> {
        self.args
            .iter()
            .map(|a| match a.key {
                None => parse_float(&a.value),
                Some(_) => Err(Error::Parse(format!("`{}` takes only positional values", self.name))),
            })
            .collect()
    }
}

pub fn parse_float(v: &str) -> Result<f64> {
    let x: f64 = v.trim().parse().map_err(|_| Error::Parse(format!("`{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(Error::Parse(format!("`{v}` is not finite")));
    }
    Ok(x)
}

/// Shortest round-trip rendering used in canonical spec strings.
pub fn fmt_float(x: f64) -> String {
    format!("{x}")
}

/// C-style `%.12e`: `1.000000000000e+00`, `-2.500000000000e-07`, `inf`, `nan`.
pub fn sci(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.12e}");
    let (m, e) = s.split_once('e').expect("exponent");
    let e: i32 = e.parse().expect("integer exponent");
    format!("{m}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
}

/// Inverse of [`sci`].
pub fn parse_sci(s: &str) -> Result<f64> {
    match s {
        "nan" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s.parse::<f64>().map_err(|_| Error::Parse(format!("`{s}` is not a %.12e float"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_positionals() {
        let c = parse_call(" std( alpha = -0.5 ) ").unwrap();
        assert_eq!(c.name, "std");
        assert_eq!(c.float("alpha").unwrap(), Some(-0.5));
        let c = parse_call("poly(1,0,2.5)").unwrap();
        assert_eq!(c.positional().unwrap(), vec![1.0, 0.0, 2.5]);
        let c = parse_call("osc").unwrap();
        assert!(c.args.is_empty());
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_call("std(alpha=1").is_err());
        assert!(parse_call("std(alpha=1,)").is_err());
        assert!(parse_call("(x=1)").is_err());
        assert!(parse_call("std(alpha=nan)").unwrap().float("alpha").is_err());
        assert!(parse_call("std(alpha=1,alpha=2)").unwrap().expect_keys(&["alpha"]).is_err());
    }
}
