//! Text form of curves: `tag:key=hex,key=hex,...`.

use crate::error::{Error, Result};
use crate::gf2::{Fe, Field};

/// A parsed `tag:key=value,...` record.
pub(crate) struct Tagged<'s> {
    pub tag: &'s str,
    fields: Vec<(&'s str, &'s str)>,
    source: &'s str,
}

impl<'s> Tagged<'s> {
    pub fn parse(s: &'s str) -> Result<Tagged<'s>> {
        let s = s.trim();
        let (tag, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("missing family tag in {s:?}")))?;
        let mut fields = Vec::new();
        for item in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {item:?}")))?;
            let key = key.trim();
            if fields.iter().any(|(k, _)| *k == key) {
                return Err(Error::Parse(format!("duplicate key {key:?} in {s:?}")));
            }
            fields.push((key, value.trim()));
        }
        Ok(Tagged { tag: tag.trim(), fields, source: s })
    }

    /// Reads the listed keys, in order, as field elements. Unknown and
    /// missing keys are errors.
    pub fn elements<const N: usize>(&self, k: &Field, keys: [&str; N]) -> Result<[Fe; N]> {
        if let Some((extra, _)) = self.fields.iter().find(|(key, _)| !keys.contains(key)) {
            return Err(Error::Parse(format!(
                "unexpected key {extra:?} in {:?}",
                self.source
            )));
        }
        let mut out = [Fe::ZERO; N];
        for (slot, key) in out.iter_mut().zip(keys) {
            let (_, value) = self
                .fields
                .iter()
                .find(|(k, _)| *k == key)
                .ok_or_else(|| Error::Parse(format!("missing key {key:?} in {:?}", self.source)))?;
            *slot = k.parse(value)?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fields_in_any_order() {
        let k = Field::with_degree(3).unwrap();
        let t = Tagged::parse("hypa:t=2, a=1,r=0").unwrap();
        assert_eq!(t.tag, "hypa");
        let [a, r, tt] = t.elements(&k, ["a", "r", "t"]).unwrap();
        assert_eq!((a, r, tt), (Fe::ONE, Fe::ZERO, Fe::from_bits(2)));
    }

    #[test]
    fn rejects_malformed_records() {
        let k = Field::with_degree(3).unwrap();
        assert!(Tagged::parse("a=1").is_err());
        assert!(Tagged::parse("x:a").is_err());
        assert!(Tagged::parse("x:a=1,a=2").is_err());
        let t = Tagged::parse("x:a=1,b=2").unwrap();
        assert!(t.elements(&k, ["a"]).is_err());
        assert!(t.elements(&k, ["a", "b", "c"]).is_err());
        let t = Tagged::parse("x:a=9").unwrap();
        assert!(t.elements(&k, ["a"]).is_err());
    }
}
