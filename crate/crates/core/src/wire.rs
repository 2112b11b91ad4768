//! JSON wire formats: letters as {"v": name, "sign": ±1}, words as letter
//! lists or the text form `a b^-1 c`, partitions as {"P", "Pstar", "link"},
//! markings as {"images": {gen: word}}.

use crate::error::Error;
use crate::graph::DefiningGraph;
use crate::partition::{GwPartition, LetterSet};
use crate::word::{Letter, Word};
use serde_json::{json, Map, Value};

pub fn letter_json(g: &DefiningGraph, l: Letter) -> Value {
    json!({ "v": g.name(l.v), "sign": if l.pos { 1 } else { -1 } })
}

pub fn letter_from_json(g: &DefiningGraph, v: &Value) -> Result<Letter, Error> {
    // Accept the text token form ("a" or "a^-1") as well.
    if let Value::String(s) = v {
        let w = Word::parse(g, s)?;
        return match w.0.as_slice() {
            [l] => Ok(*l),
            _ => Err(Error::Parse(format!("expected one letter, got {s:?}"))),
        };
    }
    let name = v
        .get("v")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Parse("letter needs a \"v\" field".into()))?;
    let sign = v
        .get("sign")
        .and_then(Value::as_i64)
        .ok_or_else(|| Error::Parse("letter needs a \"sign\" field".into()))?;
    let vid = g
        .vertex(name)
        .ok_or_else(|| Error::UnknownVertex(name.to_string()))?;
    match sign {
        1 => Ok(Letter::new(vid, true)),
        -1 => Ok(Letter::new(vid, false)),
        _ => Err(Error::Parse(format!("letter sign must be 1 or -1, got {sign}"))),
    }
}

pub fn word_json(g: &DefiningGraph, w: &Word) -> Value {
    Value::Array(w.0.iter().map(|&l| letter_json(g, l)).collect())
}

/// Words arrive either as the text form or as a JSON letter list.
pub fn word_from_json(g: &DefiningGraph, v: &Value) -> Result<Word, Error> {
    match v {
        Value::String(s) => Word::parse(g, s),
        Value::Array(items) => {
            let letters = items
                .iter()
                .map(|i| letter_from_json(g, i))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Word(letters))
        }
        _ => Err(Error::Parse("word must be a string or a letter list".into())),
    }
}

fn letterset_json(g: &DefiningGraph, s: LetterSet) -> Value {
    Value::Array(s.iter().map(|l| letter_json(g, l)).collect())
}

fn letterset_from_json(g: &DefiningGraph, v: &Value) -> Result<LetterSet, Error> {
    let items = v
        .as_array()
        .ok_or_else(|| Error::Parse("letter set must be an array".into()))?;
    let mut out = LetterSet::empty();
    for i in items {
        out.insert(letter_from_json(g, i)?);
    }
    Ok(out)
}

pub fn partition_json(g: &DefiningGraph, p: &GwPartition) -> Value {
    json!({
        "P": letterset_json(g, p.p),
        "Pstar": letterset_json(g, p.pstar),
        "link": letterset_json(g, p.link),
    })
}

/// Accepts {"P": [...]} with optional "Pstar"/"link" (recomputed and checked
/// when present), or {"P": [...], "m": letter} for an explicit pair.
pub fn partition_from_json(g: &DefiningGraph, v: &Value) -> Result<GwPartition, Error> {
    let side = letterset_from_json(
        g,
        v.get("P").ok_or_else(|| Error::Parse("partition needs \"P\"".into()))?,
    )?;
    let part = if let Some(mv) = v.get("m") {
        let m = letter_from_json(g, mv)?;
        let pair = crate::partition::validate_gw_pair(g, side, m)
            .map_err(|r| Error::InvalidPair(r.to_string()))?;
        crate::partition::make_partition(g, &pair)
    } else if side.len() == 1 {
        crate::partition::degenerate_partition(g, side.iter().next().unwrap())
    } else {
        let mut found = None;
        for m in crate::partition::max_letters(g, side).iter() {
            if let Ok(pair) = crate::partition::validate_gw_pair(g, side, m) {
                found = Some(crate::partition::make_partition(g, &pair));
                break;
            }
        }
        found.ok_or_else(|| {
            Error::InvalidPair("no letter of P yields a valid Whitehead pair".into())
        })?
    };
    if let Some(ls) = v.get("link") {
        if letterset_from_json(g, ls)? != part.link {
            return Err(Error::Parse("declared link does not match lk(m)".into()));
        }
    }
    if let Some(ps) = v.get("Pstar") {
        let declared = letterset_from_json(g, ps)?;
        if declared != part.p && declared != part.pstar {
            return Err(Error::Parse("declared Pstar is not the complement side".into()));
        }
    }
    Ok(part)
}

pub fn partitions_from_json(g: &DefiningGraph, v: &Value) -> Result<Vec<GwPartition>, Error> {
    v.as_array()
        .ok_or_else(|| Error::Parse("partitions must be an array".into()))?
        .iter()
        .map(|p| partition_from_json(g, p))
        .collect()
}

pub fn images_json(g: &DefiningGraph, images: &[Word]) -> Value {
    let mut map = Map::new();
    for (v, w) in images.iter().enumerate() {
        map.insert(g.name(v).to_string(), Value::String(w.display(g)));
    }
    json!({ "images": Value::Object(map) })
}

/// Marking JSON: {"images": {"x": "x", "y": "y x^-1"}}.
pub fn images_from_json(g: &DefiningGraph, v: &Value) -> Result<Vec<Word>, Error> {
    let map = v
        .get("images")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::Parse("marking needs an \"images\" object".into()))?;
    let mut out = Vec::with_capacity(g.n());
    for vid in 0..g.n() {
        let name = g.name(vid);
        let w = map
            .get(name)
            .ok_or_else(|| Error::Parse(format!("marking misses generator {name:?}")))?;
        out.push(word_from_json(g, w)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn word_roundtrip() {
        let g = fixtures::path3();
        let w = Word::parse(&g, "a b^-1 c").unwrap();
        let j = word_json(&g, &w);
        assert_eq!(word_from_json(&g, &j).unwrap(), w);
        assert_eq!(word_from_json(&g, &json!("a b^-1 c")).unwrap(), w);
    }

    #[test]
    fn partition_roundtrip() {
        let g = fixtures::f2();
        let parts = crate::partition::enumerate_partitions(&g, false);
        for p in &parts {
            let j = partition_json(&g, p);
            assert_eq!(&partition_from_json(&g, &j).unwrap(), p);
        }
    }

    #[test]
    fn marking_roundtrip() {
        let g = fixtures::f2();
        let images = vec![
            Word::parse(&g, "x").unwrap(),
            Word::parse(&g, "y x^-1").unwrap(),
        ];
        let j = images_json(&g, &images);
        assert_eq!(images_from_json(&g, &j).unwrap(), images);
    }
}
