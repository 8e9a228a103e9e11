//! Reading and decoding the JSON input document.

use std::io::{IsTerminal, Read};
use std::path::Path;

use invlim_core::arith::parse_integer;
use invlim_core::ladder::{DirectChain, InverseChain};
use invlim_core::systems::SetChain;
use invlim_core::{Atom, Element, IntMatrix, Integer};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

/// An input problem: exits with code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

type Result<T> = std::result::Result<T, InputError>;

/// The raw document, from `--input` (a path, or `-` for stdin) or, when
/// `stdin_fallback` is set, from a non-terminal stdin.
pub fn read_document(input: Option<&Path>, stdin_fallback: bool) -> Result<Option<String>> {
    let text = match input {
        Some(p) if p == Path::new("-") => read_stdin()?,
        Some(p) => std::fs::read_to_string(p).map_err(|e| InputError(format!("cannot read {}: {e}", p.display())))?,
        None if stdin_fallback && !std::io::stdin().is_terminal() => read_stdin()?,
        None => return Ok(None),
    };
    Ok(if text.trim().is_empty() { None } else { Some(text) })
}

fn read_stdin() -> Result<String> {
    let mut s = String::new();
    std::io::stdin()
        .read_to_string(&mut s)
        .map_err(|e| InputError(format!("cannot read stdin: {e}")))?;
    Ok(s)
}

/// Deserializes with the JSON path of the first schema violation.
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        InputError(format!("invalid input at {path}: {}", e.into_inner()))
    })?;
    Ok(value)
}

fn from_value<T: DeserializeOwned>(v: Value, prefix: &str) -> Result<T> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { prefix.to_string() } else { format!("{prefix}{path}") };
        InputError(format!("invalid input at {path}: {}", e.into_inner()))
    })
}

/// A presentation matrix with one row per generator and one column per
/// relation.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub matrix: IntMatrix,
    pub ngens: usize,
}

#[derive(Deserialize)]
struct RelationsDoc {
    ngens: usize,
    relations: Vec<Vec<String>>,
}

/// Accepts either a plain matrix of decimal strings (rows are generators)
/// or `{"ngens": n, "relations": [[..], ..]}` with one length-`n` vector per
/// relation. Extra fields are ignored, so `hull` output can be fed back.
pub fn presentation(text: &str) -> Result<Presentation> {
    let v: Value = parse(text)?;
    match v {
        Value::Array(_) => {
            let matrix: IntMatrix = from_value(v, ".")?;
            let ngens = matrix.rows();
            Ok(Presentation { matrix, ngens })
        }
        Value::Object(_) => {
            let doc: RelationsDoc = from_value(v, ".")?;
            let mut rows = vec![Vec::with_capacity(doc.relations.len()); doc.ngens];
            for (j, rel) in doc.relations.iter().enumerate() {
                if rel.len() != doc.ngens {
                    return Err(InputError(format!(
                        "invalid input at relations[{j}]: expected {} entries, got {}",
                        doc.ngens,
                        rel.len()
                    )));
                }
                for (i, s) in rel.iter().enumerate() {
                    let n: Integer = parse_integer(s)
                        .map_err(|e| InputError(format!("invalid input at relations[{j}][{i}]: {e}")))?;
                    rows[i].push(n);
                }
            }
            let matrix = if doc.relations.is_empty() {
                IntMatrix::empty_columns(doc.ngens)
            } else {
                IntMatrix::from_rows(rows).map_err(|e| InputError(e.to_string()))?
            };
            Ok(Presentation { matrix, ngens: doc.ngens })
        }
        _ => Err(InputError("invalid input at .: expected a matrix or an object with ngens and relations".into())),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZerolimDoc {
    pub chain: SetChain,
    pub atom: Atom,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LadderRaw {
    chain: InverseChain,
    #[serde(default)]
    direct: Option<DirectChain>,
    #[serde(default)]
    indices: Option<Vec<String>>,
    x: Element,
}

#[derive(Debug)]
pub struct LadderDoc {
    pub chain: InverseChain,
    pub direct: DirectChain,
    pub x: Element,
}

/// `{"chain": {"maps": [..]}, "direct": {"generators": [..]}, "x": ..}`, or
/// `"indices": [..]` in place of `"direct"`.
pub fn ladder(text: &str) -> Result<LadderDoc> {
    let raw: LadderRaw = parse(text)?;
    let direct = match (raw.direct, raw.indices) {
        (Some(d), None) => d,
        (None, Some(ix)) => {
            let ix = ix
                .iter()
                .enumerate()
                .map(|(i, s)| parse_integer(s).map_err(|e| InputError(format!("invalid input at indices[{i}]: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            DirectChain::from_indices(&ix).map_err(|e| InputError(format!("invalid input at indices: {e}")))?
        }
        _ => return Err(InputError("invalid input: give exactly one of direct and indices".into())),
    };
    Ok(LadderDoc {
        chain: raw.chain,
        direct,
        x: raw.x,
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDoc {
    pub chain: InverseChain,
    pub x: Element,
}
