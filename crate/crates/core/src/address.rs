//! Set-address grammar used on the command line.
//!
//! ```text
//! address := item ('+' item)*
//! item    := J ':' L               single floor L of tower J
//!          | J ':' A '-' B         floors A..=B of tower J
//!          | 'col:' J ':' I        column I of tower J, without spacers
//!          | 'col+spacers:' J ':' I
//!          | 'tower:' J            the whole tower X_J
//! ```

use crate::intervals::Span;
use crate::levelset::LevelSet;
use crate::tower::StageTable;
use crate::{Error, Int, Result};

pub fn parse_address(table: &StageTable, input: &str, cap: u128) -> Result<LevelSet> {
    let bad = |message: &str| Error::Address { input: input.to_string(), message: message.to_string() };
    let raw: Vec<&str> = input.split('+').map(str::trim).collect();
    let mut items: Vec<String> = Vec::new();
    let mut k = 0;
    while k < raw.len() {
        if raw[k] == "col" && raw.get(k + 1).is_some_and(|n| n.starts_with("spacers:")) {
            items.push(format!("col+{}", raw[k + 1]));
            k += 2;
        } else {
            items.push(raw[k].to_string());
            k += 1;
        }
    }
    let mut acc: Option<LevelSet> = None;
    for item in &items {
        if item.is_empty() {
            return Err(bad("empty item"));
        }
        let set = parse_item(table, item).map_err(|e| match e {
            Error::Address { message, .. } => bad(&message),
            other => other,
        })?;
        acc = Some(match acc {
            None => set,
            Some(prev) => prev.union(&set, table, cap)?,
        });
    }
    acc.ok_or_else(|| bad("empty address"))
}

fn parse_item(table: &StageTable, item: &str) -> Result<LevelSet> {
    let bad = |message: String| Error::Address { input: item.to_string(), message };
    let parts: Vec<&str> = item.split(':').collect();
    let stage = |s: &str| s.parse::<usize>().map_err(|_| bad(format!("bad stage {s:?} in {item:?}")));
    let level = |s: &str| s.parse::<Int>().map_err(|_| bad(format!("bad level {s:?} in {item:?}")));
    match parts.as_slice() {
        ["col", j, i] => LevelSet::column(table, stage(j)?, stage(i)?),
        ["col+spacers", j, i] => LevelSet::column_with_spacers(table, stage(j)?, stage(i)?),
        ["tower", j] => LevelSet::tower(table, stage(j)?),
        [j, range] => {
            let j = stage(j)?;
            let span = match range.split_once('-') {
                Some((lo, hi)) => {
                    let (lo, hi) = (level(lo)?, level(hi)?);
                    if lo > hi {
                        return Err(bad(format!("empty range in {item:?}")));
                    }
                    Span::new(lo, hi)
                }
                None => Span::point(level(range)?),
            };
            LevelSet::floors(table, j, vec![span])
        }
        _ => Err(bad(format!("unrecognized item {item:?}"))),
    }
}
