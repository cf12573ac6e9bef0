use std::fs;
use std::path::Path;

use rankone::address::parse_address;
use rankone::params::generate_t2_min;
use rankone::verify::SCAN_CAP;
use rankone::{Int, LevelSet, ParamSchedule, StageTable};

use crate::Failure;

const P0: &str = r#"{"h1": 4, "stages": [{"r": 2, "s": [1, 0]}, {"r": 2, "s": [0, 2]}]}"#;

pub fn load_params(path: &Path) -> Result<ParamSchedule, Failure> {
    let text = match fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => {
            return match path.to_str() {
                Some("P0") => Ok(ParamSchedule::parse(P0)?),
                Some("T1") => {
                    let three = Int::from(3);
                    Ok(generate_t2_min(Int::from(4), &[(5, three.clone()), (5, three)])?)
                }
                _ => Err(Failure::Usage(format!("cannot read {}: {e}", path.display()))),
            }
        }
    };
    ParamSchedule::parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

pub fn set(table: &StageTable, addr: &str, cap: u128) -> Result<LevelSet, Failure> {
    parse_address(table, addr, cap).map_err(|e| Failure::Usage(e.to_string()))
}

pub fn int(s: &str, what: &str) -> Result<Int, Failure> {
    s.trim().parse().map_err(|_| Failure::Usage(format!("{what}: expected an integer, got {s:?}")))
}

/// Comma-separated integers and inclusive ranges `a..b`, in the order given.
pub fn shifts(spec: &str) -> Result<Vec<Int>, Failure> {
    let mut out = Vec::new();
    for item in spec.split(',') {
        match item.split_once("..") {
            Some((lo, hi)) => push_range(&mut out, &int(lo, "--m")?, &int(hi, "--m")?)?,
            None => out.push(int(item, "--m")?),
        }
    }
    Ok(out)
}

pub fn push_range(out: &mut Vec<Int>, lo: &Int, hi: &Int) -> Result<(), Failure> {
    let size = hi - lo + 1;
    if size > Int::from(SCAN_CAP) - Int::from(out.len()) {
        return Err(Failure::Usage(format!("shift range {lo}..{hi} has more than {SCAN_CAP} values")));
    }
    let mut m = lo.clone();
    while &m <= hi {
        out.push(m.clone());
        m += 1;
    }
    Ok(())
}

pub fn pairs(spec: &str) -> Result<Vec<(usize, Int)>, Failure> {
    spec.split(',')
        .map(|item| {
            let (r, n) =
                item.split_once(':').ok_or_else(|| Failure::Usage(format!("--pairs: expected r:n, got {item:?}")))?;
            let r = r.trim().parse().map_err(|_| Failure::Usage(format!("--pairs: bad r in {item:?}")))?;
            Ok((r, int(n, "--pairs")?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_lists_and_ranges() {
        let got = shifts("4,-2..0,9").unwrap();
        let want: Vec<Int> = [4, -2, -1, 0, 9].into_iter().map(Int::from).collect();
        assert_eq!(got, want);
        assert!(shifts("3..1").unwrap().is_empty());
        assert!(shifts("x").is_err());
        assert!(shifts("0..100000000").is_err());
    }

    #[test]
    fn pair_lists() {
        assert_eq!(pairs("5:3, 6:2").unwrap(), vec![(5, Int::from(3)), (6, Int::from(2))]);
        assert!(pairs("5").is_err());
    }
}
