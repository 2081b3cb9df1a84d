//! Fixed-column PDB reader producing heavy-atom residue chains.
//!
//! Only `ATOM` records of the first model are read. `HETATM` records
//! (modified residues included), waters, hydrogens and alternate
//! conformers other than blank/`A` are dropped.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WATER_NAMES: [&str; 4] = ["HOH", "WAT", "DOD", "H2O"];

#[derive(Debug, Clone, PartialEq)]
pub struct HeavyAtom {
    pub name: String,
    pub element: String,
    pub coords: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Residue {
    /// 1-based position among the retained residues of the chain.
    pub ordinal: usize,
    pub author_number: i32,
    pub insertion_code: char,
    pub name: String,
    pub atoms: Vec<HeavyAtom>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidueChain {
    pub protein_id: String,
    pub chain_id: char,
    pub residues: Vec<Residue>,
}

impl ResidueChain {
    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }
}

/// Inclusive interval of author residue numbers, written `start-end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueRange {
    pub start: i32,
    pub end: i32,
}

impl ResidueRange {
    pub fn contains(&self, n: i32) -> bool {
        self.start <= n && n <= self.end
    }
}

impl FromStr for ResidueRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Input(format!("bad residue range '{s}', expected start-end"));
        // skip a leading sign so "-5-120" splits after the first number
        let split = s.char_indices().skip(1).find(|&(_, c)| c == '-').map(|(i, _)| i).ok_or_else(bad)?;
        let start: i32 = s[..split].trim().parse().map_err(|_| bad())?;
        let end: i32 = s[split + 1..].trim().parse().map_err(|_| bad())?;
        if start > end {
            return Err(bad());
        }
        Ok(Self { start, end })
    }
}

impl fmt::Display for ResidueRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start, self.end)
    }
}

/// Parses `text` and returns the residues of `chain`, optionally restricted
/// to the author-numbered `range`.
pub fn parse_pdb(text: &str, protein_id: &str, chain: char, range: Option<ResidueRange>) -> Result<ResidueChain> {
    let mut residues: BTreeMap<(i32, char), Residue> = BTreeMap::new();
    let mut chain_seen = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.starts_with("ENDMDL") {
            break;
        }
        if !line.starts_with("ATOM  ") {
            continue;
        }
        let rec = AtomRecord::parse(line, line_no)?;
        if rec.chain != chain {
            continue;
        }
        chain_seen = true;
        if !(rec.alt_loc == ' ' || rec.alt_loc == 'A') {
            continue;
        }
        if WATER_NAMES.contains(&rec.res_name.as_str()) {
            continue;
        }
        if let Some(r) = range {
            if !r.contains(rec.res_seq) {
                continue;
            }
        }
        let residue = residues.entry((rec.res_seq, rec.i_code)).or_insert_with(|| Residue {
            ordinal: 0,
            author_number: rec.res_seq,
            insertion_code: rec.i_code,
            name: rec.res_name.clone(),
            atoms: Vec::new(),
        });
        if rec.element == "H" || rec.element == "D" {
            continue;
        }
        residue.atoms.push(HeavyAtom { name: rec.name, element: rec.element, coords: rec.coords });
    }

    if !chain_seen {
        return Err(Error::ChainNotFound(chain.to_string()));
    }

    let residues: Vec<Residue> = residues
        .into_values()
        .filter(|r| !r.atoms.is_empty())
        .enumerate()
        .map(|(i, mut r)| {
            r.ordinal = i + 1;
            r
        })
        .collect();

    if residues.len() < 2 {
        return Err(Error::Degenerate(format!(
            "chain {chain} of {protein_id} has {} residue(s) with heavy atoms, need at least 2",
            residues.len()
        )));
    }

    Ok(ResidueChain { protein_id: protein_id.to_string(), chain_id: chain, residues })
}

struct AtomRecord {
    name: String,
    alt_loc: char,
    res_name: String,
    chain: char,
    res_seq: i32,
    i_code: char,
    coords: [f64; 3],
    element: String,
}

impl AtomRecord {
    fn parse(line: &str, line_no: usize) -> Result<Self> {
        let err = |message: String| Error::Parse { line: line_no, message };
        if !line.is_ascii() {
            return Err(err("non-ASCII ATOM record".into()));
        }
        if line.len() < 54 {
            return Err(err(format!("ATOM record too short ({} columns, need 54)", line.len())));
        }
        // 1-based inclusive column ranges
        let col = |a: usize, b: usize| &line[a - 1..b.min(line.len())];
        let ch = |a: usize| line.as_bytes()[a - 1] as char;

        let name = col(13, 16).trim().to_string();
        let res_seq =
            col(23, 26).trim().parse::<i32>().map_err(|_| err(format!("bad residue number '{}'", col(23, 26))))?;
        let mut coords = [0.0; 3];
        for (k, (a, b)) in [(31, 38), (39, 46), (47, 54)].into_iter().enumerate() {
            let field = col(a, b).trim();
            let v: f64 = field.parse().map_err(|_| err(format!("bad coordinate '{field}'")))?;
            if !v.is_finite() {
                return Err(err(format!("non-finite coordinate '{field}'")));
            }
            coords[k] = v;
        }
        let element = if line.len() >= 78 {
            col(77, 78).trim()
        } else if line.len() >= 77 {
            col(77, 77).trim()
        } else {
            ""
        };
        let element = if element.is_empty() { infer_element(&name) } else { element.to_ascii_uppercase() };
        if element.is_empty() {
            return Err(err(format!("cannot determine element of atom '{name}'")));
        }

        Ok(Self {
            name,
            alt_loc: ch(17),
            res_name: col(18, 20).trim().to_string(),
            chain: ch(22),
            res_seq,
            i_code: ch(27),
            coords,
            element,
        })
    }
}

/// Legacy files without an element column: amino-acid atom names start with
/// their element letter, optionally preceded by a digit ("1HB").
fn infer_element(name: &str) -> String {
    name.chars().find(|c| c.is_ascii_alphabetic()).map(|c| c.to_ascii_uppercase().to_string()).unwrap_or_default()
}

/// Formats one `ATOM` record. Used by tests and fixtures.
#[allow(clippy::too_many_arguments)]
pub fn format_atom_record(
    serial: usize,
    name: &str,
    res_name: &str,
    chain: char,
    res_seq: i32,
    coords: [f64; 3],
    element: &str,
) -> String {
    let padded_name = if name.len() < 4 { format!(" {name:<3}") } else { name.to_string() };
    format!(
        "ATOM  {serial:>5} {padded_name:<4} {res_name:>3} {chain}{res_seq:>4}    {:>8.3}{:>8.3}{:>8.3}{:>6.2}{:>6.2}          {element:>2}",
        coords[0], coords[1], coords[2], 1.0, 0.0
    )
}
