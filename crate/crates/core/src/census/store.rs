//! Census cache files.
//!
//! UTF-8 CSV, three header lines followed by data rows:
//!
//! ```text
//! format_version,p,locus,normalizer,total_model_count,checksum
//! 1,3,genus2-jacobian,48,1296,<sha256 hex>
//! a1,a2,count
//! -4,5,12
//! ...
//! ```
//!
//! Elliptic censuses use the column line `a,count`. Rows are sorted by key.
//! The checksum is SHA-256 over the header values (without the checksum)
//! and every data row, each terminated by `\n`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use super::{CensusError, CensusTable, EllipticCensus, Locus};

pub const CENSUS_FORMAT_VERSION: u32 = 1;

const HEADER_FIELDS: [&str; 6] = [
    "format_version",
    "p",
    "locus",
    "normalizer",
    "total_model_count",
    "checksum",
];

struct Header {
    p: u32,
    locus: Locus,
    normalizer: u64,
    total: u64,
}

fn checksum(header: &Header, rows: &[Vec<i64>]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!(
        "{},{},{},{},{}\n",
        CENSUS_FORMAT_VERSION,
        header.p,
        header.locus.tag(),
        header.normalizer,
        header.total
    ));
    for row in rows {
        let line: Vec<String> = row.iter().map(i64::to_string).collect();
        hasher.update(line.join(","));
        hasher.update("\n");
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn write_file(
    path: &Path,
    header: &Header,
    columns: &[&str],
    rows: Vec<Vec<i64>>,
) -> Result<(), CensusError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let sum = checksum(header, &rows);
    let tmp = path.with_extension("csv.tmp");
    {
        let mut out = csv::WriterBuilder::new()
            .flexible(true)
            .from_writer(BufWriter::new(File::create(&tmp)?));
        out.write_record(HEADER_FIELDS)?;
        out.write_record([
            CENSUS_FORMAT_VERSION.to_string(),
            header.p.to_string(),
            header.locus.tag().to_string(),
            header.normalizer.to_string(),
            header.total.to_string(),
            sum,
        ])?;
        out.write_record(columns)?;
        for row in &rows {
            out.write_record(row.iter().map(i64::to_string))?;
        }
        out.into_inner()
            .map_err(|e| CensusError::Io(e.into_error()))?
            .flush()?;
    }
    std::fs::rename(tmp, path)?;
    Ok(())
}

fn malformed(path: &Path, reason: impl Into<String>) -> CensusError {
    CensusError::Malformed {
        path: path.display().to_string(),
        reason: reason.into(),
    }
}

fn read_file(
    path: &Path,
    expected: &[Locus],
    columns: &[&str],
) -> Result<(Header, Vec<Vec<i64>>, String), CensusError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)?;
    let mut records = reader.records();
    let mut next = |what: &str| -> Result<csv::StringRecord, CensusError> {
        records
            .next()
            .ok_or_else(|| malformed(path, format!("missing {what} line")))?
            .map_err(CensusError::from)
    };
    let names = next("header")?;
    if names.iter().collect::<Vec<_>>() != HEADER_FIELDS {
        return Err(malformed(path, "unexpected header line"));
    }
    let values = next("header values")?;
    if values.len() != HEADER_FIELDS.len() {
        return Err(malformed(path, "header has wrong number of fields"));
    }
    if values[0] != CENSUS_FORMAT_VERSION.to_string() {
        return Err(CensusError::Version {
            found: values[0].to_string(),
            expected: CENSUS_FORMAT_VERSION,
        });
    }
    let int = |s: &str| -> Result<u64, CensusError> {
        s.parse()
            .map_err(|_| malformed(path, format!("bad integer {s:?}")))
    };
    let locus = Locus::from_tag(&values[2])
        .filter(|l| expected.contains(l))
        .ok_or_else(|| CensusError::WrongLocus {
            found: values[2].to_string(),
            expected: expected[0],
        })?;
    let header = Header {
        p: int(&values[1])? as u32,
        locus,
        normalizer: int(&values[3])?,
        total: int(&values[4])?,
    };
    let stored = values[5].to_string();
    let cols = next("column")?;
    if cols.iter().collect::<Vec<_>>() != columns {
        return Err(malformed(path, "unexpected column line"));
    }
    let mut rows = Vec::new();
    for record in records {
        let record = record?;
        if record.len() != columns.len() {
            return Err(malformed(path, "row has wrong number of fields"));
        }
        let row = record
            .iter()
            .map(|s| {
                s.parse::<i64>()
                    .map_err(|_| malformed(path, format!("bad integer {s:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    let computed = checksum(&header, &rows);
    if computed != stored {
        return Err(CensusError::Checksum { stored, computed });
    }
    Ok((header, rows, stored))
}

pub fn census_store(table: &CensusTable, path: &Path) -> Result<(), CensusError> {
    let header = Header {
        p: table.p,
        locus: table.locus,
        normalizer: table.normalizer,
        total: table.total,
    };
    let rows = table
        .entries
        .iter()
        .map(|(&(a1, a2), &n)| vec![a1, a2, n as i64])
        .collect();
    write_file(path, &header, &["a1", "a2", "count"], rows)
}

/// Loads a genus-2 census and re-verifies its mass identity and twist symmetry.
pub fn census_load(path: &Path) -> Result<CensusTable, CensusError> {
    let (header, rows, _) = read_file(path, &[Locus::Genus2Jacobian], &["a1", "a2", "count"])?;
    let entries: BTreeMap<(i64, i64), u64> = rows
        .into_iter()
        .map(|r| ((r[0], r[1]), r[2] as u64))
        .collect();
    let table = CensusTable {
        p: header.p,
        locus: header.locus,
        normalizer: header.normalizer,
        entries,
        total: header.total,
    };
    table.verify()?;
    Ok(table)
}

pub fn elliptic_store(census: &EllipticCensus, path: &Path) -> Result<(), CensusError> {
    let header = Header {
        p: census.p,
        locus: census.locus,
        normalizer: census.normalizer,
        total: census.total,
    };
    let rows = census
        .entries
        .iter()
        .map(|(&a, &n)| vec![a, n as i64])
        .collect();
    write_file(path, &header, &["a", "count"], rows)
}

pub fn elliptic_load(path: &Path) -> Result<EllipticCensus, CensusError> {
    let (header, rows, _) = read_file(
        path,
        &[Locus::EllipticFp, Locus::EllipticFp2],
        &["a", "count"],
    )?;
    let q = match header.locus {
        Locus::EllipticFp2 => header.p * header.p,
        _ => header.p,
    };
    let census = EllipticCensus {
        p: header.p,
        q,
        locus: header.locus,
        normalizer: header.normalizer,
        entries: rows.into_iter().map(|r| (r[0], r[1] as u64)).collect(),
        total: header.total,
    };
    census.verify()?;
    Ok(census)
}

/// Checksum recorded in a census file header, without verifying the file.
pub fn file_checksum(path: &Path) -> Result<String, CensusError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)?;
    let record = reader
        .records()
        .nth(1)
        .ok_or_else(|| malformed(path, "missing header values"))??;
    record
        .get(5)
        .map(str::to_string)
        .ok_or_else(|| malformed(path, "missing checksum"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::{elliptic_census, genus2_census, Genus2Options};
    use crate::ff::{PrimeField, QuadExtField};

    fn p3_table() -> CensusTable {
        genus2_census(3, Genus2Options::default()).unwrap()
    }

    #[test]
    fn round_trip_genus2() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("genus2_p3.csv");
        let table = p3_table();
        census_store(&table, &path).unwrap();
        assert_eq!(census_load(&path).unwrap(), table);
        assert_eq!(file_checksum(&path).unwrap().len(), 64);
    }

    #[test]
    fn round_trip_elliptic() {
        let dir = tempfile::tempdir().unwrap();
        let f = PrimeField::new(3).unwrap();
        for census in [
            elliptic_census(&f),
            elliptic_census(&QuadExtField::new(f.clone())),
        ] {
            let path = dir.path().join(format!("e{}.csv", census.q));
            elliptic_store(&census, &path).unwrap();
            assert_eq!(elliptic_load(&path).unwrap(), census);
        }
    }

    #[test]
    fn tampered_count_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("genus2_p3.csv");
        census_store(&p3_table(), &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
        let last = lines.len() - 1;
        let mut fields: Vec<String> = lines[last].split(',').map(str::to_string).collect();
        let n: u64 = fields[2].parse().unwrap();
        fields[2] = (n + 1).to_string();
        lines[last] = fields.join(",");
        std::fs::write(&path, lines.join("\n") + "\n").unwrap();
        assert!(matches!(
            census_load(&path),
            Err(CensusError::Checksum { .. })
        ));
    }

    #[test]
    fn consistent_checksum_but_broken_mass_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("genus2_p3.csv");
        let mut table = p3_table();
        *table.entries.values_mut().next().unwrap() += 2;
        table.total += 2;
        census_store(&table, &path).unwrap();
        assert!(matches!(
            census_load(&path),
            Err(CensusError::MassIdentity { .. }) | Err(CensusError::TwistSymmetry { .. })
        ));
    }

    #[test]
    fn wrong_version_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("genus2_p3.csv");
        census_store(&p3_table(), &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines: Vec<&str> = text.lines().collect();
        let bumped = lines[1].replacen("1,", "2,", 1);
        lines[1] = &bumped;
        std::fs::write(&path, lines.join("\n")).unwrap();
        match census_load(&path) {
            Err(CensusError::Version { found, expected }) => {
                assert_eq!(found, "2");
                assert_eq!(expected, CENSUS_FORMAT_VERSION);
            }
            other => panic!("expected version error, got {other:?}"),
        }
    }

    #[test]
    fn elliptic_file_is_not_a_genus2_census() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.csv");
        elliptic_store(&elliptic_census(&PrimeField::new(3).unwrap()), &path).unwrap();
        assert!(matches!(
            census_load(&path),
            Err(CensusError::WrongLocus { .. })
        ));
    }
}
