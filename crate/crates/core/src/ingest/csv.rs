use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;

use super::{Dataset, LegRecord, TripRecord, LEGS_FILE, TRIPS_FILE};
use crate::error::{Error, Result};
use crate::output::{write_atomic, write_csv};

pub(crate) const LEGS_HEADER: [&str; 4] = ["passenger_id", "trip_id", "board_time", "alight_time"];
pub(crate) const TRIPS_HEADER: [&str; 3] = ["trip_id", "route_id", "start_time"];

/// Loads and validates a trajectories CSV together with its trips CSV.
pub fn load_trajectories(legs_path: &Path, trips_path: &Path) -> Result<Dataset> {
    let trips = read_trips(open(trips_path)?, TRIPS_FILE)?;
    let legs = read_legs(open(legs_path)?, LEGS_FILE)?;
    Dataset::from_located_records(trips, legs)
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

/// Parses trajectory rows, keeping the 1-based line number of each.
pub fn read_legs<R: Read>(reader: R, file: &str) -> Result<Vec<(u64, LegRecord)>> {
    read_records(reader, file, &LEGS_HEADER)
}

/// Parses trip rows, keeping the 1-based line number of each.
pub fn read_trips<R: Read>(reader: R, file: &str) -> Result<Vec<(u64, TripRecord)>> {
    read_records(reader, file, &TRIPS_HEADER)
}

pub(crate) fn read_records<R: Read, T: DeserializeOwned>(
    reader: R,
    file: &str,
    header: &[&str],
) -> Result<Vec<(u64, T)>> {
    let malformed = |line: u64, message: String| Error::Malformed {
        file: file.to_owned(),
        line,
        message,
    };
    let mut rdr = ::csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(::csv::Trim::All)
        .from_reader(reader);

    let found = rdr.headers().map_err(|e| malformed(1, e.to_string()))?;
    if found.iter().ne(header.iter().copied()) {
        return Err(malformed(
            1,
            format!(
                "expected header `{}`, found `{}`",
                header.join(","),
                found.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }

    let mut out = Vec::new();
    let mut raw = ::csv::StringRecord::new();
    loop {
        match rdr.read_record(&mut raw) {
            Ok(false) => break,
            Ok(true) => {
                let line = raw.position().map_or(0, |p| p.line());
                let rec: T = raw
                    .deserialize(Some(rdr.headers().expect("headers already read")))
                    .map_err(|e| malformed(line, deserialize_message(&e)))?;
                out.push((line, rec));
            }
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                return Err(malformed(line, e.to_string()));
            }
        }
    }
    Ok(out)
}

fn deserialize_message(e: &::csv::Error) -> String {
    match e.kind() {
        ::csv::ErrorKind::Deserialize { err, .. } => match err.field() {
            Some(f) => format!("field {}: {}", f + 1, err.kind()),
            None => err.kind().to_string(),
        },
        _ => e.to_string(),
    }
}

/// Writes the trajectories CSV for `ds`.
pub fn write_legs<W: Write>(ds: &Dataset, w: W) -> io::Result<()> {
    let (_, legs) = ds.to_records();
    write_csv(w, &LEGS_HEADER, &legs)
}

/// Writes the trips CSV for `ds`.
pub fn write_trips<W: Write>(ds: &Dataset, w: W) -> io::Result<()> {
    let (trips, _) = ds.to_records();
    write_csv(w, &TRIPS_HEADER, &trips)
}

/// Writes both CSV files of a dataset, each replaced atomically.
pub fn write_trajectories(ds: &Dataset, legs_path: &Path, trips_path: &Path) -> Result<()> {
    write_atomic(legs_path, |w| write_legs(ds, w))?;
    write_atomic(trips_path, |w| write_trips(ds, w))
}
