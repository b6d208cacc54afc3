//! Archive files: CSV and JSON candidate lists and run manifests.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::candidate::{BoundaryCandidate, Validity};
use crate::detection::{Budget, DetectionConfig, DetectionRun, Strategy};
use crate::distance::{Boundariness, OutputDistanceKind};
use crate::error::{Error, Result};
use crate::sampling::SamplerConfig;
use crate::summarize::ClusterReport;
use crate::sut::ExecutionOutcome;
use crate::value::InputTuple;

pub const CSV_HEADER: [&str; 7] = [
    "input1",
    "input2",
    "output1",
    "output2",
    "validity",
    "score_num",
    "score_den",
];

/// Everything needed to rerun a detection and check its counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub sut: String,
    pub strategy: Strategy,
    pub seed: u64,
    pub budget: Budget,
    pub sampler: SamplerConfig,
    pub output_distance: OutputDistanceKind,
    pub threshold: Boundariness,
    pub executions: u64,
    pub samples: u64,
    pub candidates: u64,
    pub elapsed_seconds: f64,
}

impl RunManifest {
    pub fn new(sut: &str, config: &DetectionConfig, run: &DetectionRun) -> Self {
        RunManifest {
            sut: sut.to_string(),
            strategy: config.strategy,
            seed: config.sampler.seed,
            budget: config.budget,
            sampler: config.sampler.clone(),
            output_distance: config.output_distance,
            threshold: config.threshold.clone(),
            executions: run.stats.executions,
            samples: run.stats.samples,
            candidates: run.stats.candidates,
            elapsed_seconds: run.stats.elapsed_seconds,
        }
    }
}

/// JSON archive form: optional run metadata plus the candidates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<RunManifest>,
    pub candidates: Vec<BoundaryCandidate>,
}

pub fn write_csv<W: Write>(w: W, candidates: &[BoundaryCandidate]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for c in candidates {
        out.write_record([
            c.i1.render(),
            c.i2.render(),
            c.o1.text().to_string(),
            c.o2.text().to_string(),
            c.validity().to_string(),
            c.score.numer().to_string(),
            c.score.denom().to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a CSV archive; `label` names the source in error messages.
pub fn read_csv<R: Read>(r: R, label: &str) -> Result<Vec<BoundaryCandidate>> {
    let data_err = |line: u64, message: String| Error::Data {
        path: label.to_string(),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let header = rdr.headers().map_err(|e| csv_err(label, e))?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(data_err(
            1,
            format!("expected header {}", CSV_HEADER.join(",")),
        ));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(label, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |i: usize| rec.get(i).unwrap_or_default();
        let input = |i: usize| {
            InputTuple::parse(field(i))
                .map_err(|e| data_err(line, format!("{}: {e}", CSV_HEADER[i])))
        };
        let i1 = input(0)?;
        let i2 = input(1)?;
        let validity = match field(4) {
            "VV" => Validity::VV,
            "VE" => Validity::VE,
            "EE" => Validity::EE,
            v => return Err(data_err(line, format!("unknown validity {v:?}"))),
        };
        let (o1, o2) = outcomes(field(2), field(3), validity)
            .map_err(|m| data_err(line, m))?;
        let score = Boundariness::from_parts(
            field(5)
                .parse()
                .map_err(|_| data_err(line, format!("bad score_num {:?}", field(5))))?,
            field(6)
                .parse()
                .map_err(|_| data_err(line, format!("bad score_den {:?}", field(6))))?,
        )
        .map_err(|e| data_err(line, e.to_string()))?;
        out.push(BoundaryCandidate {
            i1,
            o1,
            i2,
            o2,
            score,
        });
    }
    Ok(out)
}

fn csv_err(label: &str, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Data {
        path: label.to_string(),
        line,
        message: e.to_string(),
    }
}

/// Recovers outcome status from the validity column; for VE the erring
/// side is the one whose text parses as an error rendering.
fn outcomes(
    t1: &str,
    t2: &str,
    v: Validity,
) -> std::result::Result<(ExecutionOutcome, ExecutionOutcome), String> {
    let err = |t: &str| {
        ExecutionOutcome::parse_error_text(t).ok_or_else(|| format!("not an error rendering: {t:?}"))
    };
    match v {
        Validity::VV => Ok((ExecutionOutcome::valid(t1), ExecutionOutcome::valid(t2))),
        Validity::EE => Ok((err(t1)?, err(t2)?)),
        Validity::VE => {
            match (
                ExecutionOutcome::parse_error_text(t1),
                ExecutionOutcome::parse_error_text(t2),
            ) {
                (Some(e), None) => Ok((e, ExecutionOutcome::valid(t2))),
                (None, Some(e)) => Ok((ExecutionOutcome::valid(t1), e)),
                (None, None) => Err("VE row without an error rendering".into()),
                (Some(_), Some(_)) => Err("VE row with two error renderings".into()),
            }
        }
    }
}

pub fn write_json<W: Write>(w: W, doc: &ArchiveDocument) -> Result<()> {
    let mut w = BufWriter::new(w);
    serde_json::to_writer_pretty(&mut w, doc)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_json<R: Read>(r: R) -> Result<ArchiveDocument> {
    Ok(serde_json::from_reader(BufReader::new(r))?)
}

pub fn read_manifest<R: Read>(r: R) -> Result<RunManifest> {
    Ok(serde_json::from_reader(BufReader::new(r))?)
}

pub fn read_report<R: Read>(r: R) -> Result<ClusterReport> {
    Ok(serde_json::from_reader(BufReader::new(r))?)
}

pub fn save_csv(path: &Path, candidates: &[BoundaryCandidate]) -> Result<()> {
    write_csv(BufWriter::new(File::create(path)?), candidates)
}

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Loads an archive file: JSON for a `.json` extension, CSV otherwise.
pub fn load_archive(path: &Path) -> Result<Vec<BoundaryCandidate>> {
    let file = File::open(path)?;
    let label = path.display().to_string();
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        read_json(file)
            .map(|d| d.candidates)
            .map_err(|e| Error::Data {
                path: label,
                line: 0,
                message: e.to_string(),
            })
    } else {
        read_csv(BufReader::new(file), &label)
    }
}

/// Concatenates archives keeping the first occurrence of every key.
pub fn merge<I>(archives: I) -> Vec<BoundaryCandidate>
where
    I: IntoIterator<Item = Vec<BoundaryCandidate>>,
{
    let mut seen = HashSet::new();
    archives
        .into_iter()
        .flatten()
        .filter(|c| seen.insert(c.key()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sut::ErrorKind;

    fn sample() -> Vec<BoundaryCandidate> {
        let k = |s: &str| InputTuple::parse(s).unwrap();
        let d = OutputDistanceKind::StrLen;
        vec![
            BoundaryCandidate::scored(
                k("999"),
                ExecutionOutcome::valid("999B"),
                k("1000"),
                ExecutionOutcome::valid("1.0 kB"),
                d,
            )
            .unwrap(),
            BoundaryCandidate::scored(
                k("0;1"),
                ExecutionOutcome::message_error(ErrorKind::DomainError, "a \"quoted\", comma"),
                k("1;1"),
                ExecutionOutcome::valid("line\nbreak"),
                d,
            )
            .unwrap(),
            BoundaryCandidate::scored(
                k("7"),
                ExecutionOutcome::bounds_error("kMGTPE", 9),
                k("8"),
                ExecutionOutcome::bounds_error("kMGTPE", 10),
                d,
            )
            .unwrap(),
        ]
    }

    #[test]
    fn csv_round_trip() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &sample()).unwrap();
        let back = read_csv(buf.as_slice(), "mem").unwrap();
        assert_eq!(back, sample());
    }

    #[test]
    fn json_round_trip() {
        let doc = ArchiveDocument {
            manifest: None,
            candidates: sample(),
        };
        let mut buf = Vec::new();
        write_json(&mut buf, &doc).unwrap();
        assert_eq!(read_json(buf.as_slice()).unwrap(), doc);
    }

    #[test]
    fn bad_rows_report_line() {
        let text = "input1,input2,output1,output2,validity,score_num,score_den\n\
                    1,2,a,b,VV,0,1\n\
                    1,x,a,b,VV,0,1\n";
        match read_csv(text.as_bytes(), "f.csv") {
            Err(Error::Data { path, line, .. }) => {
                assert_eq!(path, "f.csv");
                assert_eq!(line, 3);
            }
            other => panic!("{other:?}"),
        }
        let short = "input1,input2,output1,output2,validity,score_num,score_den\n1,2,a\n";
        assert!(matches!(
            read_csv(short.as_bytes(), "g"),
            Err(Error::Data { line: 2, .. })
        ));
        let header = "a,b\n";
        assert!(matches!(
            read_csv(header.as_bytes(), "h"),
            Err(Error::Data { line: 1, .. })
        ));
    }

    #[test]
    fn ve_without_error_rejected() {
        let text = "input1,input2,output1,output2,validity,score_num,score_den\n1,2,a,b,VE,1,1\n";
        assert!(read_csv(text.as_bytes(), "f").is_err());
    }

    #[test]
    fn merge_keeps_first() {
        let a = sample();
        let b = vec![sample()[2].clone(), sample()[0].clone()];
        let m = merge([a, b]);
        assert_eq!(m.len(), 3);
    }
}
