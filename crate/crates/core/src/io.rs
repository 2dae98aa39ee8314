//! File formats: point-cloud CSV, edge-list CSV and tweet JSON-lines.

use std::collections::HashSet;
use std::io::{BufRead, Read, Write};

use crate::error::{Error, Result};
use crate::geometry::{Point2D, PointCloud};
use crate::network::{RetweetGraph, TweetRecord};

/// Reads a cloud with header `x,y` or `x,y,label`.
pub fn read_cloud_csv<R: Read>(reader: R) -> Result<PointCloud> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::None)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_error(e, 1))?.clone();
    let header: Vec<&str> = headers.iter().map(str::trim).collect();
    let labelled = match header.as_slice() {
        ["x", "y"] => false,
        ["x", "y", "label"] => true,
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!(
                    "expected header `x,y` or `x,y,label`, found `{}`",
                    header.join(",")
                ),
            })
        }
    };
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(e, 0))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let expected = if labelled { 3 } else { 2 };
        if record.len() != expected {
            return Err(Error::Parse {
                line,
                message: format!("expected {expected} fields, found {}", record.len()),
            });
        }
        let coord = |field: usize, name: &str| -> Result<f64> {
            let raw = record[field].trim();
            let v: f64 = raw.parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid {name} value `{raw}`"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    message: format!("non-finite {name} value `{raw}`"),
                });
            }
            Ok(v)
        };
        points.push(Point2D {
            x: coord(0, "x")?,
            y: coord(1, "y")?,
        });
        if labelled {
            labels.push(record[2].to_string());
        }
    }
    if labelled {
        PointCloud::with_labels(points, labels)
    } else {
        PointCloud::new(points)
    }
}

fn csv_error(e: csv::Error, fallback_line: usize) -> Error {
    let line = e.position().map_or(fallback_line, |p| p.line() as usize);
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

pub fn write_cloud_csv<W: Write>(cloud: &PointCloud, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let map = |e: csv::Error| Error::Io(std::io::Error::other(e));
    match cloud.labels() {
        Some(labels) => {
            wtr.write_record(["x", "y", "label"]).map_err(map)?;
            for (p, l) in cloud.points().iter().zip(labels) {
                wtr.write_record([p.x.to_string(), p.y.to_string(), l.clone()])
                    .map_err(map)?;
            }
        }
        None => {
            wtr.write_record(["x", "y"]).map_err(map)?;
            for p in cloud.points() {
                wtr.write_record([p.x.to_string(), p.y.to_string()])
                    .map_err(map)?;
            }
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Edge list `source,target,weight`, one row per directed edge.
pub fn write_edge_list_csv<W: Write>(graph: &RetweetGraph, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let map = |e: csv::Error| Error::Io(std::io::Error::other(e));
    wtr.write_record(["source", "target", "weight"])
        .map_err(map)?;
    for ((s, t), w) in graph.edges() {
        wtr.write_record([s.as_str(), t.as_str(), &w.to_string()])
            .map_err(map)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_edge_list_csv<R: Read>(reader: R) -> Result<Vec<(String, String, u64)>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_error(e, 1))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["source", "target", "weight"] {
        return Err(Error::Parse {
            line: 1,
            message: "expected header `source,target,weight`".into(),
        });
    }
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(e, 0))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected 3 fields, found {}", record.len()),
            });
        }
        let weight = record[2].parse().map_err(|_| Error::Parse {
            line,
            message: format!("invalid weight `{}`", &record[2]),
        })?;
        out.push((record[0].to_string(), record[1].to_string(), weight));
    }
    Ok(out)
}

/// Reads one tweet object per line. Blank lines are skipped; ids must be
/// unique and ids and users nonempty.
pub fn read_tweets_jsonl<R: BufRead>(reader: R) -> Result<Vec<TweetRecord>> {
    let mut tweets = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let tweet: TweetRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if tweet.id.is_empty() || tweet.user.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                message: "tweet id and user must be nonempty".into(),
            });
        }
        if !seen.insert(tweet.id.clone()) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("duplicate tweet id `{}`", tweet.id),
            });
        }
        tweets.push(tweet);
    }
    Ok(tweets)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cloud_round_trip_with_labels() {
        let cloud = PointCloud::with_labels(
            vec![Point2D { x: 0.1, y: -2.5e-9 }, Point2D { x: 1e21, y: 3.0 }],
            vec!["a,b".into(), "Flávio".into()],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_cloud_csv(&cloud, &mut buf).unwrap();
        assert_eq!(read_cloud_csv(buf.as_slice()).unwrap(), cloud);
    }

    #[test]
    fn malformed_row_is_named() {
        let text = "x,y\n1,2\n3,abc\n";
        match read_cloud_csv(text.as_bytes()) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("abc"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(read_cloud_csv("x,y\n1,2\n3\n".as_bytes()).is_err());
        assert!(read_cloud_csv("a,b\n1,2\n".as_bytes()).is_err());
        assert!(read_cloud_csv("x,y\nNaN,2\n".as_bytes()).is_err());
    }

    #[test]
    fn tweets_reject_bad_lines() {
        let ok = "{\"id\":\"1\",\"user\":\"u\",\"text\":\"RT @a: hi\"}\n\n{\"id\":\"2\",\"user\":\"v\",\"text\":\"x\",\"created_at\":\"2022-10-02T10:00:00Z\"}\n";
        let tweets = read_tweets_jsonl(ok.as_bytes()).unwrap();
        assert_eq!(tweets.len(), 2);
        assert_eq!(
            tweets[1].created_at.as_deref(),
            Some("2022-10-02T10:00:00Z")
        );

        let bad = "{\"id\":\"1\",\"user\":\"u\",\"text\":\"a\"}\n{oops}\n";
        assert!(matches!(
            read_tweets_jsonl(bad.as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
        let dup = "{\"id\":\"1\",\"user\":\"u\",\"text\":\"a\"}\n{\"id\":\"1\",\"user\":\"v\",\"text\":\"b\"}\n";
        assert!(matches!(
            read_tweets_jsonl(dup.as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
