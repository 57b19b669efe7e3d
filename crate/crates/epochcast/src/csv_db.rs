//! Database CSV: `setting_id,<axes...>,fin_epoch,final_accuracy,n_epochs,acc_1,...,acc_n`.
//!
//! Rows are ragged: each carries exactly `n_epochs` accuracy fields. The
//! header lists `acc_1..acc_N` up to the longest curve in the file.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use epochcast_core::curves_db::{Database, HyperParamAxis, LearningCurve, Setting, TrainingRecord};

use crate::error::{from_csv, Error, Result};

const TAIL: [&str; 3] = ["fin_epoch", "final_accuracy", "n_epochs"];

pub fn header(axes: &[HyperParamAxis], max_epochs: usize) -> Vec<String> {
    let mut h = vec!["setting_id".to_string()];
    h.extend(axes.iter().map(|a| a.name().to_string()));
    h.extend(TAIL.iter().map(|s| s.to_string()));
    h.extend((1..=max_epochs).map(|i| format!("acc_{i}")));
    h
}

pub fn write_csv<W: Write>(db: &Database, out: W) -> Result<()> {
    let axes = db.axes();
    let max_epochs = db.records().iter().map(|r| r.curve().len()).max().unwrap_or(0);
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    w.write_record(header(axes, max_epochs)).map_err(|e| from_csv(e, "database"))?;
    for rec in db.records() {
        let s = rec.setting();
        let curve = rec.curve();
        let mut row = vec![s.id(axes).to_string()];
        for (axis, &i) in axes.iter().zip(s.indices()) {
            row.push(axis.value(i).expect("validated setting").to_string());
        }
        row.push(curve.fin_epoch().to_string());
        row.push(format!("{:?}", rec.final_accuracy()));
        row.push(curve.len().to_string());
        row.extend(curve.epoch_accuracies().iter().map(|a| format!("{a:?}")));
        w.write_record(&row).map_err(|e| from_csv(e, "database"))?;
    }
    w.flush().map_err(|e| Error::io("database", e))
}

fn parse<T: std::str::FromStr>(text: &str, line: u64, field: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    text.trim()
        .parse()
        .map_err(|e: T::Err| Error::format(line, field, format!("cannot parse {text:?}: {e}")))
}

/// Reads a database written by [`write_csv`] against the given axes.
///
/// The file does not carry the database seed; the result has seed 0.
pub fn read_csv<R: Read>(input: R, axes: &[HyperParamAxis]) -> Result<Database> {
    let mut r = csv::ReaderBuilder::new()
        .flexible(true)
        .has_headers(false)
        .from_reader(input);
    let mut rows = r.records();
    let head = match rows.next() {
        Some(h) => h.map_err(|e| from_csv(e, "header"))?,
        None => return Err(Error::format(1, "header", "empty file")),
    };
    let fixed = header(axes, 0);
    for (i, want) in fixed.iter().enumerate() {
        match head.get(i) {
            Some(got) if got == want => {}
            got => {
                return Err(Error::format(
                    1,
                    want.as_str(),
                    format!("expected column `{want}`, found {:?}", got.unwrap_or("")),
                ))
            }
        }
    }
    for (j, got) in head.iter().enumerate().skip(fixed.len()) {
        let want = format!("acc_{}", j - fixed.len() + 1);
        if got != want {
            return Err(Error::format(1, want.as_str(), format!("expected column `{want}`, found {got:?}")));
        }
    }
    let n_acc_cols = head.len() - fixed.len();

    let mut db = Database::new(axes.to_vec(), 0)?;
    for row in rows {
        let row = row.map_err(|e| from_csv(e, "row"))?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |i: usize| row.get(i).unwrap_or("");
        if row.len() < fixed.len() {
            return Err(Error::format(line, "n_epochs", format!("row has only {} fields", row.len())));
        }
        let id: usize = parse(field(0), line, "setting_id")?;
        let mut indices = Vec::with_capacity(axes.len());
        for (k, axis) in axes.iter().enumerate() {
            let text = field(1 + k);
            let idx = axis
                .index_of_str(text)
                .ok_or_else(|| Error::format(line, axis.name(), format!("{text:?} is not a value of this axis")))?;
            indices.push(idx);
        }
        let setting = Setting::new(axes, indices).map_err(|e| Error::format(line, "setting", e.to_string()))?;
        if setting.id(axes) != id {
            return Err(Error::format(
                line,
                "setting_id",
                format!("{id} does not match the axis values (expected {})", setting.id(axes)),
            ));
        }
        let base = 1 + axes.len();
        let fin_epoch: usize = parse(field(base), line, "fin_epoch")?;
        let final_accuracy: f64 = parse(field(base + 1), line, "final_accuracy")?;
        let n_epochs: usize = parse(field(base + 2), line, "n_epochs")?;
        if row.len() != fixed.len() + n_epochs {
            return Err(Error::format(
                line,
                "n_epochs",
                format!("declares {n_epochs} epochs but row has {} accuracy fields", row.len() - fixed.len()),
            ));
        }
        if n_epochs > n_acc_cols {
            return Err(Error::format(line, "n_epochs", format!("{n_epochs} exceeds the header's accuracy columns")));
        }
        let mut accs = Vec::with_capacity(n_epochs);
        for e in 0..n_epochs {
            let name = format!("acc_{}", e + 1);
            let a: f64 = parse(field(fixed.len() + e), line, &name)?;
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::format(line, name, format!("accuracy {a} outside [0, 1]")));
            }
            accs.push(a);
        }
        if !(0.0..=1.0).contains(&final_accuracy) {
            return Err(Error::format(
                line,
                "final_accuracy",
                format!("accuracy {final_accuracy} outside [0, 1]"),
            ));
        }
        let curve = LearningCurve::new(accs, Some(final_accuracy), fin_epoch)
            .map_err(|e| Error::format(line, "curve", e.to_string()))?;
        let record = TrainingRecord::new(setting, curve).map_err(|e| Error::format(line, "curve", e.to_string()))?;
        db.insert(record).map_err(|e| Error::format(line, "setting_id", e.to_string()))?;
    }
    Ok(db)
}

pub fn save_csv(db: &Database, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_csv(db, &mut out)?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn load_csv(path: &Path, axes: &[HyperParamAxis]) -> Result<Database> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, axes).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use epochcast_core::trainers::default_axes;

    fn db_with_lengths(lengths: &[usize]) -> Database {
        let axes = default_axes();
        let records = lengths
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                let accs: Vec<f64> = (1..=n).map(|e| 0.1 + 0.7 * (1.0 - 1.0 / (e as f64 + i as f64 / 3.0))).collect();
                let curve = LearningCurve::completed(accs, 10).unwrap();
                TrainingRecord::new(Setting::from_id(&axes, 7 * i + 1).unwrap(), curve).unwrap()
            })
            .collect();
        Database::from_records(axes, records, 0).unwrap()
    }

    fn round_trip(db: &Database) -> (String, Database) {
        let mut buf = Vec::new();
        write_csv(db, &mut buf).unwrap();
        let loaded = read_csv(buf.as_slice(), db.axes()).unwrap();
        (String::from_utf8(buf).unwrap(), loaded)
    }

    #[test]
    fn three_record_round_trip() {
        let db = db_with_lengths(&[4, 4, 4]);
        let (_, loaded) = round_trip(&db);
        assert_eq!(loaded, db);
    }

    #[test]
    fn ragged_round_trip() {
        let db = db_with_lengths(&[3, 5, 8]);
        let (text, loaded) = round_trip(&db);
        assert_eq!(loaded, db);
        let first = text.lines().next().unwrap();
        assert_eq!(
            first,
            "setting_id,learning_rate,batch_size,optimizer,fin_epoch,final_accuracy,n_epochs,\
             acc_1,acc_2,acc_3,acc_4,acc_5,acc_6,acc_7,acc_8"
        );
        assert_eq!(text.lines().nth(1).unwrap().split(',').count(), 7 + 3);
    }

    #[test]
    fn empty_database_round_trip() {
        let db = Database::new(default_axes(), 0).unwrap();
        assert_eq!(round_trip(&db).1, db);
    }

    #[test]
    fn out_of_range_accuracy_names_line() {
        let db = db_with_lengths(&[3, 3]);
        let mut buf = Vec::new();
        write_csv(&db, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let mut fields: Vec<String> = lines[2].split(',').map(String::from).collect();
        fields[8] = "1.5".into();
        lines[2] = fields.join(",");
        let err = read_csv(lines.join("\n").as_bytes(), db.axes()).unwrap_err();
        match err {
            Error::Format { line, field, .. } => {
                assert_eq!(line, 3);
                assert_eq!(field, "acc_2");
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn malformed_rows_rejected() {
        let db = db_with_lengths(&[3]);
        let mut buf = Vec::new();
        write_csv(&db, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let bad_count = text.replacen(",3,", ",4,", 1);
        assert!(matches!(read_csv(bad_count.as_bytes(), db.axes()), Err(Error::Format { line: 2, .. })));
        let bad_opt = text.replace("sgd", "rmsprop").replace("momentum", "rmsprop").replace("adam", "rmsprop");
        assert!(matches!(read_csv(bad_opt.as_bytes(), db.axes()), Err(Error::Format { line: 2, .. })));
        let bad_header = text.replacen("fin_epoch", "epochs", 1);
        assert!(matches!(read_csv(bad_header.as_bytes(), db.axes()), Err(Error::Format { line: 1, .. })));
    }
}
