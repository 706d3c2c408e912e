use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::diagnostics::TraceRecord;
use crate::error::{Error, Result};

/// Header of the trace CSV, in column order.
pub const TRACE_COLUMNS: [&str; 27] = [
    "t",
    "T_hat",
    "A",
    "X",
    "Y",
    "alpha",
    "kappa_top",
    "kappa_right",
    "beta",
    "ell",
    "gr_gap_F",
    "gr_gap_Ftheta",
    "support_residual",
    "integral_residual",
    "node_zero_count",
    "bowtie_dist",
    "migration_x",
    "migration_y",
    "box_area",
    "convex",
    "kappa_theta_margin",
    "width_kappa_margin",
    "nodal_ok",
    "T_hat_drift",
    "beta_lo",
    "beta_hi",
    "vertices",
];

const PREAMBLE: &str = "# T_hat = t + A / (2 pi + 4 alpha) feeds beta, ell and the node \
function; beta_lo and beta_hi repeat beta with T_hat + T_hat_drift and T_hat - T_hat_drift";

/// 17 significant digits: enough to round-trip any f64.
fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn fields(r: &TraceRecord) -> Vec<String> {
    let opt_bool = |b: Option<bool>| b.map(|b| b.to_string()).unwrap_or_default();
    vec![
        real(r.t),
        real(r.t_hat),
        real(r.area),
        real(r.x),
        real(r.y),
        real(r.alpha),
        real(r.kappa_top),
        real(r.kappa_right),
        real(r.beta),
        real(r.ell),
        real(r.gr_gap_f),
        real(r.gr_gap_ftheta),
        real(r.support_residual),
        real(r.integral_residual),
        r.node_zero_count.to_string(),
        real(r.bowtie_dist),
        real(r.migration_x),
        real(r.migration_y),
        real(r.box_area),
        r.convex.to_string(),
        real(r.kappa_theta_margin),
        real(r.width_kappa_margin),
        opt_bool(r.nodal_ok),
        real(r.t_hat_drift),
        real(r.beta_lo),
        r.beta_hi.map(real).unwrap_or_default(),
        r.vertices.to_string(),
    ]
}

/// Streams trace rows to a CSV file.
pub struct TraceWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl TraceWriter<BufWriter<File>> {
    pub fn create(path: &Path) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        Self::new(BufWriter::new(file)).map_err(|e| match e {
            Error::Csv(c) => Error::Config(format!("{}: {c}", path.display())),
            other => other,
        })
    }
}

impl<W: Write> TraceWriter<W> {
    pub fn new(mut sink: W) -> Result<Self> {
        writeln!(sink, "{PREAMBLE}").map_err(|e| Error::io("<trace>", e))?;
        let mut inner = csv::Writer::from_writer(sink);
        inner.write_record(TRACE_COLUMNS)?;
        Ok(Self { inner })
    }

    pub fn write(&mut self, r: &TraceRecord) -> Result<()> {
        self.inner.write_record(fields(r))?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.inner.flush().map_err(|e| Error::io("<trace>", e))
    }
}

pub fn write_trace(path: &Path, rows: &[TraceRecord]) -> Result<()> {
    let mut w = TraceWriter::create(path)?;
    for r in rows {
        w.write(r)?;
    }
    w.flush()
}

struct Row<'a> {
    rec: &'a csv::StringRecord,
    line: usize,
}

impl Row<'_> {
    fn text(&self, col: usize) -> &str {
        self.rec.get(col).unwrap_or("")
    }

    fn bad(&self, col: usize, what: &str) -> Error {
        Error::MalformedTrace {
            line: self.line,
            reason: format!("column {}: {what} (got {:?})", TRACE_COLUMNS[col], self.text(col)),
        }
    }

    fn real(&self, col: usize) -> Result<f64> {
        self.text(col).parse().map_err(|_| self.bad(col, "expected a number"))
    }

    fn opt_real(&self, col: usize) -> Result<Option<f64>> {
        match self.text(col) {
            "" => Ok(None),
            _ => self.real(col).map(Some),
        }
    }

    fn int(&self, col: usize) -> Result<u32> {
        self.text(col).parse().map_err(|_| self.bad(col, "expected an integer"))
    }

    fn flag(&self, col: usize) -> Result<bool> {
        self.text(col).parse().map_err(|_| self.bad(col, "expected true or false"))
    }

    fn opt_flag(&self, col: usize) -> Result<Option<bool>> {
        match self.text(col) {
            "" => Ok(None),
            _ => self.flag(col).map(Some),
        }
    }

    fn record(&self) -> Result<TraceRecord> {
        Ok(TraceRecord {
            t: self.real(0)?,
            t_hat: self.real(1)?,
            area: self.real(2)?,
            x: self.real(3)?,
            y: self.real(4)?,
            alpha: self.real(5)?,
            kappa_top: self.real(6)?,
            kappa_right: self.real(7)?,
            beta: self.real(8)?,
            ell: self.real(9)?,
            gr_gap_f: self.real(10)?,
            gr_gap_ftheta: self.real(11)?,
            support_residual: self.real(12)?,
            integral_residual: self.real(13)?,
            node_zero_count: self.int(14)?,
            bowtie_dist: self.real(15)?,
            migration_x: self.real(16)?,
            migration_y: self.real(17)?,
            box_area: self.real(18)?,
            convex: self.flag(19)?,
            kappa_theta_margin: self.real(20)?,
            width_kappa_margin: self.real(21)?,
            nodal_ok: self.opt_flag(22)?,
            t_hat_drift: self.real(23)?,
            beta_lo: self.real(24)?,
            beta_hi: self.opt_real(25)?,
            vertices: self.int(26)?,
        })
    }
}

/// Reads a trace written by [`TraceWriter`]; errors name the offending line.
pub fn read_trace(path: &Path) -> Result<Vec<TraceRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_trace_from(file)
}

pub(crate) fn read_trace_from(source: impl std::io::Read) -> Result<Vec<TraceRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(false)
        .flexible(true)
        .from_reader(source);
    let mut out = Vec::new();
    let mut header_seen = false;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::MalformedTrace {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            reason: e.to_string(),
        })?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if !header_seen {
            if rec.iter().ne(TRACE_COLUMNS.iter().copied()) {
                return Err(Error::MalformedTrace {
                    line,
                    reason: format!("header does not match the expected {} columns", TRACE_COLUMNS.len()),
                });
            }
            header_seen = true;
            continue;
        }
        if rec.len() != TRACE_COLUMNS.len() {
            return Err(Error::MalformedTrace {
                line,
                reason: format!("{} fields, expected {}", rec.len(), TRACE_COLUMNS.len()),
            });
        }
        out.push(Row { rec: &rec, line }.record()?);
    }
    if !header_seen {
        return Err(Error::MalformedTrace { line: 1, reason: "missing header".into() });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_record(t: f64) -> TraceRecord {
        TraceRecord {
            t,
            t_hat: 0.1 + 1e-17,
            area: 1.0 / 3.0,
            x: 0.9,
            y: 0.3,
            alpha: 0.7,
            kappa_top: 2.0,
            kappa_right: 3.0,
            beta: 2.5,
            ell: 1.1,
            gr_gap_f: 0.2,
            gr_gap_ftheta: 0.4,
            support_residual: 1e-4,
            integral_residual: 2e-4,
            node_zero_count: 1,
            bowtie_dist: 0.3,
            migration_x: 0.6,
            migration_y: 1.0,
            box_area: 2.7,
            convex: true,
            kappa_theta_margin: 0.05,
            width_kappa_margin: 1.0,
            nodal_ok: None,
            t_hat_drift: 0.0,
            beta_lo: 2.5,
            beta_hi: Some(std::f64::consts::PI),
            vertices: 800,
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let rows = vec![sample_record(0.0), sample_record(std::f64::consts::E * 1e-3)];
        let mut buf = Vec::new();
        {
            let mut w = TraceWriter::new(&mut buf).unwrap();
            for r in &rows {
                w.write(r).unwrap();
            }
            w.flush().unwrap();
        }
        let back = read_trace_from(buf.as_slice()).unwrap();
        assert_eq!(back, rows);
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap().starts_with("t,T_hat,A,X,Y,alpha"));
        assert!(text.contains("3.3333333333333331e-1"));
    }

    #[test]
    fn malformed_rows_name_their_line() {
        let mut buf = Vec::new();
        {
            let mut w = TraceWriter::new(&mut buf).unwrap();
            w.write(&sample_record(0.0)).unwrap();
            w.flush().unwrap();
        }
        let mut text = String::from_utf8(buf).unwrap();
        text.push_str("1,2,3\n");
        match read_trace_from(text.as_bytes()) {
            Err(Error::MalformedTrace { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        let bad = text.replace("3.3333333333333331e-1", "abc");
        match read_trace_from(bad.as_bytes()) {
            Err(Error::MalformedTrace { line, reason }) => {
                assert_eq!(line, 3);
                assert!(reason.contains("column A"), "{reason}");
            }
            other => panic!("{other:?}"),
        }
    }
}

#[cfg(test)]
mod props {
    use proptest::prelude::*;

    use super::*;

    fn value() -> impl Strategy<Value = f64> {
        prop_oneof![
            8 => prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO,
            1 => Just(f64::NAN),
        ]
    }

    fn record() -> impl Strategy<Value = TraceRecord> {
        (
            prop::collection::vec(value(), 22),
            any::<u32>(),
            any::<bool>(),
            prop::option::of(any::<bool>()),
            prop::option::of(value()),
            any::<u32>(),
        )
            .prop_map(|(f, zeros, convex, nodal_ok, beta_hi, vertices)| TraceRecord {
                t: f[0],
                t_hat: f[1],
                area: f[2],
                x: f[3],
                y: f[4],
                alpha: f[5],
                kappa_top: f[6],
                kappa_right: f[7],
                beta: f[8],
                ell: f[9],
                gr_gap_f: f[10],
                gr_gap_ftheta: f[11],
                support_residual: f[12],
                integral_residual: f[13],
                node_zero_count: zeros,
                bowtie_dist: f[14],
                migration_x: f[15],
                migration_y: f[16],
                box_area: f[17],
                convex,
                kappa_theta_margin: f[18],
                width_kappa_margin: f[19],
                nodal_ok,
                t_hat_drift: f[20],
                beta_lo: f[21],
                beta_hi,
                vertices,
            })
    }

    /// Compared through the shortest round-trip rendering, so NaN equals NaN.
    fn bits(r: &TraceRecord) -> String {
        format!("{r:?}")
    }

    proptest! {
        #[test]
        fn round_trip(rows in prop::collection::vec(record(), 0..8)) {
            let mut buf = Vec::new();
            {
                let mut w = TraceWriter::new(&mut buf).unwrap();
                for r in &rows {
                    w.write(r).unwrap();
                }
                w.flush().unwrap();
            }
            let back = read_trace_from(buf.as_slice()).unwrap();
            prop_assert_eq!(back.len(), rows.len());
            for (a, b) in back.iter().zip(&rows) {
                prop_assert_eq!(bits(a), bits(b));
            }
        }
    }
}
