//! CSV formats.
//!
//! * scheme: `category,numerator,denominator`; an empty denominator lets the
//!   numerator column hold a decimal such as `0.15`.
//! * problem: `department,period,vacancies`; periods must cover `1..=T`,
//!   absent `(department, period)` pairs read as zero.
//! * tables: `department,<categories...>,total`, one row per department and a
//!   closing `total` row.
//!
//! Every file needs its header row. Errors carry 1-based line numbers.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use reserve_core::rational::{parse_rational, Exact};
use reserve_core::{FairShareTable, ReservationProblem, ReservationScheme, ReservationTable, Roster};

use crate::error::{CliError, CliResult};

pub fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn check_header(rdr: &mut csv::Reader<&[u8]>, expected: &[&str]) -> CliResult<()> {
    let header = rdr
        .headers()
        .map_err(|e| CliError::Parse(format!("line 1: {e}")))?;
    let got: Vec<String> = header.iter().map(str::to_ascii_lowercase).collect();
    if got != expected {
        return Err(CliError::Parse(format!(
            "line 1: expected header `{}`, found `{}`",
            expected.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(())
}

/// Data records with their 1-based line numbers.
fn records(text: &str, expected: &[&str]) -> CliResult<Vec<(u64, csv::StringRecord)>> {
    let mut rdr = reader(text);
    check_header(&mut rdr, expected)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::Parse(format!("line {line}: {e}"))
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != expected.len() {
            return Err(CliError::Parse(format!(
                "line {line}: expected {} fields, found {}",
                expected.len(),
                rec.len()
            )));
        }
        out.push((line, rec));
    }
    Ok(out)
}

pub fn parse_scheme(text: &str) -> CliResult<ReservationScheme> {
    let mut categories = Vec::new();
    let mut fractions = Vec::new();
    for (line, rec) in records(text, &["category", "numerator", "denominator"])? {
        let (name, num, den) = (&rec[0], &rec[1], &rec[2]);
        let value = if den.is_empty() {
            parse_rational(num).map_err(|e| CliError::Parse(format!("line {line}: {e}")))?
        } else {
            let n: i64 = num
                .parse()
                .map_err(|_| CliError::Parse(format!("line {line}: bad numerator {num:?}")))?;
            let d: i64 = den
                .parse()
                .map_err(|_| CliError::Parse(format!("line {line}: bad denominator {den:?}")))?;
            if d <= 0 {
                return Err(CliError::Parse(format!("line {line}: denominator must be positive")));
            }
            reserve_core::Rational::new(n, d)
        };
        categories.push(name.to_string());
        fractions.push(value);
    }
    Ok(ReservationScheme::new(categories, fractions)?)
}

pub fn parse_problem(text: &str, scheme: ReservationScheme) -> CliResult<ReservationProblem> {
    let mut departments: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut cells: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for (line, rec) in records(text, &["department", "period", "vacancies"])? {
        let name = &rec[0];
        if name.is_empty() {
            return Err(CliError::Parse(format!("line {line}: empty department")));
        }
        let period: usize = rec[1]
            .parse()
            .ok()
            .filter(|&p| p >= 1)
            .ok_or_else(|| CliError::Parse(format!("line {line}: bad period {:?}", &rec[1])))?;
        let vacancies: u64 = rec[2]
            .parse()
            .map_err(|_| CliError::Parse(format!("line {line}: bad vacancy count {:?}", &rec[2])))?;
        let d = *index.entry(name.to_string()).or_insert_with(|| {
            departments.push(name.to_string());
            departments.len() - 1
        });
        if cells.insert((period, d), vacancies).is_some() {
            return Err(CliError::Parse(format!(
                "line {line}: duplicate row for department {name:?}, period {period}"
            )));
        }
    }
    let periods = cells.keys().map(|&(p, _)| p).max().unwrap_or(0);
    if periods == 0 {
        return Err(CliError::Parse("problem file has no data rows".into()));
    }
    if let Some(gap) = (1..=periods).find(|&p| !cells.keys().any(|&(q, _)| q == p)) {
        return Err(CliError::Parse(format!(
            "periods must form 1..={periods}; period {gap} has no rows"
        )));
    }
    let vacancies = (1..=periods)
        .map(|p| {
            (0..departments.len())
                .map(|d| cells.get(&(p, d)).copied().unwrap_or(0))
                .collect()
        })
        .collect();
    Ok(ReservationProblem::new(departments, scheme, vacancies)?)
}

pub fn parse_roster(text: &str) -> CliResult<Roster> {
    Roster::parse_lines(text).map_err(|e| CliError::Parse(e.to_string()))
}

/// Loads a scheme file and a problem file.
pub fn load_problem(problem: &Path, scheme: &Path) -> CliResult<ReservationProblem> {
    let scheme = parse_scheme(&read_file(scheme)?)?;
    parse_problem(&read_file(problem)?, scheme)
}

/// Problem rows for every department and period, including zeros.
pub fn problem_to_csv(problem: &ReservationProblem) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["department", "period", "vacancies"]).expect("in-memory write");
    for (s, q) in problem.all_vacancies().iter().enumerate() {
        for (d, v) in problem.departments().iter().zip(q) {
            w.write_record([d.clone(), (s + 1).to_string(), v.to_string()])
                .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("csv output is UTF-8")
}

pub fn scheme_to_csv(scheme: &ReservationScheme) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["category", "numerator", "denominator"]).expect("in-memory write");
    for (c, a) in scheme.categories().iter().zip(scheme.fractions()) {
        w.write_record([c.clone(), a.numer().to_string(), a.denom().to_string()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("csv output is UTF-8")
}

fn table_rows<T>(
    w: &mut csv::Writer<Vec<u8>>,
    prefix: &[String],
    departments: &[String],
    internal: &[Vec<T>],
    row_totals: &[T],
    column_totals: &[T],
    grand_total: &T,
    show: impl Fn(&T) -> String,
) {
    let write = |w: &mut csv::Writer<Vec<u8>>, label: &str, cells: &[T], total: &T| {
        let mut rec: Vec<String> = prefix.to_vec();
        rec.push(label.to_string());
        rec.extend(cells.iter().map(&show));
        rec.push(show(total));
        w.write_record(&rec).expect("in-memory write");
    };
    for ((d, row), total) in departments.iter().zip(internal).zip(row_totals) {
        write(w, d, row, total);
    }
    write(w, "total", column_totals, grand_total);
}

fn header(prefix: &[&str], categories: &[String]) -> Vec<String> {
    let mut h: Vec<String> = prefix.iter().map(|s| s.to_string()).collect();
    h.push("department".into());
    h.extend(categories.iter().cloned());
    h.push("total".into());
    h
}

pub fn reservation_to_csv(problem: &ReservationProblem, table: &ReservationTable) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header(&[], problem.scheme().categories())).expect("in-memory write");
    table_rows(
        &mut w,
        &[],
        problem.departments(),
        table.internal(),
        table.row_totals(),
        table.column_totals(),
        &table.grand_total(),
        u64::to_string,
    );
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("csv output is UTF-8")
}

pub fn fair_share_to_csv(problem: &ReservationProblem, table: &FairShareTable) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header(&[], problem.scheme().categories())).expect("in-memory write");
    table_rows(
        &mut w,
        &[],
        problem.departments(),
        table.internal(),
        table.row_totals(),
        table.column_totals(),
        &table.grand_total(),
        |x| Exact(x).to_string(),
    );
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("csv output is UTF-8")
}

/// Several periods in one CSV, with a leading `period` column.
pub fn trace_to_csv(problem: &ReservationProblem, tables: &[&ReservationTable]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header(&["period"], problem.scheme().categories()))
        .expect("in-memory write");
    for table in tables {
        table_rows(
            &mut w,
            &[table.period().to_string()],
            problem.departments(),
            table.internal(),
            table.row_totals(),
            table.column_totals(),
            &table.grand_total(),
            u64::to_string,
        );
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("csv output is UTF-8")
}

/// Parses a reservation table written by [`reservation_to_csv`] and checks
/// it against the stored totals.
pub fn parse_reservation_csv(text: &str, period: usize) -> CliResult<ReservationTable> {
    let mut rdr = reader(text);
    let header = rdr
        .headers()
        .map_err(|e| CliError::Parse(format!("line 1: {e}")))?
        .clone();
    let n = header.len().checked_sub(2).filter(|&n| n >= 1).ok_or_else(|| {
        CliError::Parse("line 1: table needs department, category and total columns".into())
    })?;
    let mut rows: Vec<(Vec<u64>, u64)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::Parse(e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let nums = rec
            .iter()
            .skip(1)
            .map(|v| v.parse::<u64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| CliError::Parse(format!("line {line}: non-integer cell")))?;
        if nums.len() != n + 1 {
            return Err(CliError::Parse(format!("line {line}: wrong field count")));
        }
        rows.push((nums[..n].to_vec(), nums[n]));
    }
    let (totals, body) = rows
        .split_last()
        .ok_or_else(|| CliError::Parse("table has no total row".into()))?;
    Ok(ReservationTable::new(
        period,
        body.iter().map(|(r, _)| r.clone()).collect(),
        body.iter().map(|(_, t)| *t).collect(),
        totals.0.clone(),
        totals.1,
    )?)
}
