//! Streaming ingestion of DBLP-style publication records.
//!
//! Two input formats produce the same [`PaperRecord`] stream:
//!
//! * DBLP XML (optionally gzip-compressed), read event by event so memory
//!   stays bounded regardless of file size;
//! * a line-oriented fixture format, `date<TAB>author;author;...<TAB>title`,
//!   used by tests and small hand-built datasets.
//!
//! Records lacking authors or a usable date are skipped and tallied in a
//! [`SkipReport`] rather than aborting the stream.

use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;
use std::sync::mpsc::{sync_channel, Receiver};
use std::sync::OnceLock;
use std::thread;

use chrono::{Datelike, NaiveDate};
use flate2::read::MultiGzDecoder;
use quick_xml::escape::{resolve_html5_entity, resolve_predefined_entity};
use quick_xml::events::{BytesRef, Event};
use quick_xml::Reader;

use crate::error::{Error, Result};

/// Bumped whenever `data/stopwords.txt` changes.
pub const STOPWORDS_VERSION: u32 = 1;

const STOPWORDS_SRC: &str = include_str!("../data/stopwords.txt");

/// Element names that denote a publication directly under the DBLP root.
/// `www` (person pages) and `data` are deliberately absent.
pub const PUBLICATION_TAGS: &[&[u8]] = &[
    b"article",
    b"inproceedings",
    b"proceedings",
    b"book",
    b"incollection",
    b"phdthesis",
    b"mastersthesis",
];

/// One publication: the unit of ingestion.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PaperRecord {
    pub authors: Vec<String>,
    pub date: NaiveDate,
    pub title_tokens: Vec<String>,
}

impl PaperRecord {
    /// Normalizes authors (trimmed, empty names dropped, first occurrence
    /// kept) and tokenizes the title. Returns `None` when no author remains.
    pub fn new<I, S>(authors: I, date: NaiveDate, title: &str) -> Option<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut list: Vec<String> = Vec::new();
        for a in authors {
            let a = a.as_ref().trim();
            if !a.is_empty() && !list.iter().any(|x| x == a) {
                list.push(a.to_owned());
            }
        }
        if list.is_empty() {
            return None;
        }
        Some(PaperRecord {
            authors: list,
            date,
            title_tokens: tokenize_title(title),
        })
    }
}

/// The date `Y` splitting public from private collaborations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CutoffTimestamp(pub NaiveDate);

impl CutoffTimestamp {
    /// Strictly before `Y`.
    #[inline]
    pub fn is_public(&self, date: NaiveDate) -> bool {
        date < self.0
    }

    pub fn date(&self) -> NaiveDate {
        self.0
    }
}

impl FromStr for CutoffTimestamp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d")
            .map(CutoffTimestamp)
            .map_err(|_| Error::InvalidParameter(format!("cutoff {s:?} is not YYYY-MM-DD")))
    }
}

impl std::fmt::Display for CutoffTimestamp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0.format("%Y-%m-%d"))
    }
}

/// Parses `YYYY`, `YYYY-MM` or `YYYY-MM-DD`; missing parts default to 01.
pub fn parse_date(s: &str) -> Option<NaiveDate> {
    let mut parts = s.trim().split('-');
    let year: i32 = parts.next()?.parse().ok()?;
    let month: u32 = match parts.next() {
        Some(m) => m.parse().ok()?,
        None => 1,
    };
    let day: u32 = match parts.next() {
        Some(d) => d.parse().ok()?,
        None => 1,
    };
    if parts.next().is_some() {
        return None;
    }
    NaiveDate::from_ymd_opt(year, month, day)
}

fn stopwords() -> &'static Vec<&'static str> {
    static WORDS: OnceLock<Vec<&'static str>> = OnceLock::new();
    WORDS.get_or_init(|| {
        let mut w: Vec<&str> = STOPWORDS_SRC
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        w.sort_unstable();
        w.dedup();
        w
    })
}

pub fn is_stopword(token: &str) -> bool {
    stopwords().binary_search(&token).is_ok()
}

/// Lowercases, splits on non-alphanumeric runs, drops tokens shorter than
/// three characters and stopwords. Each keyword appears once, at its first
/// position.
pub fn tokenize_title(title: &str) -> Vec<String> {
    let lower = title.to_lowercase();
    let mut out: Vec<String> = Vec::new();
    for tok in lower.split(|c: char| !c.is_alphanumeric()) {
        if tok.chars().count() < 3 || is_stopword(tok) {
            continue;
        }
        if !out.iter().any(|t| t == tok) {
            out.push(tok.to_owned());
        }
    }
    out
}

/// Tally of publication elements seen while streaming.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SkipReport {
    pub encountered: u64,
    pub emitted: u64,
    pub missing_authors: u64,
    pub missing_date: u64,
}

impl SkipReport {
    pub fn skipped(&self) -> u64 {
        self.missing_authors + self.missing_date
    }
}

/// Opens a file, transparently decompressing gzip (detected by magic bytes).
pub fn open_input(path: &Path) -> Result<Box<dyn BufRead + Send>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::with_capacity(1 << 16, file);
    let head = reader.fill_buf().map_err(|e| Error::io(path, e))?;
    if head.starts_with(&[0x1f, 0x8b]) {
        Ok(Box::new(BufReader::with_capacity(
            1 << 16,
            MultiGzDecoder::new(reader),
        )))
    } else {
        Ok(Box::new(reader))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Field {
    Author,
    Title,
    Year,
}

#[derive(Default)]
struct Pending {
    authors: Vec<String>,
    title: String,
    year: String,
}

/// Streaming DBLP XML parser yielding one record per publication element.
pub struct DblpReader<R: BufRead> {
    reader: Reader<R>,
    buf: Vec<u8>,
    report: SkipReport,
    depth: usize,
    pending: Option<Pending>,
    field: Option<(Field, usize)>,
    text: String,
    done: bool,
}

impl<R: BufRead> DblpReader<R> {
    pub fn new(input: R) -> Self {
        let mut reader = Reader::from_reader(input);
        reader.config_mut().check_end_names = true;
        DblpReader {
            reader,
            buf: Vec::with_capacity(4096),
            report: SkipReport::default(),
            depth: 0,
            pending: None,
            field: None,
            text: String::new(),
            done: false,
        }
    }

    pub fn report(&self) -> SkipReport {
        self.report
    }

    fn xml_error(&self, message: impl Into<String>) -> Error {
        Error::Xml {
            offset: self.reader.error_position(),
            message: message.into(),
        }
    }

    fn finish(&mut self) -> Option<PaperRecord> {
        let p = self.pending.take()?;
        self.report.encountered += 1;
        if p.authors.is_empty() {
            self.report.missing_authors += 1;
            return None;
        }
        let date = p
            .year
            .trim()
            .parse::<i32>()
            .ok()
            .and_then(|y| NaiveDate::from_ymd_opt(y, 1, 1));
        let Some(date) = date else {
            self.report.missing_date += 1;
            return None;
        };
        match PaperRecord::new(&p.authors, date, &p.title) {
            Some(r) => {
                self.report.emitted += 1;
                Some(r)
            }
            None => {
                self.report.missing_authors += 1;
                None
            }
        }
    }

    fn push_ref(&mut self, r: &BytesRef<'_>) -> Result<()> {
        if r.is_char_ref() {
            match r.resolve_char_ref() {
                Ok(Some(c)) => self.text.push(c),
                Ok(None) => {}
                Err(e) => return Err(self.xml_error(e.to_string())),
            }
            return Ok(());
        }
        let name = r.decode().map_err(|e| self.xml_error(e.to_string()))?;
        match resolve_predefined_entity(&name).or_else(|| resolve_html5_entity(&name)) {
            Some(s) => self.text.push_str(s),
            None => {
                self.text.push('&');
                self.text.push_str(&name);
                self.text.push(';');
            }
        }
        Ok(())
    }

    fn next_record(&mut self) -> Result<Option<PaperRecord>> {
        loop {
            self.buf.clear();
            let event = match self.reader.read_event_into(&mut self.buf) {
                Ok(ev) => ev.into_owned(),
                Err(e) => {
                    self.done = true;
                    return Err(self.xml_error(e.to_string()));
                }
            };
            match event {
                Event::Start(e) => {
                    self.depth += 1;
                    if self.depth == 2 && PUBLICATION_TAGS.contains(&e.local_name().as_ref()) {
                        self.pending = Some(Pending::default());
                    } else if self.depth == 3 && self.pending.is_some() {
                        let field = match e.local_name().as_ref() {
                            b"author" => Some(Field::Author),
                            b"title" => Some(Field::Title),
                            b"year" => Some(Field::Year),
                            _ => None,
                        };
                        if let Some(f) = field {
                            self.field = Some((f, self.depth));
                            self.text.clear();
                        }
                    }
                }
                Event::Empty(e) => {
                    if self.depth == 1 && PUBLICATION_TAGS.contains(&e.local_name().as_ref()) {
                        self.pending = Some(Pending::default());
                        if let Some(r) = self.finish() {
                            return Ok(Some(r));
                        }
                    }
                }
                Event::End(_) => {
                    if let Some((f, d)) = self.field {
                        if d == self.depth {
                            self.field = None;
                            let text = std::mem::take(&mut self.text);
                            if let Some(p) = self.pending.as_mut() {
                                match f {
                                    Field::Author => p.authors.push(text),
                                    Field::Title => p.title = text,
                                    Field::Year => p.year = text,
                                }
                            }
                        }
                    }
                    let closing_publication = self.depth == 2 && self.pending.is_some();
                    self.depth = self.depth.saturating_sub(1);
                    if closing_publication {
                        if let Some(r) = self.finish() {
                            return Ok(Some(r));
                        }
                    }
                }
                Event::Text(t) => {
                    if self.field.is_some() {
                        let s = t.decode().map_err(|e| self.xml_error(e.to_string()))?;
                        self.text.push_str(&s);
                    }
                }
                Event::CData(t) => {
                    if self.field.is_some() {
                        let s = t.decode().map_err(|e| self.xml_error(e.to_string()))?;
                        self.text.push_str(&s);
                    }
                }
                Event::GeneralRef(r) => {
                    if self.field.is_some() {
                        self.push_ref(&r)?;
                    }
                }
                Event::Eof => {
                    self.done = true;
                    if self.depth != 0 {
                        return Err(self.xml_error("unexpected end of document"));
                    }
                    return Ok(None);
                }
                _ => {}
            }
        }
    }
}

impl<R: BufRead> Iterator for DblpReader<R> {
    type Item = Result<PaperRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        self.next_record().transpose()
    }
}

/// Reader for the tab-separated fixture format. Blank lines and lines
/// starting with `#` are ignored.
pub struct FixtureReader<R: BufRead> {
    lines: io::Lines<R>,
    source: String,
    line_no: usize,
    report: SkipReport,
}

impl<R: BufRead> FixtureReader<R> {
    pub fn new(input: R, source: impl Into<String>) -> Self {
        FixtureReader {
            lines: input.lines(),
            source: source.into(),
            line_no: 0,
            report: SkipReport::default(),
        }
    }

    pub fn report(&self) -> SkipReport {
        self.report
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Fixture {
            path: self.source.clone(),
            line: self.line_no,
            message: message.into(),
        }
    }
}

impl<R: BufRead> Iterator for FixtureReader<R> {
    type Item = Result<PaperRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(l) => l,
                Err(e) => return Some(Err(self.err(e.to_string()))),
            };
            self.line_no += 1;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.splitn(3, '\t').collect();
            if cols.len() != 3 {
                return Some(Err(self.err("expected date<TAB>authors<TAB>title")));
            }
            self.report.encountered += 1;
            let Some(date) = parse_date(cols[0]) else {
                self.report.missing_date += 1;
                continue;
            };
            match PaperRecord::new(cols[1].split(';'), date, cols[2]) {
                Some(r) => {
                    self.report.emitted += 1;
                    return Some(Ok(r));
                }
                None => self.report.missing_authors += 1,
            }
        }
    }
}

/// Writes records in the fixture format (title written as its tokens).
pub fn write_fixture_line(out: &mut impl io::Write, r: &PaperRecord) -> io::Result<()> {
    writeln!(
        out,
        "{:04}-{:02}-{:02}\t{}\t{}",
        r.date.year(),
        r.date.month(),
        r.date.day(),
        r.authors.join(";"),
        r.title_tokens.join(" ")
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputFormat {
    DblpXml,
    Fixture,
}

/// Streams every record of a file into `sink`, returning the skip tally.
pub fn for_each_record<F>(path: &Path, format: InputFormat, mut sink: F) -> Result<SkipReport>
where
    F: FnMut(PaperRecord),
{
    let input = open_input(path)?;
    match format {
        InputFormat::DblpXml => {
            let mut reader = DblpReader::new(input);
            for rec in reader.by_ref() {
                sink(rec?);
            }
            Ok(reader.report())
        }
        InputFormat::Fixture => {
            let mut reader = FixtureReader::new(input, path.display().to_string());
            for rec in reader.by_ref() {
                sink(rec?);
            }
            Ok(reader.report())
        }
    }
}

/// Runs a record iterator on its own thread, handing records over a queue
/// bounded at `capacity`. The join handle yields the producer's final result.
pub fn spawn_record_stream<I>(
    records: I,
    capacity: usize,
) -> (Receiver<PaperRecord>, thread::JoinHandle<Result<()>>)
where
    I: Iterator<Item = Result<PaperRecord>> + Send + 'static,
{
    let (tx, rx) = sync_channel(capacity.max(1));
    let handle = thread::spawn(move || {
        for rec in records {
            if tx.send(rec?).is_err() {
                break;
            }
        }
        Ok(())
    });
    (rx, handle)
}

/// Reads everything from `r` (used for small in-memory inputs in tests).
pub fn read_all_records<R: BufRead>(r: R, format: InputFormat) -> Result<(Vec<PaperRecord>, SkipReport)> {
    match format {
        InputFormat::DblpXml => {
            let mut reader = DblpReader::new(r);
            let recs = reader.by_ref().collect::<Result<Vec<_>>>()?;
            Ok((recs, reader.report()))
        }
        InputFormat::Fixture => {
            let mut reader = FixtureReader::new(r, "<memory>");
            let recs = reader.by_ref().collect::<Result<Vec<_>>>()?;
            Ok((recs, reader.report()))
        }
    }
}
