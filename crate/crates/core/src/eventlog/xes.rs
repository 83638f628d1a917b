//! Minimal XES reader/writer: `concept:name` and `lifecycle:transition` only.

use std::io::{BufRead, BufReader, Read, Write};

use flate2::read::GzDecoder;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::{Activity, EventLog, Interner, LogError, Trace};

#[derive(Clone, Copy, Debug, Default)]
pub struct XesOptions {
    /// Keep only events whose `lifecycle:transition` is `complete`.
    pub complete_only: bool,
}

const GZIP_MAGIC: [u8; 2] = [0x1f, 0x8b];

/// Parses an XES document, transparently decompressing gzip input.
pub fn parse_xes<R: Read>(source: R, options: XesOptions) -> Result<EventLog, LogError> {
    let mut source = BufReader::new(source);
    let head = source.fill_buf()?;
    if head.starts_with(&GZIP_MAGIC) {
        parse_plain(BufReader::new(GzDecoder::new(source)), options)
    } else {
        parse_plain(source, options)
    }
}

#[derive(Default)]
struct PendingEvent {
    name: Option<Activity>,
    lifecycle: Option<String>,
}

fn parse_plain<R: BufRead>(source: R, options: XesOptions) -> Result<EventLog, LogError> {
    let mut reader = Reader::from_reader(source);
    let mut buf = Vec::new();
    let mut stack: Vec<Vec<u8>> = Vec::new();
    let mut interner = Interner::default();
    let mut log = EventLog::new();
    let mut traces_seen = 0usize;
    let mut trace: Option<Vec<Activity>> = None;
    let mut event: Option<PendingEvent> = None;

    loop {
        let ev = reader
            .read_event_into(&mut buf)
            .map_err(|e| LogError::Xml(format!("at byte {}: {e}", reader.error_position())))?;
        match ev {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let is_empty = matches!(ev, Event::Empty(_));
                let name = e.local_name().as_ref().to_vec();
                let parent = stack.last().map(Vec::as_slice);
                match name.as_slice() {
                    b"trace" if parent == Some(b"log") => {
                        traces_seen += 1;
                        if is_empty {
                            log.add(Trace::default(), 1);
                        } else {
                            trace = Some(Vec::new());
                        }
                    }
                    b"event" if parent == Some(b"trace") && !is_empty => {
                        event = Some(PendingEvent::default());
                    }
                    b"string" if parent == Some(b"event") => {
                        if let Some(pending) = event.as_mut() {
                            read_event_attribute(e, pending, &mut interner)?;
                        }
                    }
                    _ => {}
                }
                if !is_empty {
                    stack.push(name);
                }
            }
            Event::End(_) => {
                let name = stack
                    .pop()
                    .ok_or_else(|| LogError::Xml("unbalanced end tag".into()))?;
                match name.as_slice() {
                    b"event" => {
                        if let (Some(pending), Some(events)) = (event.take(), trace.as_mut()) {
                            let keep = !options.complete_only
                                || pending
                                    .lifecycle
                                    .as_deref()
                                    .is_some_and(|l| l.eq_ignore_ascii_case("complete"));
                            if let (true, Some(name)) = (keep, pending.name) {
                                events.push(name);
                            }
                        }
                    }
                    b"trace" if stack.last().map(Vec::as_slice) == Some(b"log") => {
                        if let Some(events) = trace.take() {
                            log.add(Trace::new(events), 1);
                        }
                    }
                    _ => {}
                }
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }
    if !stack.is_empty() {
        return Err(LogError::Xml("unexpected end of document".into()));
    }
    if traces_seen == 0 {
        return Err(LogError::Empty);
    }
    Ok(log)
}

fn read_event_attribute(
    e: &BytesStart<'_>,
    pending: &mut PendingEvent,
    interner: &mut Interner,
) -> Result<(), LogError> {
    let mut key = None;
    let mut value = None;
    for attr in e.attributes() {
        let attr = attr.map_err(|err| LogError::Xml(err.to_string()))?;
        let v = attr
            .unescape_value()
            .map_err(|err| LogError::Xml(err.to_string()))?
            .into_owned();
        match attr.key.as_ref() {
            b"key" => key = Some(v),
            b"value" => value = Some(v),
            _ => {}
        }
    }
    match (key.as_deref(), value) {
        (Some("concept:name"), Some(v)) => pending.name = interner.intern(&v),
        (Some("lifecycle:transition"), Some(v)) => pending.lifecycle = Some(v),
        _ => {}
    }
    Ok(())
}

/// Writes a plain XES document with one `<trace>` per trace instance.
pub fn write_xes<W: Write>(log: &EventLog, mut out: W) -> std::io::Result<()> {
    use quick_xml::escape::escape;
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(out, r#"<log xes.version="1.0" xes.features="nested-attributes">"#)?;
    writeln!(out, r#"  <extension name="Concept" prefix="concept" uri="http://www.xes-standard.org/concept.xesext"/>"#)?;
    writeln!(out, r#"  <extension name="Lifecycle" prefix="lifecycle" uri="http://www.xes-standard.org/lifecycle.xesext"/>"#)?;
    let mut case = 0u64;
    for (trace, m) in log.entries() {
        for _ in 0..m {
            case += 1;
            writeln!(out, "  <trace>")?;
            writeln!(out, r#"    <string key="concept:name" value="{case}"/>"#)?;
            for a in trace.events() {
                writeln!(out, "    <event>")?;
                writeln!(out, r#"      <string key="concept:name" value="{}"/>"#, escape(a.as_str()))?;
                writeln!(out, r#"      <string key="lifecycle:transition" value="complete"/>"#)?;
                writeln!(out, "    </event>")?;
            }
            writeln!(out, "  </trace>")?;
        }
    }
    writeln!(out, "</log>")?;
    out.flush()
}
