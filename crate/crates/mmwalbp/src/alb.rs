//! Parser for the plain-text `.alb` instance format used by the public
//! assembly line balancing repositories.
//!
//! Recognized sections: `<number of tasks>`, `<cycle time>`,
//! `<order strength>`, `<task times>`, `<precedence relations>` and the
//! `<end>` sentinel. Anything else is rejected loudly rather than
//! silently skipped.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: unknown section {name:?}")]
    UnknownSection { line: usize, name: String },
    #[error("line {line}: malformed entry: {detail}")]
    Malformed { line: usize, detail: String },
    #[error("line {line}: duplicate time entry for task {task}")]
    DuplicateTime { line: usize, task: usize },
    #[error("line {line}: task {task} is out of range 1..={n}")]
    DanglingReference { line: usize, task: usize, n: usize },
    #[error("missing required section {0:?}")]
    MissingSection(&'static str),
    #[error("no time entry for task {0}")]
    MissingTime(usize),
}

/// Parsed `.alb` file: task count, integer task times (by 1-based id)
/// and direct precedence edges. Cycle time and order strength are kept
/// when present; the solver takes its cycle time from elsewhere.
#[derive(Debug, Clone)]
pub struct AlbFile {
    pub task_count: usize,
    pub times: Vec<f64>,
    pub edges: Vec<(usize, usize)>,
    pub cycle_time: Option<f64>,
    pub order_strength: Option<f64>,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    TaskCount,
    CycleTime,
    OrderStrength,
    TaskTimes,
    Precedence,
    Done,
}

/// Parses `.alb` text into task times and precedence edges.
pub fn load_alb(text: &str) -> Result<AlbFile, ParseError> {
    let mut section = Section::None;
    let mut task_count: Option<usize> = None;
    let mut cycle_time = None;
    let mut order_strength = None;
    // (line, task, time) until the task count is known
    let mut raw_times: Vec<(usize, usize, f64)> = Vec::new();
    let mut raw_edges: Vec<(usize, usize, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || section == Section::Done {
            continue;
        }
        if trimmed.starts_with('<') {
            section = match trimmed {
                "<number of tasks>" => Section::TaskCount,
                "<cycle time>" => Section::CycleTime,
                "<order strength>" => Section::OrderStrength,
                "<task times>" => Section::TaskTimes,
                "<precedence relations>" => Section::Precedence,
                "<end>" => Section::Done,
                other => {
                    return Err(ParseError::UnknownSection {
                        line,
                        name: other.to_string(),
                    })
                }
            };
            continue;
        }
        match section {
            Section::TaskCount => {
                task_count = Some(parse_num::<usize>(trimmed, line)?);
            }
            Section::CycleTime => {
                cycle_time = Some(parse_num::<f64>(trimmed, line)?);
            }
            Section::OrderStrength => {
                order_strength = Some(parse_num::<f64>(trimmed, line)?);
            }
            Section::TaskTimes => {
                let mut parts = trimmed.split_whitespace();
                let id: usize = parse_num(parts.next().unwrap_or(""), line)?;
                let time: f64 = parse_num(parts.next().unwrap_or(""), line)?;
                if parts.next().is_some() {
                    return Err(ParseError::Malformed {
                        line,
                        detail: format!("expected \"id time\", got {trimmed:?}"),
                    });
                }
                raw_times.push((line, id, time));
            }
            Section::Precedence => {
                let (a, b) = trimmed.split_once(',').ok_or_else(|| ParseError::Malformed {
                    line,
                    detail: format!("expected \"i,j\", got {trimmed:?}"),
                })?;
                let a: usize = parse_num(a.trim(), line)?;
                let b: usize = parse_num(b.trim(), line)?;
                raw_edges.push((line, a, b));
            }
            Section::None | Section::Done => {
                return Err(ParseError::Malformed {
                    line,
                    detail: format!("content outside any section: {trimmed:?}"),
                })
            }
        }
    }

    let n = task_count.ok_or(ParseError::MissingSection("<number of tasks>"))?;
    if raw_times.is_empty() {
        return Err(ParseError::MissingSection("<task times>"));
    }
    let mut times = vec![None; n + 1];
    for (line, id, time) in raw_times {
        if id == 0 || id > n {
            return Err(ParseError::DanglingReference { line, task: id, n });
        }
        if times[id].is_some() {
            return Err(ParseError::DuplicateTime { line, task: id });
        }
        times[id] = Some(time);
    }
    let times: Vec<f64> = (1..=n)
        .map(|id| times[id].ok_or(ParseError::MissingTime(id)))
        .collect::<Result<_, _>>()?;
    let mut edges = Vec::with_capacity(raw_edges.len());
    for (line, a, b) in raw_edges {
        for t in [a, b] {
            if t == 0 || t > n {
                return Err(ParseError::DanglingReference { line, task: t, n });
            }
        }
        edges.push((a, b));
    }
    Ok(AlbFile {
        task_count: n,
        times,
        edges,
        cycle_time,
        order_strength,
    })
}

fn parse_num<T: std::str::FromStr>(s: &str, line: usize) -> Result<T, ParseError> {
    s.parse().map_err(|_| ParseError::Malformed {
        line,
        detail: format!("not a number: {s:?}"),
    })
}
