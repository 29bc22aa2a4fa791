//! PRISM explicit-model files, label files, Graphviz output and traces.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::engine::{Label, Semantics, SimTrace, TransitionSystem};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExportError {
    #[error("the transition system is partial (state bound reached); pass --allow-partial to export it anyway")]
    PartialSystem,
    #[error("malformed transition file, line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Transitions grouped by source, each group sorted by destination.
fn rows<S: Scalar>(ts: &TransitionSystem<S>) -> Vec<Vec<(usize, String, Option<String>)>> {
    let n = ts.state_count();
    let mut out: Vec<Vec<(usize, String, Option<String>)>> = vec![Vec::new(); n];
    let mut outdeg = vec![0usize; n];
    for t in &ts.transitions {
        outdeg[t.src] += 1;
    }
    for t in &ts.transitions {
        let value = match &t.label {
            Label::None => {
                S::from_ratio(&BigRational::new(BigInt::from(1), BigInt::from(outdeg[t.src]))).render()
            }
            l => l.value().expect("labelled").render(),
        };
        out[t.src].push((t.dst, value, t.label.action().map(str::to_string)));
    }
    out
}

/// The transition matrix in PRISM explicit format (`.tra`).
///
/// brs systems are written as the uniform DTMC over successors. Deadlocked
/// states receive a self-loop with value 1 (with the pseudo-action `deadlock`
/// for abrs).
pub fn write_tra<S: Scalar>(ts: &TransitionSystem<S>, allow_partial: bool) -> Result<String, ExportError> {
    if ts.partial && !allow_partial {
        return Err(ExportError::PartialSystem);
    }
    let one = S::from_usize(1).render();
    let mut groups = rows(ts);
    let mut body = String::new();
    if ts.semantics == Semantics::Abrs {
        let mut choices = 0;
        let mut count = 0;
        for (src, g) in groups.iter_mut().enumerate() {
            if g.is_empty() {
                let _ = writeln!(body, "{src} 0 {src} {one} deadlock");
                choices += 1;
                count += 1;
                continue;
            }
            let mut actions: Vec<String> = Vec::new();
            for (_, _, a) in g.iter() {
                let a = a.clone().unwrap_or_default();
                if !actions.contains(&a) {
                    actions.push(a);
                }
            }
            choices += actions.len();
            for (c, a) in actions.iter().enumerate() {
                let mut lines: Vec<&(usize, String, Option<String>)> =
                    g.iter().filter(|(_, _, x)| x.as_deref().unwrap_or_default() == a).collect();
                lines.sort_by_key(|(d, _, _)| *d);
                for (dst, v, _) in lines {
                    let _ = writeln!(body, "{src} {c} {dst} {v} {a}");
                    count += 1;
                }
            }
        }
        return Ok(format!("{} {choices} {count}\n{body}", ts.state_count()));
    }
    let mut count = 0;
    for (src, g) in groups.iter_mut().enumerate() {
        if g.is_empty() {
            let _ = writeln!(body, "{src} {src} {one}");
            count += 1;
            continue;
        }
        g.sort_by_key(|(d, _, _)| *d);
        for (dst, v, _) in g.iter() {
            let _ = writeln!(body, "{src} {dst} {v}");
            count += 1;
        }
    }
    Ok(format!("{} {count}\n{body}", ts.state_count()))
}

/// One line of a `.tra` file.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TraRow {
    pub src: usize,
    pub choice: Option<usize>,
    pub dst: usize,
    /// The value exactly as written.
    pub value: String,
    pub action: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraFile {
    pub states: usize,
    pub choices: Option<usize>,
    pub rows: Vec<TraRow>,
}

/// Reads back the output of [`write_tra`].
pub fn read_tra(text: &str) -> Result<TraFile, ExportError> {
    let err = |line: usize, msg: &str| ExportError::Parse {
        line,
        msg: msg.to_string(),
    };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| err(1, "empty file"))?;
    let h: Vec<usize> = header
        .split_whitespace()
        .map(|x| x.parse().map_err(|_| err(1, "bad header")))
        .collect::<Result<_, _>>()?;
    let (states, choices, count) = match h[..] {
        [n, t] => (n, None, t),
        [n, c, t] => (n, Some(c), t),
        _ => return Err(err(1, "header must have two or three fields")),
    };
    let mut rows = Vec::with_capacity(count);
    for (i, l) in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        let num = |s: &str| s.parse::<usize>().map_err(|_| err(i + 1, "bad index"));
        let row = match (choices.is_some(), &f[..]) {
            (false, [s, d, v]) => TraRow {
                src: num(s)?,
                choice: None,
                dst: num(d)?,
                value: v.to_string(),
                action: None,
            },
            (true, [s, c, d, v, a]) => TraRow {
                src: num(s)?,
                choice: Some(num(c)?),
                dst: num(d)?,
                value: v.to_string(),
                action: Some(a.to_string()),
            },
            _ => return Err(err(i + 1, "wrong number of fields")),
        };
        if row.src >= states || row.dst >= states {
            return Err(err(i + 1, "state index out of range"));
        }
        rows.push(row);
    }
    if rows.len() != count {
        return Err(err(1, "transition count does not match header"));
    }
    Ok(TraFile { states, choices, rows })
}

/// PRISM label file for an arbitrary list of predicates over `states` states.
pub fn label_map(names: &[&str], holds: &[BTreeSet<usize>], states: usize) -> String {
    let mut out = String::from("0=\"init\"");
    for (i, n) in names.iter().enumerate() {
        let _ = write!(out, " {}=\"{n}\"", i + 1);
    }
    out.push('\n');
    for s in 0..states {
        let mut idx: Vec<usize> = Vec::new();
        if s == 0 {
            idx.push(0);
        }
        idx.extend(
            holds
                .iter()
                .enumerate()
                .filter(|(_, set)| set.contains(&s))
                .map(|(i, _)| i + 1),
        );
        if !idx.is_empty() {
            let idx: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
            let _ = writeln!(out, "{s}: {}", idx.join(" "));
        }
    }
    out
}

/// Predicate labels of every state (PRISM `.lab` format).
pub fn write_labels<S>(ts: &TransitionSystem<S>) -> String {
    let names: Vec<&str> = ts.labelling.iter().map(|(n, _)| n.as_str()).collect();
    let sets: Vec<BTreeSet<usize>> = ts.labelling.iter().map(|(_, s)| s.clone()).collect();
    label_map(&names, &sets, ts.state_count())
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz description of the transition system. The initial state is bold
/// and every state is annotated with the predicates holding in it.
pub fn write_dot<S: Scalar>(ts: &TransitionSystem<S>) -> String {
    let mut out = String::from("digraph ts {\n");
    for s in 0..ts.state_count() {
        let mut label = s.to_string();
        for p in ts.labels_of(s) {
            label.push_str("\\n");
            label.push_str(&dot_escape(p));
        }
        let style = if s == 0 { ", style=bold" } else { "" };
        let _ = writeln!(out, "  {s} [label=\"{label}\"{style}];");
    }
    let mut ts_sorted: Vec<_> = ts.transitions.iter().collect();
    ts_sorted.sort_by_key(|t| (t.src, t.dst));
    for t in ts_sorted {
        match &t.label {
            Label::None => {
                let _ = writeln!(out, "  {} -> {};", t.src, t.dst);
            }
            l => {
                let _ = writeln!(out, "  {} -> {} [label=\"{}\"];", t.src, t.dst, dot_escape(&l.render()));
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Tab-separated trace: `step rule label time`, starting with the initial
/// state as step 0.
pub fn write_trace(trace: &SimTrace) -> String {
    let mut out = String::from("step\trule\tlabel\ttime\n0\tinit\t-\t0\n");
    for (i, s) in trace.steps.iter().enumerate() {
        let _ = writeln!(out, "{}\t{}\t{}\t{}", i + 1, s.rule, s.label, s.time);
    }
    out
}
