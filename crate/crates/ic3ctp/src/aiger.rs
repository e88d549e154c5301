//! AIGER circuit parsing: ASCII `aag` and binary `aig`, the AIGER 1.9 subset
//! used by hardware model checking benchmarks (I/L/O/A/B sections, latch
//! resets). Symbol tables and comments are skipped.

use std::fmt;

/// Reset value of a latch. Unspecified resets default to zero; uninitialized
/// latches are unconstrained in the initial states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatchReset {
    Zero,
    One,
    Uninitialized,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AigerLatch {
    /// Current-state literal (even).
    pub current: usize,
    /// Next-state literal.
    pub next: usize,
    pub reset: LatchReset,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AigerAnd {
    /// Output literal (even, strictly increasing across gates).
    pub lhs: usize,
    pub rhs0: usize,
    pub rhs1: usize,
}

/// An and-inverter graph with a single safety property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AigerModel {
    pub max_var: usize,
    pub inputs: Vec<usize>,
    pub latches: Vec<AigerLatch>,
    pub outputs: Vec<usize>,
    pub bads: Vec<usize>,
    pub ands: Vec<AigerAnd>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AigerError {
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: literal {literal} out of range (max var {max_var})")]
    LiteralOutOfRange {
        line: usize,
        literal: usize,
        max_var: usize,
    },
    #[error("line {line}: AND output literal {lhs} breaks monotone ordering")]
    NonMonotoneAnd { line: usize, lhs: usize },
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: trailing garbage: {text:?}")]
    TrailingGarbage { line: usize, text: String },
    #[error("unexpected end of input at line {line}: expected {expected}")]
    UnexpectedEof { line: usize, expected: String },
    #[error("unsupported section: {section} (justice/fairness/constraints are not handled)")]
    UnsupportedSection { section: String },
    #[error("multiple properties unsupported ({count} {kind} signals)")]
    MultipleProperties { count: usize, kind: String },
    #[error("no property: file declares neither outputs nor bad signals")]
    NoProperty,
    #[error("byte {offset}: truncated binary AND section")]
    TruncatedBinary { offset: usize },
}

impl AigerModel {
    /// The single bad literal: the `B` section when present, otherwise the
    /// sole output. Multiplicity was rejected at parse time.
    pub fn bad_literal(&self) -> usize {
        if let Some(&b) = self.bads.first() {
            b
        } else {
            self.outputs[0]
        }
    }

    fn validate(&self, and_lines: &[usize]) -> Result<(), AigerError> {
        let limit = 2 * self.max_var + 1;
        let check = |lit: usize, line: usize| {
            if lit > limit {
                Err(AigerError::LiteralOutOfRange {
                    line,
                    literal: lit,
                    max_var: self.max_var,
                })
            } else {
                Ok(())
            }
        };
        let mut defined = vec![false; self.max_var + 1]; // inputs, latches, AND outputs
        for (i, &l) in self.inputs.iter().enumerate() {
            let line = 2 + i;
            check(l, line)?;
            if l % 2 == 1 || l < 2 {
                return Err(AigerError::Malformed {
                    line,
                    reason: format!("input literal {l} must be even and nonconstant"),
                });
            }
            if std::mem::replace(&mut defined[l / 2], true) {
                return Err(AigerError::Malformed {
                    line,
                    reason: format!("variable {} defined twice", l / 2),
                });
            }
        }
        for (i, latch) in self.latches.iter().enumerate() {
            let line = 2 + self.inputs.len() + i;
            check(latch.current, line)?;
            check(latch.next, line)?;
            if latch.current % 2 == 1 || latch.current < 2 {
                return Err(AigerError::Malformed {
                    line,
                    reason: format!(
                        "latch literal {} must be even and nonconstant",
                        latch.current
                    ),
                });
            }
            if std::mem::replace(&mut defined[latch.current / 2], true) {
                return Err(AigerError::Malformed {
                    line,
                    reason: format!("variable {} defined twice", latch.current / 2),
                });
            }
        }
        let mut prev_lhs = 0;
        for (i, and) in self.ands.iter().enumerate() {
            let line = and_lines.get(i).copied().unwrap_or(0);
            check(and.lhs, line)?;
            check(and.rhs0, line)?;
            check(and.rhs1, line)?;
            if and.lhs % 2 == 1 || and.lhs <= prev_lhs || and.rhs0 >= and.lhs || and.rhs1 >= and.lhs
            {
                return Err(AigerError::NonMonotoneAnd { line, lhs: and.lhs });
            }
            prev_lhs = and.lhs;
            if std::mem::replace(&mut defined[and.lhs / 2], true) {
                return Err(AigerError::Malformed {
                    line,
                    reason: format!("variable {} defined twice", and.lhs / 2),
                });
            }
        }
        Ok(())
    }

    fn check_property_arity(&self) -> Result<(), AigerError> {
        if !self.bads.is_empty() {
            if self.bads.len() > 1 {
                return Err(AigerError::MultipleProperties {
                    count: self.bads.len(),
                    kind: "bad".into(),
                });
            }
        } else if self.outputs.len() > 1 {
            return Err(AigerError::MultipleProperties {
                count: self.outputs.len(),
                kind: "output".into(),
            });
        } else if self.outputs.is_empty() {
            return Err(AigerError::NoProperty);
        }
        Ok(())
    }

    /// Evaluates one transition step: given current latch and input values
    /// (in declaration order), returns the next latch values and whether the
    /// bad signal holds.
    pub fn simulate_step(&self, latches: &[bool], inputs: &[bool]) -> (Vec<bool>, bool) {
        debug_assert_eq!(latches.len(), self.latches.len());
        debug_assert_eq!(inputs.len(), self.inputs.len());
        let mut values = vec![false; self.max_var + 1];
        for (i, &l) in self.inputs.iter().enumerate() {
            values[l / 2] = inputs[i];
        }
        for (i, latch) in self.latches.iter().enumerate() {
            values[latch.current / 2] = latches[i];
        }
        let eval = |values: &[bool], lit: usize| -> bool {
            let v = values[lit / 2];
            if lit % 2 == 1 {
                !v
            } else {
                v
            }
        };
        for and in &self.ands {
            values[and.lhs / 2] = eval(&values, and.rhs0) && eval(&values, and.rhs1);
        }
        let next = self.latches.iter().map(|l| eval(&values, l.next)).collect();
        let bad = eval(&values, self.bad_literal());
        (next, bad)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Header {
    m: usize,
    i: usize,
    l: usize,
    o: usize,
    a: usize,
    b: usize,
}

fn parse_header(line: &str, line_no: usize, magic: &str) -> Result<Header, AigerError> {
    let mut parts = line.split_ascii_whitespace();
    let err = |reason: &str| AigerError::MalformedHeader {
        line: line_no,
        reason: reason.to_string(),
    };
    let got_magic = parts.next().ok_or_else(|| err("empty header"))?;
    if got_magic != magic {
        return Err(err(&format!("expected {magic:?}, got {got_magic:?}")));
    }
    let fields: Vec<usize> = parts
        .map(|p| p.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| err(&format!("non-numeric field: {e}")))?;
    if fields.len() < 5 {
        return Err(err(&format!(
            "expected at least 5 fields M I L O A, got {}",
            fields.len()
        )));
    }
    if fields.len() > 9 {
        return Err(err("too many header fields"));
    }
    // M I L O A [B [C [J [F]]]]
    let b = fields.get(5).copied().unwrap_or(0);
    for (idx, name) in [(6, "constraint"), (7, "justice"), (8, "fairness")] {
        if fields.get(idx).copied().unwrap_or(0) > 0 {
            return Err(AigerError::UnsupportedSection {
                section: name.to_string(),
            });
        }
    }
    let h = Header {
        m: fields[0],
        i: fields[1],
        l: fields[2],
        o: fields[3],
        a: fields[4],
        b,
    };
    if h.i + h.l + h.a > h.m {
        return Err(err(&format!(
            "max var {} below inputs+latches+ands {}",
            h.m,
            h.i + h.l + h.a
        )));
    }
    Ok(h)
}

struct Lines<'a> {
    rest: &'a str,
    line_no: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            rest: text,
            line_no: 0,
        }
    }

    fn next_line(&mut self, expected: &str) -> Result<&'a str, AigerError> {
        if self.rest.is_empty() {
            return Err(AigerError::UnexpectedEof {
                line: self.line_no + 1,
                expected: expected.to_string(),
            });
        }
        self.line_no += 1;
        match self.rest.find('\n') {
            Some(pos) => {
                let line = &self.rest[..pos];
                self.rest = &self.rest[pos + 1..];
                Ok(line.strip_suffix('\r').unwrap_or(line))
            }
            None => {
                let line = self.rest;
                self.rest = "";
                Ok(line.strip_suffix('\r').unwrap_or(line))
            }
        }
    }

    fn at_end(&self) -> bool {
        self.rest.is_empty()
    }
}

fn parse_literals(line: &str, line_no: usize, want: &str) -> Result<Vec<usize>, AigerError> {
    line.split_ascii_whitespace()
        .map(|t| {
            t.parse::<usize>().map_err(|_| AigerError::Malformed {
                line: line_no,
                reason: format!("expected {want}, found {t:?}"),
            })
        })
        .collect()
}

fn latch_from_fields(fields: &[usize], line_no: usize) -> Result<AigerLatch, AigerError> {
    match fields {
        [current, next] => Ok(AigerLatch {
            current: *current,
            next: *next,
            reset: LatchReset::Zero,
        }),
        [current, next, reset] => {
            let reset = match reset {
                0 => LatchReset::Zero,
                1 => LatchReset::One,
                r if *r == *current => LatchReset::Uninitialized,
                r => {
                    return Err(AigerError::Malformed {
                        line: line_no,
                        reason: format!("latch reset must be 0, 1 or the latch literal, got {r}"),
                    })
                }
            };
            Ok(AigerLatch {
                current: *current,
                next: *next,
                reset,
            })
        }
        _ => Err(AigerError::Malformed {
            line: line_no,
            reason: format!("latch line needs 2 or 3 fields, got {}", fields.len()),
        }),
    }
}

/// Skips the optional symbol table and comment section; anything else after
/// the defined sections is trailing garbage.
fn finish_trailer(lines: &mut Lines<'_>) -> Result<(), AigerError> {
    let mut in_comment = false;
    while !lines.at_end() {
        let line_no = lines.line_no + 1;
        let line = lines.next_line("symbol table or comments")?;
        if in_comment {
            continue;
        }
        if line == "c" {
            in_comment = true;
            continue;
        }
        let is_symbol = matches!(line.chars().next(), Some('i' | 'l' | 'o' | 'b'))
            && line[1..].starts_with(|c: char| c.is_ascii_digit());
        if !is_symbol && !line.is_empty() {
            return Err(AigerError::TrailingGarbage {
                line: line_no,
                text: line.to_string(),
            });
        }
    }
    Ok(())
}

/// Parses an ASCII AIGER (`aag`) document.
pub fn parse_aag(text: &str) -> Result<AigerModel, AigerError> {
    let mut lines = Lines::new(text);
    let header_line = lines.next_line("header")?;
    let h = parse_header(header_line, 1, "aag")?;
    let mut model = AigerModel {
        max_var: h.m,
        inputs: Vec::with_capacity(h.i),
        latches: Vec::with_capacity(h.l),
        outputs: Vec::with_capacity(h.o),
        bads: Vec::with_capacity(h.b),
        ands: Vec::with_capacity(h.a),
    };
    for _ in 0..h.i {
        let line_no = lines.line_no + 1;
        let line = lines.next_line("input literal")?;
        let fields = parse_literals(line, line_no, "input literal")?;
        if fields.len() != 1 {
            return Err(AigerError::Malformed {
                line: line_no,
                reason: format!("input line needs 1 field, got {}", fields.len()),
            });
        }
        model.inputs.push(fields[0]);
    }
    for _ in 0..h.l {
        let line_no = lines.line_no + 1;
        let line = lines.next_line("latch definition")?;
        let fields = parse_literals(line, line_no, "latch fields")?;
        model.latches.push(latch_from_fields(&fields, line_no)?);
    }
    for _ in 0..h.o {
        let line_no = lines.line_no + 1;
        let line = lines.next_line("output literal")?;
        let fields = parse_literals(line, line_no, "output literal")?;
        if fields.len() != 1 {
            return Err(AigerError::Malformed {
                line: line_no,
                reason: format!("output line needs 1 field, got {}", fields.len()),
            });
        }
        model.outputs.push(fields[0]);
    }
    for _ in 0..h.b {
        let line_no = lines.line_no + 1;
        let line = lines.next_line("bad literal")?;
        let fields = parse_literals(line, line_no, "bad literal")?;
        if fields.len() != 1 {
            return Err(AigerError::Malformed {
                line: line_no,
                reason: format!("bad line needs 1 field, got {}", fields.len()),
            });
        }
        model.bads.push(fields[0]);
    }
    let mut and_lines = Vec::with_capacity(h.a);
    for _ in 0..h.a {
        let line_no = lines.line_no + 1;
        let line = lines.next_line("AND gate definition")?;
        let fields = parse_literals(line, line_no, "AND gate fields")?;
        if fields.len() != 3 {
            return Err(AigerError::Malformed {
                line: line_no,
                reason: format!("AND line needs 3 fields, got {}", fields.len()),
            });
        }
        and_lines.push(line_no);
        model.ands.push(AigerAnd {
            lhs: fields[0],
            rhs0: fields[1],
            rhs1: fields[2],
        });
    }
    finish_trailer(&mut lines)?;
    model.validate(&and_lines)?;
    model.check_property_arity()?;
    Ok(model)
}

struct ByteCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    line_no: usize,
}

impl<'a> ByteCursor<'a> {
    fn next_line(&mut self) -> Result<&'a str, AigerError> {
        if self.pos >= self.bytes.len() {
            return Err(AigerError::UnexpectedEof {
                line: self.line_no + 1,
                expected: "text section line".to_string(),
            });
        }
        self.line_no += 1;
        let start = self.pos;
        let end = self.bytes[start..]
            .iter()
            .position(|&b| b == b'\n')
            .map(|p| start + p)
            .unwrap_or(self.bytes.len());
        self.pos = (end + 1).min(self.bytes.len());
        std::str::from_utf8(&self.bytes[start..end]).map_err(|_| AigerError::Malformed {
            line: self.line_no,
            reason: "non-ASCII bytes in text section".to_string(),
        })
    }

    fn read_delta(&mut self) -> Result<usize, AigerError> {
        let mut value = 0usize;
        let mut shift = 0u32;
        loop {
            let byte = *self
                .bytes
                .get(self.pos)
                .ok_or(AigerError::TruncatedBinary { offset: self.pos })?;
            self.pos += 1;
            value |= ((byte & 0x7f) as usize) << shift;
            if byte & 0x80 == 0 {
                return Ok(value);
            }
            shift += 7;
        }
    }
}

/// Parses a binary AIGER (`aig`) document with delta-encoded AND gates.
pub fn parse_aig(bytes: &[u8]) -> Result<AigerModel, AigerError> {
    let mut cur = ByteCursor {
        bytes,
        pos: 0,
        line_no: 0,
    };
    let header_line = cur.next_line()?.to_string();
    let h = parse_header(&header_line, 1, "aig")?;
    let mut model = AigerModel {
        max_var: h.m,
        inputs: (0..h.i).map(|i| 2 * (i + 1)).collect(),
        latches: Vec::with_capacity(h.l),
        outputs: Vec::with_capacity(h.o),
        bads: Vec::with_capacity(h.b),
        ands: Vec::with_capacity(h.a),
    };
    // In the binary format inputs and latch outputs are implicit:
    // inputs are variables 1..=I, latches I+1..=I+L, gates after that.
    for i in 0..h.l {
        let current = 2 * (h.i + i + 1);
        let ln = cur.line_no + 1;
        let line = cur.next_line()?;
        let fields = parse_literals(line, ln, "latch fields")?;
        let latch = match fields.len() {
            1 => AigerLatch {
                current,
                next: fields[0],
                reset: LatchReset::Zero,
            },
            2 => latch_from_fields(&[current, fields[0], fields[1]], ln)?,
            n => {
                return Err(AigerError::Malformed {
                    line: ln,
                    reason: format!("binary latch line needs 1 or 2 fields, got {n}"),
                })
            }
        };
        model.latches.push(latch);
    }
    for _ in 0..h.o {
        let ln = cur.line_no + 1;
        let fields = parse_literals(cur.next_line()?, ln, "output literal")?;
        if fields.len() != 1 {
            return Err(AigerError::Malformed {
                line: ln,
                reason: "output line needs 1 field".to_string(),
            });
        }
        model.outputs.push(fields[0]);
    }
    for _ in 0..h.b {
        let ln = cur.line_no + 1;
        let fields = parse_literals(cur.next_line()?, ln, "bad literal")?;
        if fields.len() != 1 {
            return Err(AigerError::Malformed {
                line: ln,
                reason: "bad line needs 1 field".to_string(),
            });
        }
        model.bads.push(fields[0]);
    }
    // Delta-encoded AND section.
    for i in 0..h.a {
        let lhs = 2 * (h.i + h.l + i + 1);
        let delta0 = cur.read_delta()?;
        let delta1 = cur.read_delta()?;
        let rhs0 = lhs
            .checked_sub(delta0)
            .ok_or(AigerError::TruncatedBinary { offset: cur.pos })?;
        let rhs1 = rhs0
            .checked_sub(delta1)
            .ok_or(AigerError::TruncatedBinary { offset: cur.pos })?;
        model.ands.push(AigerAnd { lhs, rhs0, rhs1 });
    }
    // Remaining bytes are symbols/comments; reuse the text trailer rules.
    let trailer = std::str::from_utf8(&bytes[cur.pos..]).map_err(|_| AigerError::Malformed {
        line: cur.line_no + 1,
        reason: "non-ASCII bytes in trailer".to_string(),
    })?;
    let mut lines = Lines::new(trailer);
    lines.line_no = cur.line_no;
    finish_trailer(&mut lines)?;
    model.validate(&[])?;
    model.check_property_arity()?;
    Ok(model)
}

impl fmt::Display for AigerModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "aig(max_var={}, inputs={}, latches={}, ands={})",
            self.max_var,
            self.inputs.len(),
            self.latches.len(),
            self.ands.len()
        )
    }
}
