//! The derivation spec file format.
//!
//! Line-oriented. `#` starts a comment. Four sections, each opened by a
//! header at the start of a line: `ring:` (comma-separated variable names),
//! `relations:` (expressions separated by `;`), `derivation:` (entries
//! `var -> expr` separated by `;`, missing variables default to 0), and
//! `options:` (`key = value` pairs separated by `;`, keys `max_iter` and
//! `bound`). Content may continue on following lines until the next header.

use crate::cli::expr::parse_expr;
use crate::lnd::{Derivation, QuotientAlgebra, DEFAULT_NILPOTENCY_BOUND};
use crate::poly::{Poly, Ring};
use crate::rees;
use crate::{Error, Result};

/// Settings from the `options:` section.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpecOptions {
    pub max_iter: Option<u32>,
    pub bound: Option<u32>,
}

/// A parsed and realized spec.
#[derive(Debug, Clone)]
pub struct ParsedSpec {
    pub derivation: Derivation,
    pub options: SpecOptions,
}

impl ParsedSpec {
    pub fn algebra(&self) -> &QuotientAlgebra {
        self.derivation.algebra()
    }

    /// Nilpotency bound, after option resolution.
    pub fn bound(&self) -> u32 {
        self.derivation.nilpotency_bound_used()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Ring,
    Relations,
    Derivation,
    Options,
}

/// One content fragment with its source position.
struct Fragment {
    line: usize,
    col: usize,
    text: String,
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Splits a fragment at `sep`, keeping 1-based column positions of each
/// trimmed piece; whitespace-only pieces are dropped.
fn split_fragment(frag: &Fragment, sep: char) -> Vec<Fragment> {
    let mut out = Vec::new();
    let mut col = frag.col;
    for piece in frag.text.split(sep) {
        let lead = piece.chars().take_while(|c| c.is_whitespace()).count();
        let trimmed = piece.trim();
        if !trimmed.is_empty() {
            out.push(Fragment {
                line: frag.line,
                col: col + lead,
                text: trimmed.to_string(),
            });
        }
        col += piece.chars().count() + 1;
    }
    out
}

/// Splits raw text into per-section fragments. Headers may appear once each.
fn sectionize(text: &str) -> Result<Vec<(Section, Fragment)>> {
    let mut out = Vec::new();
    let mut current: Option<Section> = None;
    let mut seen: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        let lead = line.chars().take_while(|c| c.is_whitespace()).count();
        let body = line.trim_start();
        let header = body
            .split_once(':')
            .filter(|(name, _)| is_identifier(name.trim_end()));
        if let Some((name, rest)) = header {
            let name_len = name.chars().count();
            let name = name.trim_end();
            let section = match name {
                "ring" => Section::Ring,
                "relations" => Section::Relations,
                "derivation" => Section::Derivation,
                "options" => Section::Options,
                _ => return Err(err(line_no, lead + 1, format!("unknown section `{name}`"))),
            };
            if seen.contains(&section) {
                return Err(err(line_no, lead + 1, format!("duplicate section `{name}`")));
            }
            seen.push(section);
            current = Some(section);
            let rest_lead = rest.chars().take_while(|c| c.is_whitespace()).count();
            let content = rest.trim();
            if !content.is_empty() {
                let col = lead + name_len + 2 + rest_lead;
                out.push((section, Fragment { line: line_no, col, text: content.to_string() }));
            }
        } else {
            match current {
                Some(section) => {
                    let content = line.trim();
                    out.push((
                        section,
                        Fragment { line: line_no, col: lead + 1, text: content.to_string() },
                    ));
                }
                None => {
                    return Err(err(
                        line_no,
                        lead + 1,
                        "expected a section header such as `ring:`",
                    ))
                }
            }
        }
    }
    Ok(out)
}

fn parse_ring(fragments: &[Fragment]) -> Result<Vec<Fragment>> {
    let mut names: Vec<Fragment> = Vec::new();
    for frag in fragments {
        for piece in split_fragment(frag, ',') {
            if !is_identifier(&piece.text) {
                return Err(err(
                    piece.line,
                    piece.col,
                    format!("invalid variable name `{}`", piece.text),
                ));
            }
            if piece.text == rees::UPSILON {
                return Err(err(
                    piece.line,
                    piece.col,
                    format!("`{}` is reserved and may not be declared", rees::UPSILON),
                ));
            }
            if names.iter().any(|n| n.text == piece.text) {
                return Err(err(
                    piece.line,
                    piece.col,
                    format!("duplicate variable `{}`", piece.text),
                ));
            }
            names.push(piece);
        }
    }
    Ok(names)
}

fn parse_options(fragments: &[Fragment]) -> Result<SpecOptions> {
    let mut options = SpecOptions::default();
    for frag in fragments {
        for entry in split_fragment(frag, ';') {
            let Some((key_part, value_part)) = entry.text.split_once('=') else {
                return Err(err(entry.line, entry.col, "expected `key = value`"));
            };
            let key = key_part.trim();
            let value_lead: usize = key_part.chars().count()
                + 1
                + value_part.chars().take_while(|c| c.is_whitespace()).count();
            let value_col = entry.col + value_lead;
            let value: u32 = value_part.trim().parse().map_err(|_| {
                err(entry.line, value_col, "expected a non-negative integer value")
            })?;
            let slot = match key {
                "max_iter" => &mut options.max_iter,
                "bound" => &mut options.bound,
                _ => return Err(err(entry.line, entry.col, format!("unknown option `{key}`"))),
            };
            if slot.is_some() {
                return Err(err(entry.line, entry.col, format!("duplicate option `{key}`")));
            }
            *slot = Some(value);
        }
    }
    Ok(options)
}

/// Parses a spec and builds the derivation. With `validate` the derivation is
/// checked for well-definedness and local nilpotency within the resolved
/// bound; `bound_override` takes precedence over the `options:` section.
pub fn parse_spec(text: &str, validate: bool, bound_override: Option<u32>) -> Result<ParsedSpec> {
    let sections = sectionize(text)?;
    let collect = |s: Section| -> Vec<&Fragment> {
        sections.iter().filter(|(sec, _)| *sec == s).map(|(_, f)| f).collect()
    };
    let ring_frags: Vec<Fragment> = collect(Section::Ring)
        .into_iter()
        .map(|f| Fragment { line: f.line, col: f.col, text: f.text.clone() })
        .collect();
    let names = parse_ring(&ring_frags)?;
    if names.is_empty() {
        return Err(Error::InvalidInput("the spec declares no ring variables".to_string()));
    }
    let name_strs: Vec<&str> = names.iter().map(|n| n.text.as_str()).collect();
    let ring = Ring::new(&name_strs);

    let mut relations = Vec::new();
    for frag in collect(Section::Relations) {
        for piece in split_fragment(frag, ';') {
            relations.push(parse_expr(&piece.text, piece.line, piece.col)?.eval(&ring)?);
        }
    }

    let mut images: Vec<Option<Poly>> = vec![None; ring.nvars()];
    for frag in collect(Section::Derivation) {
        for entry in split_fragment(frag, ';') {
            let Some((lhs, rhs)) = entry.text.split_once("->") else {
                return Err(err(entry.line, entry.col, "expected `var -> expression`"));
            };
            let var = lhs.trim();
            if !is_identifier(var) {
                return Err(err(
                    entry.line,
                    entry.col,
                    format!("invalid variable name `{var}` before `->`"),
                ));
            }
            let Some(index) = ring.var_index(var) else {
                return Err(Error::UndeclaredVariable {
                    name: var.to_string(),
                    line: entry.line,
                    col: entry.col,
                });
            };
            if images[index].is_some() {
                return Err(err(
                    entry.line,
                    entry.col,
                    format!("duplicate derivation entry for `{var}`"),
                ));
            }
            let rhs_lead: usize = lhs.chars().count()
                + 2
                + rhs.chars().take_while(|c| c.is_whitespace()).count();
            let image = parse_expr(rhs.trim(), entry.line, entry.col + rhs_lead)?.eval(&ring)?;
            images[index] = Some(image);
        }
    }
    let images: Vec<Poly> = images
        .into_iter()
        .map(|img| img.unwrap_or_else(|| Poly::zero(&ring)))
        .collect();

    let option_frags: Vec<Fragment> = collect(Section::Options)
        .into_iter()
        .map(|f| Fragment { line: f.line, col: f.col, text: f.text.clone() })
        .collect();
    let options = parse_options(&option_frags)?;

    let algebra = QuotientAlgebra::new(&ring, relations);
    let bound = bound_override.or(options.bound).unwrap_or(DEFAULT_NILPOTENCY_BOUND);
    let derivation = if validate {
        Derivation::new(&algebra, images, bound)?
    } else {
        Derivation::unvalidated(&algebra, images)?
    };
    Ok(ParsedSpec { derivation, options })
}
