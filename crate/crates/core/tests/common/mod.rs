//! Independent reference implementations used as test oracles. They work
//! on '0'/'1' strings and plain integers rather than the library types.
#![allow(dead_code)]

use grn_pole::cartpole::{Action, CartParams, CartState};
use grn_pole::genome::BitGenome;

pub fn bit_string(g: &BitGenome) -> String {
    g.bits().iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn word(s: &str) -> u32 {
    u32::from_str_radix(s, 2).unwrap()
}

/// Column-count majority over five 32-character rows.
pub fn majority(body: &str) -> u32 {
    assert_eq!(body.len(), 160);
    let rows: Vec<&[u8]> = (0..5).map(|r| &body.as_bytes()[r * 32..(r + 1) * 32]).collect();
    let mut out = 0u32;
    for col in 0..32 {
        let ones = rows.iter().filter(|row| row[col] == b'1').count();
        if ones >= 3 {
            out |= 1 << (31 - col);
        }
    }
    out
}

/// (is_p, promoter_start, enhancer, inhibitor, protein)
pub type NaiveGene = (bool, usize, u32, u32, u32);

pub fn naive_scan(g: &BitGenome) -> Vec<NaiveGene> {
    let s = bit_string(g);
    let mut out = Vec::new();
    let mut pos = 64;
    while pos + 192 <= s.len() {
        let suffix = &s[pos + 24..pos + 32];
        let kind = match suffix {
            "00000000" => Some(false),
            "11111111" => Some(true),
            _ => None,
        };
        match kind {
            Some(is_p) => {
                out.push((
                    is_p,
                    pos,
                    word(&s[pos - 64..pos - 32]),
                    word(&s[pos - 32..pos]),
                    majority(&s[pos + 32..pos + 192]),
                ));
                pos += 192;
            }
            None => pos += 1,
        }
    }
    out
}

/// The cart equations written out directly with the textbook constants.
pub fn reference_step(s: [f64; 4], right: bool) -> [f64; 4] {
    let [x, th, xd, thd] = s;
    let (g, l, m, mc) = (9.8, 0.5, 0.1, 1.0);
    let f = if right { 10.0 } else { -10.0 };
    let tmp = (f + m * l * thd * thd * th.sin()) / (mc + m);
    let thacc = (g * th.sin() - th.cos() * tmp) / (l * (4.0 / 3.0 - m * th.cos() * th.cos() / (mc + m)));
    let xacc = (f + m * l * (thd * thd * th.sin() - thacc * th.cos())) / (mc + m);
    [x + 0.02 * xd, th + 0.02 * thd, xd + 0.02 * xacc, thd + 0.02 * thacc]
}

fn fails(s: &CartState) -> bool {
    s.x.abs() > 2.4 || s.theta.abs() > 12f64.to_radians()
}

/// Tries all 2^depth action sequences.
pub fn solvable_by_enumeration(initial: &CartState, depth: usize, params: &CartParams) -> bool {
    if fails(initial) {
        return false;
    }
    (0u64..(1 << depth)).any(|mask| {
        let mut s = *initial;
        for k in 0..depth {
            let a = if mask >> k & 1 == 1 {
                Action::Right
            } else {
                Action::Left
            };
            s = params.step(&s, a);
            if fails(&s) {
                return false;
            }
        }
        true
    })
}

/// Minimal DOT checker: `digraph ID { stmt; ... }` where each statement is
/// a node `ID [k=v, ...]` or an edge `ID -> ID [k=v, ...]`.
pub fn check_dot(text: &str) -> Result<(usize, usize), String> {
    let body = text
        .trim()
        .strip_prefix("digraph")
        .ok_or("missing digraph keyword")?
        .trim_start();
    let open = body.find('{').ok_or("missing {")?;
    let name = body[..open].trim();
    if !is_id(name) {
        return Err(format!("bad graph id {name:?}"));
    }
    let inner = body[open + 1..].strip_suffix('}').ok_or("missing closing }")?;
    let (mut nodes, mut edges) = (0, 0);
    for stmt in inner.split(";\n").map(str::trim).filter(|s| !s.is_empty()) {
        let stmt = stmt.trim_end_matches(';');
        let (head, attrs) = match stmt.find('[') {
            Some(i) => (&stmt[..i], Some(&stmt[i..])),
            None => (stmt, None),
        };
        if let Some(a) = attrs {
            let a = a
                .strip_prefix('[')
                .and_then(|a| a.strip_suffix(']'))
                .ok_or("bad attribute list")?;
            for kv in a.split(',') {
                let (k, v) = kv.split_once('=').ok_or_else(|| format!("bad attribute {kv:?}"))?;
                let v = v.trim();
                let quoted = v.len() >= 2 && v.starts_with('"') && v.ends_with('"');
                if !is_id(k.trim()) || !(is_id(v) || quoted) {
                    return Err(format!("bad attribute {kv:?}"));
                }
            }
        }
        let parts: Vec<&str> = head.split("->").map(str::trim).collect();
        if !parts.iter().all(|p| is_id(p)) {
            return Err(format!("bad statement {stmt:?}"));
        }
        match parts.len() {
            1 => nodes += 1,
            2 => edges += 1,
            _ => return Err(format!("chained edge {stmt:?}")),
        }
    }
    Ok((nodes, edges))
}

fn is_id(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => chars.all(|c| c.is_ascii_alphanumeric() || c == '_'),
        Some(c) if c.is_ascii_digit() => s.chars().all(|c| c.is_ascii_digit()),
        _ => false,
    }
}
