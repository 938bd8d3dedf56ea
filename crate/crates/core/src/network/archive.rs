//! Plain-text weight archive.
//!
//! ```text
//! DMSNN-WEIGHTS v1
//! #iterations=3000
//! #n=2
//! ...
//! pre_bundle,pre_idx,post_bundle,post_idx,weight
//! 0,0,4,0,1.2500000000000000e0
//! ```
//!
//! Weights carry 17 significant digits, so they read back bit for bit.

use std::fmt::Write as _;

use super::DmsnnNetwork;
use super::NetworkConfig;
use crate::config::{apply_network_entry, network_pairs, split_entry};
use crate::error::{Error, Result};

/// First line of every archive.
pub const ARCHIVE_VERSION: &str = "DMSNN-WEIGHTS v1";

const COLUMNS: &str = "pre_bundle,pre_idx,post_bundle,post_idx,weight";

pub(super) fn write(net: &DmsnnNetwork) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{ARCHIVE_VERSION}");
    let _ = writeln!(s, "#iterations={}", net.iterations());
    for (k, v) in network_pairs(net.config()) {
        let _ = writeln!(s, "#{k}={v}");
    }
    let _ = writeln!(s, "{COLUMNS}");
    for syn in net.synapses() {
        let _ = writeln!(
            s,
            "{},{},{},{},{:.16e}",
            syn.pre.0, syn.pre.1, syn.post.0, syn.post.1, syn.weight
        );
    }
    s
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub(super) fn read(text: &str) -> Result<DmsnnNetwork> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    match lines.next() {
        Some((_, ARCHIVE_VERSION)) => {}
        Some((n, other)) => {
            return Err(parse_err(n, format!("expected `{ARCHIVE_VERSION}`, found `{other}`")))
        }
        None => return Err(parse_err(1, "empty archive")),
    }

    let mut config = NetworkConfig::planar_2dof();
    let mut iterations = 0usize;
    let mut saw_columns = false;
    let mut rows = Vec::new();
    for (n, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        if !saw_columns {
            if let Some(h) = line.strip_prefix('#') {
                let e = split_entry(h, n)?;
                if e.key == "iterations" {
                    iterations = e
                        .value
                        .parse()
                        .map_err(|_| parse_err(n, format!("bad iteration count `{}`", e.value)))?;
                } else if !apply_network_entry(&mut config, &e)? {
                    return Err(parse_err(n, format!("unknown key `{}`", e.key)));
                }
                continue;
            }
            if line != COLUMNS {
                return Err(parse_err(n, format!("expected column header `{COLUMNS}`")));
            }
            saw_columns = true;
            continue;
        }
        rows.push((n, line));
    }
    if !saw_columns {
        return Err(parse_err(text.lines().count().max(1), "missing column header"));
    }

    config.validate()?;
    let mut net = DmsnnNetwork::build(config)?;
    let expected = net.config().plastic_synapse_count();
    if rows.len() != expected {
        let last = rows.last().map_or(1, |r| r.0);
        return Err(parse_err(
            last,
            format!("archive holds {} weights, expected {expected}", rows.len()),
        ));
    }
    let (lo, hi) = (net.config().c_i, net.config().c_e);
    for (n, line) in rows {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(parse_err(n, format!("expected 5 fields, found {}", fields.len())));
        }
        let idx = |k: usize| -> Result<usize> {
            fields[k]
                .trim()
                .parse()
                .map_err(|_| parse_err(n, format!("bad index `{}`", fields[k])))
        };
        let pre = (idx(0)?, idx(1)?);
        let post = (idx(2)?, idx(3)?);
        let w: f64 = fields[4]
            .trim()
            .parse()
            .map_err(|_| parse_err(n, format!("bad weight `{}`", fields[4])))?;
        if !w.is_finite() || w < lo || w > hi {
            return Err(parse_err(n, format!("weight {w} outside [{lo}, {hi}]")));
        }
        net.set_weight(pre, post, w)
            .map_err(|e| parse_err(n, e.to_string()))?;
    }
    net.set_iterations(iterations);
    Ok(net)
}
