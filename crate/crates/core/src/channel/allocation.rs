use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::trace::parse_kft_rows;
use crate::error::{Error, Result};

/// Binary RB assignment. Each (subcarrier, slot) holds at most one slice,
/// so exclusivity holds by construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RbAllocation {
    slices: usize,
    subcarriers: usize,
    /// `owner[t][f]`; slots past the end are unassigned.
    owner: Vec<Vec<Option<usize>>>,
}

impl RbAllocation {
    pub fn new(slices: usize, subcarriers: usize) -> Self {
        RbAllocation { slices, subcarriers, owner: Vec::new() }
    }

    /// From a dense `x[k][f][t]` 0/1 tensor, rejecting exclusivity violations.
    pub fn from_binary(x: &[Vec<Vec<u8>>]) -> Result<Self> {
        let slices = x.len();
        let subcarriers = x.first().map_or(0, Vec::len);
        let mut alloc = RbAllocation::new(slices, subcarriers);
        for (k, per_k) in x.iter().enumerate() {
            if per_k.len() != subcarriers {
                return Err(Error::config("ragged allocation tensor"));
            }
            for (f, per_f) in per_k.iter().enumerate() {
                for (t, &bit) in per_f.iter().enumerate() {
                    match bit {
                        0 => {}
                        1 => alloc.assign(k, f, t)?,
                        other => {
                            return Err(Error::config(format!("x[{k}][{f}][{t}] = {other} is not binary")))
                        }
                    }
                }
            }
        }
        Ok(alloc)
    }

    pub fn slices(&self) -> usize {
        self.slices
    }

    pub fn subcarriers(&self) -> usize {
        self.subcarriers
    }

    /// Number of slots touched so far.
    pub fn slots_used(&self) -> usize {
        self.owner.len()
    }

    pub fn assign(&mut self, k: usize, f: usize, t: usize) -> Result<()> {
        if k >= self.slices || f >= self.subcarriers {
            return Err(Error::config(format!("RB ({k}, {f}, {t}) outside allocation dims")));
        }
        if self.owner.len() <= t {
            self.owner.resize(t + 1, vec![None; self.subcarriers]);
        }
        match self.owner[t][f] {
            Some(prev) if prev != k => Err(Error::config(format!(
                "RB (f={f}, t={t}) already assigned to slice {prev}"
            ))),
            _ => {
                self.owner[t][f] = Some(k);
                Ok(())
            }
        }
    }

    pub fn owner(&self, f: usize, t: usize) -> Option<usize> {
        self.owner.get(t).and_then(|row| row.get(f).copied().flatten())
    }

    pub fn is_assigned(&self, k: usize, f: usize, t: usize) -> bool {
        self.owner(f, t) == Some(k)
    }

    /// Assigned RBs as `(t, f, k)`, slot-major.
    pub fn assignments(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.owner.iter().enumerate().flat_map(|(t, row)| {
            row.iter()
                .enumerate()
                .filter_map(move |(f, o)| o.map(|k| (t, f, k)))
        })
    }

    pub fn count_for(&self, k: usize) -> usize {
        self.assignments().filter(|&(_, _, owner)| owner == k).count()
    }

    /// `t,f,k` rows, assigned RBs only.
    pub fn to_tfk_csv(&self) -> String {
        let mut out = String::from("t,f,k\n");
        for (t, f, k) in self.assignments() {
            let _ = writeln!(out, "{t},{f},{k}");
        }
        out
    }

    /// `k,f,t,value` rows with value 1, assigned RBs only.
    pub fn to_kft_csv(&self) -> String {
        let mut out = String::from("k,f,t,value\n");
        let mut rows: Vec<_> = self.assignments().map(|(t, f, k)| (k, f, t)).collect();
        rows.sort_unstable();
        for (k, f, t) in rows {
            let _ = writeln!(out, "{k},{f},{t},1");
        }
        out
    }

    pub fn from_kft_csv(text: &str, slices: usize, subcarriers: usize) -> Result<Self> {
        let mut alloc = RbAllocation::new(slices, subcarriers);
        for ([k, f, t], value) in parse_kft_rows(text)? {
            if value == 1.0 {
                alloc.assign(k, f, t)?;
            } else if value != 0.0 {
                return Err(Error::config(format!("allocation value {value} is not binary")));
            }
        }
        Ok(alloc)
    }
}
