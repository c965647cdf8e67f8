//! Variable groupings and multi-homogeneous Bézout numbers.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::polysys::PolySystem;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Group {
    pub vars: Vec<usize>,
    pub homogeneous: bool,
}

impl Group {
    pub fn dim(&self) -> usize {
        if self.homogeneous {
            self.vars.len() - 1
        } else {
            self.vars.len()
        }
    }
}

/// A partition of the system variables into affine and homogeneous groups.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VariableGrouping {
    pub names: Vec<String>,
    pub groups: Vec<Group>,
}

impl VariableGrouping {
    pub fn new(names: &[String], groups: Vec<Group>) -> Result<Self> {
        let mut seen = vec![false; names.len()];
        for g in &groups {
            if g.vars.is_empty() {
                return Err(Error::Usage("empty variable group".into()));
            }
            if g.homogeneous && g.vars.len() < 2 {
                return Err(Error::Usage("a homogeneous group needs at least two variables".into()));
            }
            for &v in &g.vars {
                if v >= names.len() || seen[v] {
                    return Err(Error::Usage(format!("variable index {v} repeated or out of range")));
                }
                seen[v] = true;
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::Usage(format!("variable '{}' is not in any group", names[v])));
        }
        if groups.iter().filter(|g| g.homogeneous).count() > 1 {
            return Err(Error::Usage("at most one homogeneous group is allowed".into()));
        }
        Ok(VariableGrouping { names: names.to_vec(), groups })
    }

    /// Parses `h:e0,e3,t1,t2;l`: groups separated by `;`, variables by `,`,
    /// the prefix `h:` marking the homogeneous group.
    pub fn parse(names: &[String], spec: &str) -> Result<Self> {
        let grammar = "grouping grammar: group(;group)*, group = [h:]var(,var)*";
        let mut groups = Vec::new();
        for part in spec.split(';') {
            let part = part.trim();
            let (homogeneous, body) = match part.strip_prefix("h:") {
                Some(b) => (true, b),
                None => (false, part),
            };
            if body.is_empty() {
                return Err(Error::Usage(format!("empty group in '{spec}'; {grammar}")));
            }
            let vars = body
                .split(',')
                .map(|v| {
                    let v = v.trim();
                    names
                        .iter()
                        .position(|n| n == v)
                        .ok_or_else(|| Error::Usage(format!("unknown variable '{v}' in '{spec}'; {grammar}")))
                })
                .collect::<Result<Vec<_>>>()?;
            groups.push(Group { vars, homogeneous });
        }
        VariableGrouping::new(names, groups).map_err(|e| match e {
            Error::Usage(m) | Error::Dimension(m) => Error::Usage(format!("{m}; {grammar}")),
            e => e,
        })
    }

    pub fn dims(&self) -> Vec<usize> {
        self.groups.iter().map(Group::dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.dims().iter().sum()
    }

    pub fn homogeneous_group(&self) -> Option<usize> {
        self.groups.iter().position(|g| g.homogeneous)
    }

    /// The same grouping in the spec syntax accepted by [`VariableGrouping::parse`].
    pub fn spec(&self) -> String {
        self.groups
            .iter()
            .map(|g| {
                let body: Vec<&str> = g.vars.iter().map(|&v| self.names[v].as_str()).collect();
                format!("{}{}", if g.homogeneous { "h:" } else { "" }, body.join(","))
            })
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Order-insensitive identity of the partition.
    pub fn canonical(&self) -> Vec<(Vec<usize>, bool)> {
        let mut gs: Vec<(Vec<usize>, bool)> = self
            .groups
            .iter()
            .map(|g| {
                let mut v = g.vars.clone();
                v.sort_unstable();
                (v, g.homogeneous)
            })
            .collect();
        gs.sort();
        gs
    }

    pub fn same_partition(&self, other: &VariableGrouping) -> bool {
        self.canonical() == other.canonical()
    }
}

impl fmt::Display for VariableGrouping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .groups
            .iter()
            .map(|g| {
                let body: Vec<&str> = g.vars.iter().map(|&v| self.names[v].as_str()).collect();
                format!("({}){}", body.join(","), if g.homogeneous { "_h" } else { "" })
            })
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// All set partitions of `items`, as restricted-growth strings in
/// lexicographic order.
pub fn set_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let n = items.len();
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
        return out;
    }
    let mut a = vec![0usize; n];
    loop {
        let blocks = a.iter().copied().max().unwrap_or(0) + 1;
        let mut parts = vec![Vec::new(); blocks];
        for (i, &b) in a.iter().enumerate() {
            parts[b].push(items[i]);
        }
        out.push(parts);
        // next restricted-growth string
        let mut i = n - 1;
        loop {
            if i == 0 {
                return out;
            }
            let max_prefix = a[..i].iter().copied().max().unwrap_or(0);
            if a[i] <= max_prefix {
                a[i] += 1;
                for x in a.iter_mut().skip(i + 1) {
                    *x = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

/// Every grouping of `names`: the optional homogeneous block stays whole and
/// the remaining variables are partitioned in all possible ways.
pub fn enumerate_groupings(names: &[String], homogeneous_block: Option<&[usize]>) -> Vec<VariableGrouping> {
    let free: Vec<usize> = (0..names.len()).filter(|i| homogeneous_block.is_none_or(|b| !b.contains(i))).collect();
    set_partitions(&free)
        .into_iter()
        .map(|parts| {
            let mut groups = Vec::new();
            if let Some(b) = homogeneous_block {
                groups.push(Group { vars: b.to_vec(), homogeneous: true });
            }
            groups.extend(parts.into_iter().map(|vars| Group { vars, homogeneous: false }));
            VariableGrouping { names: names.to_vec(), groups }
        })
        .collect()
}

/// Rows are equations, columns groups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeMatrix {
    pub rows: Vec<Vec<u32>>,
}

impl DegreeMatrix {
    pub fn from_system(sys: &PolySystem, grouping: &VariableGrouping) -> Result<Self> {
        if grouping.names.len() != sys.vars().len() || grouping.names.iter().zip(sys.vars().iter()).any(|(a, b)| a != b)
        {
            return Err(Error::Dimension("grouping variables differ from the system variables".into()));
        }
        let mut rows = Vec::with_capacity(sys.len());
        for (k, e) in sys.equations().iter().enumerate() {
            let row = grouping
                .groups
                .iter()
                .map(|g| {
                    if g.homogeneous {
                        e.homogeneous_degree_in(&g.vars).ok_or_else(|| {
                            Error::Dimension(format!("equation {k} is not homogeneous in the homogeneous group"))
                        })
                    } else {
                        Ok(e.degree_in_set(&g.vars))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(DegreeMatrix { rows })
    }
}

fn check_square(m: &DegreeMatrix, dims: &[usize]) -> Result<()> {
    let total: usize = dims.iter().sum();
    if total != m.rows.len() {
        return Err(Error::Dimension(format!(
            "{} equations but the grouping has total dimension {total}",
            m.rows.len()
        )));
    }
    if m.rows.iter().any(|r| r.len() != dims.len()) {
        return Err(Error::Dimension("degree rows must have one entry per group".into()));
    }
    Ok(())
}

/// Coefficient of `Πⱼ ζⱼ^dimⱼ` in `Πᵢ Σⱼ dᵢⱼζⱼ`, by iterated multiplication
/// truncated at `dimⱼ` in each group.
pub fn bezout_from_degrees(m: &DegreeMatrix, dims: &[usize]) -> Result<u128> {
    check_square(m, dims)?;
    let mut state: HashMap<Vec<u8>, u128> = HashMap::new();
    state.insert(vec![0; dims.len()], 1);
    for row in &m.rows {
        let mut next: HashMap<Vec<u8>, u128> = HashMap::with_capacity(state.len() * 2);
        for (key, &count) in &state {
            for (j, &d) in row.iter().enumerate() {
                if d == 0 || key[j] as usize >= dims[j] {
                    continue;
                }
                let mut k = key.clone();
                k[j] += 1;
                *next.entry(k).or_insert(0) += count * d as u128;
            }
        }
        state = next;
        if state.is_empty() {
            return Ok(0);
        }
    }
    let target: Vec<u8> = dims.iter().map(|&d| d as u8).collect();
    Ok(state.get(&target).copied().unwrap_or(0))
}

pub fn bezout_number(sys: &PolySystem, grouping: &VariableGrouping) -> Result<u128> {
    let m = DegreeMatrix::from_system(sys, grouping)?;
    bezout_from_degrees(&m, &grouping.dims())
}

/// Largest dense table [`bezout_bruteforce`] will allocate.
pub const BRUTEFORCE_LIMIT: usize = 1 << 22;

/// Reference computation: expands the full product of linear forms into a dense
/// table indexed by all exponent vectors, then reads off the coefficient.
pub fn bezout_bruteforce(m: &DegreeMatrix, dims: &[usize]) -> Result<u128> {
    check_square(m, dims)?;
    let n = m.rows.len();
    let g = dims.len();
    if n > 8 {
        return Err(Error::OracleRefused(format!("{n} equations exceed the limit of 8")));
    }
    let side = n + 1;
    let size = side.checked_pow(g as u32).filter(|&s| s <= BRUTEFORCE_LIMIT).ok_or_else(|| {
        Error::OracleRefused(format!("dense table of {side}^{g} entries is too large"))
    })?;
    let index = |e: &[usize]| e.iter().fold(0usize, |acc, &x| acc * side + x);
    let unindex = |mut k: usize| {
        let mut e = vec![0usize; g];
        for j in (0..g).rev() {
            e[j] = k % side;
            k /= side;
        }
        e
    };
    let mut table = vec![0u128; size];
    table[0] = 1;
    for row in &m.rows {
        let mut next = vec![0u128; size];
        for (k, &c) in table.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let e = unindex(k);
            for (j, &d) in row.iter().enumerate() {
                if d == 0 {
                    continue;
                }
                let mut f = e.clone();
                f[j] += 1;
                next[index(&f)] += c * d as u128;
            }
        }
        table = next;
    }
    Ok(table[index(dims)])
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupingRow {
    pub grouping: VariableGrouping,
    pub bezout: u128,
}

/// Exhaustive search over all groupings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchReport {
    pub rows: Vec<GroupingRow>,
    pub min: u128,
    pub max: u128,
    pub best: Vec<usize>,
    pub worst: Vec<usize>,
}

impl SearchReport {
    pub fn best_groupings(&self) -> impl Iterator<Item = &VariableGrouping> {
        self.best.iter().map(|&i| &self.rows[i].grouping)
    }

    pub fn worst_groupings(&self) -> impl Iterator<Item = &VariableGrouping> {
        self.worst.iter().map(|&i| &self.rows[i].grouping)
    }

    pub fn value_of(&self, g: &VariableGrouping) -> Option<u128> {
        self.rows.iter().find(|r| r.grouping.same_partition(g)).map(|r| r.bezout)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("grouping,bezout,is_min,is_max\n");
        for (i, r) in self.rows.iter().enumerate() {
            s.push_str(&format!(
                "\"{}\",{},{},{}\n",
                r.grouping.spec(),
                r.bezout,
                self.best.contains(&i),
                self.worst.contains(&i)
            ));
        }
        s
    }
}

/// Evaluates every grouping (concurrently when enabled). Groupings whose total
/// dimension does not match the equation count are skipped.
pub fn search_groupings(sys: &PolySystem) -> Result<SearchReport> {
    let names: Vec<String> = sys.vars().to_vec();
    let groupings = enumerate_groupings(&names, sys.homogeneous_block());
    let values = par::map(&groupings, |g| bezout_number(sys, g));
    let mut rows = Vec::with_capacity(groupings.len());
    for (g, v) in groupings.into_iter().zip(values) {
        rows.push(GroupingRow { grouping: g, bezout: v? });
    }
    if rows.is_empty() {
        return Err(Error::Dimension("no grouping available".into()));
    }
    let min = rows.iter().map(|r| r.bezout).min().unwrap_or(0);
    let max = rows.iter().map(|r| r.bezout).max().unwrap_or(0);
    let best = (0..rows.len()).filter(|&i| rows[i].bezout == min).collect();
    let worst = (0..rows.len()).filter(|&i| rows[i].bezout == max).collect();
    Ok(SearchReport { rows, min, max, best, worst })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(ns: &[&str]) -> Vec<String> {
        ns.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (0..7).map(|n| set_partitions(&(0..n).collect::<Vec<_>>()).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 15, 52, 203]);
        let ns = names(&["e0", "e3", "t0", "t1", "t2", "t3", "l", "m"]);
        let gs = enumerate_groupings(&ns, Some(&[0, 1, 2, 3, 4, 5]));
        assert_eq!(gs.len(), 2);
        let ns = names(&["e0", "e3", "t1", "t2", "l"]);
        assert_eq!(enumerate_groupings(&ns, Some(&[0, 1, 2, 3])).len(), 1);
    }

    #[test]
    fn toy_bilinear() {
        let sys = PolySystem::from_strings(&["x", "y"], &["(1)*x*y + (1)*x + (1)", "(1)*x + (1)*y"]).unwrap();
        let g = VariableGrouping::parse(&names(&["x", "y"]), "x;y").unwrap();
        assert_eq!(bezout_number(&sys, &g).unwrap(), 2);
    }

    #[test]
    fn generating_product_examples() {
        // rows (2,1)^4 and (3,0) with dims (4,1)
        let mut rows = vec![vec![2, 1]; 4];
        rows.push(vec![3, 0]);
        let m = DegreeMatrix { rows };
        assert_eq!(bezout_from_degrees(&m, &[4, 1]).unwrap(), 96);
        assert_eq!(bezout_bruteforce(&m, &[4, 1]).unwrap(), 96);
        let z = DegreeMatrix { rows: vec![vec![0, 0], vec![1, 1]] };
        assert_eq!(bezout_from_degrees(&z, &[1, 1]).unwrap(), 0);
        assert_eq!(bezout_bruteforce(&z, &[1, 1]).unwrap(), 0);
        let single = DegreeMatrix { rows: vec![vec![2], vec![3], vec![4]] };
        assert_eq!(bezout_from_degrees(&single, &[3]).unwrap(), 24);
        assert_eq!(bezout_bruteforce(&single, &[3]).unwrap(), 24);
    }

    #[test]
    fn parse_and_errors() {
        let ns = names(&["e0", "e3", "t1", "t2", "l"]);
        let g = VariableGrouping::parse(&ns, "h:e0,e3,t1,t2;l").unwrap();
        assert_eq!(g.dims(), vec![3, 1]);
        assert_eq!(g.spec(), "h:e0,e3,t1,t2;l");
        assert_eq!(g.to_string(), "{(e0,e3,t1,t2)_h,(l)}");
        assert!(VariableGrouping::parse(&ns, "e0,e3;t1,t2").is_err());
        assert!(VariableGrouping::parse(&ns, "e0,e3,t1,t2,l;l").is_err());
        assert!(VariableGrouping::parse(&ns, "h:e0;e3,t1,t2,l").is_err());
        assert!(VariableGrouping::parse(&ns, "q;e0,e3,t1,t2,l").is_err());
        let m = DegreeMatrix { rows: vec![vec![1]] };
        assert!(matches!(bezout_from_degrees(&m, &[2]), Err(Error::Dimension(_))));
        let big = DegreeMatrix { rows: vec![vec![1]; 9] };
        assert!(matches!(bezout_bruteforce(&big, &[9]), Err(Error::OracleRefused(_))));
    }
}
