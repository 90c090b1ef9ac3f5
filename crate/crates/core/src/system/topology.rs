//! Interaction graphs: the dyad, Erdős–Rényi random graphs and periodic
//! Von Neumann lattices.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Topology {
    Dyad,
    ErdosRenyi { nodes: usize, p: f64 },
    /// Torus with four orthogonal neighbours per cell.
    Lattice { rows: usize, cols: usize },
}

impl Topology {
    pub fn nodes(&self) -> usize {
        match *self {
            Self::Dyad => 2,
            Self::ErdosRenyi { nodes, .. } => nodes,
            Self::Lattice { rows, cols } => rows * cols,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Dyad => Ok(()),
            Self::ErdosRenyi { nodes, p } => {
                if nodes < 2 {
                    Err(Error::Topology(format!("ER graph needs >= 2 nodes, got {nodes}")))
                } else if !(0.0..=1.0).contains(&p) {
                    Err(Error::Topology(format!("edge probability {p} outside [0, 1]")))
                } else {
                    Ok(())
                }
            }
            Self::Lattice { rows, cols } => {
                if rows == 0 || cols == 0 || rows * cols < 2 {
                    Err(Error::Topology(format!("lattice {rows}x{cols} has fewer than 2 nodes")))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Draws the adjacency structure. Only the ER case consumes randomness.
    pub fn build<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Network> {
        self.validate()?;
        let n = self.nodes();
        let mut adj = vec![Vec::new(); n];
        match *self {
            Self::Dyad => {
                adj[0].push(1);
                adj[1].push(0);
            }
            Self::ErdosRenyi { p, .. } => {
                for i in 0..n {
                    for j in i + 1..n {
                        if rng.random::<f64>() < p {
                            adj[i].push(j);
                            adj[j].push(i);
                        }
                    }
                }
            }
            Self::Lattice { rows, cols } => {
                for r in 0..rows {
                    for c in 0..cols {
                        let i = r * cols + c;
                        let around = [
                            ((r + rows - 1) % rows) * cols + c,
                            ((r + 1) % rows) * cols + c,
                            r * cols + (c + cols - 1) % cols,
                            r * cols + (c + 1) % cols,
                        ];
                        adj[i].extend(around.into_iter().filter(|&k| k != i));
                    }
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Network { adjacency: adj })
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Dyad => write!(f, "dyad"),
            Self::ErdosRenyi { nodes, p } => write!(f, "er:{nodes}:{p}"),
            Self::Lattice { rows, cols } => write!(f, "lattice:{rows}x{cols}"),
        }
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Topology(format!("cannot parse topology `{s}`"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        let topology = match parts.as_slice() {
            ["dyad"] => Self::Dyad,
            ["er", n, p] => Self::ErdosRenyi {
                nodes: n.parse().map_err(|_| bad())?,
                p: p.parse().map_err(|_| bad())?,
            },
            ["lattice", dims] => {
                let (r, c) = dims.split_once('x').ok_or_else(bad)?;
                Self::Lattice {
                    rows: r.parse().map_err(|_| bad())?,
                    cols: c.parse().map_err(|_| bad())?,
                }
            }
            _ => return Err(bad()),
        };
        topology.validate()?;
        Ok(topology)
    }
}

impl TryFrom<String> for Topology {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Topology> for String {
    fn from(t: Topology) -> String {
        t.to_string()
    }
}

/// Undirected simple graph as sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    adjacency: Vec<Vec<usize>>,
}

impl Network {
    pub fn nodes(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, l)| l.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }
}
