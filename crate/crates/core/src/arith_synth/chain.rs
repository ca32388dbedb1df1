//! Addition chains with clearing steps.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::{ArithError, Result};

/// How a chain term is produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    /// `ν = 2μ`.
    Doubled { mu: usize },
    /// `ν = α + β` with `α < β`.
    Added { alpha: usize, beta: usize },
}

impl StepKind {
    /// Operand values that must be live.
    pub fn operands(&self) -> Vec<usize> {
        match *self {
            StepKind::Doubled { mu } => vec![mu],
            StepKind::Added { alpha, beta } => vec![alpha, beta],
        }
    }
}

/// One chain entry after the leading 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChainStep {
    pub value: usize,
    pub kind: StepKind,
    /// True for a clearing step (the entry repeats a live earlier value).
    pub clear: bool,
}

/// A chain such as `1 2 3 6 9 6 3 2 18 …` where decreasing entries clear
/// previously computed values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdditionChain {
    pub terms: Vec<usize>,
    steps: Vec<ChainStep>,
}

impl AdditionChain {
    pub fn new(terms: Vec<usize>) -> Result<Self> {
        if terms.first() != Some(&1) {
            return Err(ArithError::Chain("chain must start at 1".into()));
        }
        let mut live: BTreeMap<usize, StepKind> = BTreeMap::new();
        let mut max = 1;
        let mut steps = Vec::with_capacity(terms.len() - 1);
        let is_live = |v: usize, live: &BTreeMap<usize, StepKind>| v == 1 || live.contains_key(&v);
        for &nu in &terms[1..] {
            if nu > max {
                let kind = if nu % 2 == 0 && is_live(nu / 2, &live) {
                    StepKind::Doubled { mu: nu / 2 }
                } else {
                    let beta = live
                        .keys()
                        .rev()
                        .copied()
                        .chain(std::iter::once(1))
                        .find(|&b| b < nu && 2 * b > nu && is_live(nu - b, &live))
                        .ok_or_else(|| {
                            ArithError::Chain(format!("{nu} is not a sum of two live terms"))
                        })?;
                    StepKind::Added {
                        alpha: nu - beta,
                        beta,
                    }
                };
                live.insert(nu, kind);
                max = nu;
                steps.push(ChainStep {
                    value: nu,
                    kind,
                    clear: false,
                });
            } else {
                let kind = live.get(&nu).copied().ok_or_else(|| {
                    ArithError::Chain(format!("clearing step {nu} references a dead term"))
                })?;
                for op in kind.operands() {
                    if !is_live(op, &live) {
                        return Err(ArithError::Chain(format!(
                            "clearing {nu} needs {op}, which is no longer live"
                        )));
                    }
                }
                live.remove(&nu);
                steps.push(ChainStep {
                    value: nu,
                    kind,
                    clear: true,
                });
            }
        }
        Ok(Self { terms, steps })
    }

    /// Bundled chain for a standard field size.
    pub fn standard(n: usize) -> Result<Self> {
        let text = crate::data::chain_text(n)
            .ok_or_else(|| ArithError::Chain(format!("no bundled chain for n = {n}")))?;
        text.parse()
    }

    /// Square-and-multiply chain for `n − 1`, without clearing steps.
    pub fn binary(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(ArithError::Chain(format!("no chain for n = {n}")));
        }
        let t = n - 1;
        let mut terms = vec![1];
        let mut v = 1;
        for bit in (0..usize::BITS - 1 - t.leading_zeros()).rev() {
            v *= 2;
            terms.push(v);
            if (t >> bit) & 1 == 1 {
                v += 1;
                terms.push(v);
            }
        }
        Self::new(terms)
    }

    /// The bundled chain when there is one, else [`AdditionChain::binary`].
    pub fn for_field(n: usize) -> Result<Self> {
        match crate::data::chain_text(n) {
            Some(text) => text.parse(),
            None => Self::binary(n),
        }
    }

    pub fn steps(&self) -> &[ChainStep] {
        &self.steps
    }

    /// Number of entries after the leading 1.
    pub fn l_tilde(&self) -> usize {
        self.steps.len()
    }

    /// Number of compute entries.
    pub fn l(&self) -> usize {
        self.steps.iter().filter(|s| !s.clear).count()
    }

    /// Register multiplier `2l − l̃ + 1`.
    pub fn r(&self) -> usize {
        2 * self.l() + 1 - self.l_tilde()
    }

    /// Largest compute term.
    pub fn target(&self) -> usize {
        self.terms.iter().copied().max().unwrap_or(1)
    }

    /// Checks that the chain reaches `n − 1`.
    pub fn check_for(&self, n: usize) -> Result<()> {
        if self.target() != n - 1 {
            return Err(ArithError::Chain(format!(
                "chain reaches {}, inversion in GF(2^{n}) needs {}",
                self.target(),
                n - 1
            )));
        }
        Ok(())
    }
}

impl FromStr for AdditionChain {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self> {
        let terms = s
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(|l| l.split(|c: char| c.is_whitespace() || c == ','))
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| ArithError::Chain(format!("bad chain entry `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(terms)
    }
}

impl fmt::Display for AdditionChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|t| t.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_chains() {
        assert_eq!(AdditionChain::binary(3).unwrap().terms, vec![1, 2]);
        assert_eq!(AdditionChain::binary(6).unwrap().terms, vec![1, 2, 4, 5]);
        assert_eq!(AdditionChain::binary(2).unwrap().terms, vec![1]);
        for n in 2..200 {
            let c = AdditionChain::binary(n).unwrap();
            c.check_for(n).unwrap();
        }
        assert!(AdditionChain::binary(1).is_err());
    }
}
