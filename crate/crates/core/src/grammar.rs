//! Canonical in-memory straight-line program.
//!
//! Symbols share one integer namespace: terminal `t` (its offset in the
//! sorted alphabet) has id `t`, and non-terminal `k` (defined by rule `k`)
//! has id `sigma + k`. Every rule has exactly two symbols on its right-hand
//! side; the start rule may have any number `s >= 1`.

use std::fmt;

use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};

pub const SLP_MAGIC: &[u8; 4] = b"SLP1";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub u64);

impl SymbolId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<u64> for SymbolId {
    fn from(v: u64) -> Self {
        Self(v)
    }
}

impl fmt::Display for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub left: SymbolId,
    pub right: SymbolId,
}

impl Rule {
    pub fn new(left: impl Into<SymbolId>, right: impl Into<SymbolId>) -> Self {
        Self {
            left: left.into(),
            right: right.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    AlphabetNotAscending,
    EmptyStart,
    DanglingReference { rule: usize, symbol: SymbolId },
    DanglingStartSymbol { position: usize, symbol: SymbolId },
    Cycle { rule: usize },
    LengthOverflow { rule: usize },
    TextLengthMismatch { declared: u64, actual: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::AlphabetNotAscending => write!(f, "alphabet is not strictly ascending"),
            Self::EmptyStart => write!(f, "start rule is empty"),
            Self::DanglingReference { rule, symbol } => {
                write!(f, "rule {rule} references undefined symbol {symbol}")
            }
            Self::DanglingStartSymbol { position, symbol } => {
                write!(
                    f,
                    "start position {position} references undefined symbol {symbol}"
                )
            }
            Self::Cycle { rule } => write!(f, "rule {rule} lies on a reference cycle"),
            Self::LengthOverflow { rule } => write!(f, "expansion of rule {rule} overflows u64"),
            Self::TextLengthMismatch { declared, actual } => {
                write!(
                    f,
                    "declared text length {declared} but start expands to {actual}"
                )
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slp {
    alphabet: Vec<u8>,
    rules: Vec<Rule>,
    start: Vec<SymbolId>,
    text_length: u64,
}

/// Alphabet size, text length, start-rule length, rule count, number of
/// distinct non-terminal expansion lengths, and parse-tree height.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GrammarStats {
    pub sigma: u64,
    pub n: u64,
    pub s: u64,
    pub r: u64,
    pub d: u64,
    pub h: u64,
}

impl fmt::Display for GrammarStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "sigma={} n={} s={} r={} d={} h={}",
            self.sigma, self.n, self.s, self.r, self.d, self.h
        )
    }
}

impl Slp {
    /// Builds and validates; the text length is computed from the rules.
    pub fn new(alphabet: Vec<u8>, rules: Vec<Rule>, start: Vec<SymbolId>) -> Result<Self> {
        let mut slp = Self::from_raw(alphabet, rules, start, 0);
        let violations = slp.structural_violations();
        if !violations.is_empty() {
            return Err(Error::InvalidGrammar(violations));
        }
        slp.text_length = slp.compute_text_length()?;
        Ok(slp)
    }

    /// Assembles without any checking; run [`Slp::validate`] before
    /// relying on the result.
    pub fn from_raw(
        alphabet: Vec<u8>,
        rules: Vec<Rule>,
        start: Vec<SymbolId>,
        text_length: u64,
    ) -> Self {
        Self {
            alphabet,
            rules,
            start,
            text_length,
        }
    }

    /// A grammar with no rules whose start rule spells `text`.
    pub fn from_terminals(text: &[u8]) -> Result<Self> {
        let alphabet = alphabet_of(text);
        let start = text
            .iter()
            .map(|b| SymbolId(alphabet.binary_search(b).unwrap() as u64))
            .collect();
        Self::new(alphabet, Vec::new(), start)
    }

    pub fn alphabet(&self) -> &[u8] {
        &self.alphabet
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn start(&self) -> &[SymbolId] {
        &self.start
    }

    pub fn text_length(&self) -> u64 {
        self.text_length
    }

    pub fn sigma(&self) -> u64 {
        self.alphabet.len() as u64
    }

    pub fn num_rules(&self) -> u64 {
        self.rules.len() as u64
    }

    #[inline]
    pub fn is_terminal(&self, x: SymbolId) -> bool {
        x.0 < self.sigma()
    }

    /// Rule index of a non-terminal id.
    #[inline]
    pub fn rule_index(&self, x: SymbolId) -> Option<usize> {
        x.0.checked_sub(self.sigma()).map(|k| k as usize)
    }

    #[inline]
    pub fn nonterminal(&self, rule: usize) -> SymbolId {
        SymbolId(self.sigma() + rule as u64)
    }

    pub fn rule(&self, x: SymbolId) -> Option<Rule> {
        self.rule_index(x).and_then(|k| self.rules.get(k).copied())
    }

    /// `Ok(())` when every invariant holds, otherwise each violation found.
    pub fn validate(&self) -> std::result::Result<(), Vec<Violation>> {
        let mut v = self.structural_violations();
        if v.is_empty() {
            match self.compute_text_length() {
                Ok(actual) if actual != self.text_length => v.push(Violation::TextLengthMismatch {
                    declared: self.text_length,
                    actual,
                }),
                Ok(_) => {}
                Err(Error::InvalidGrammar(mut more)) => v.append(&mut more),
                Err(e) => unreachable!("{e}"),
            }
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(v)
        }
    }

    fn structural_violations(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        if self.alphabet.windows(2).any(|w| w[0] >= w[1]) {
            v.push(Violation::AlphabetNotAscending);
        }
        if self.start.is_empty() {
            v.push(Violation::EmptyStart);
        }
        let limit = self.sigma() + self.num_rules();
        for (k, rule) in self.rules.iter().enumerate() {
            for sym in [rule.left, rule.right] {
                if sym.0 >= limit {
                    v.push(Violation::DanglingReference {
                        rule: k,
                        symbol: sym,
                    });
                }
            }
        }
        for (p, &sym) in self.start.iter().enumerate() {
            if sym.0 >= limit {
                v.push(Violation::DanglingStartSymbol {
                    position: p,
                    symbol: sym,
                });
            }
        }
        if v.is_empty() {
            if let Err(cycles) = self.topological_order() {
                v.extend(cycles);
            }
        }
        v
    }

    /// Rule indices ordered so that every rule follows the rules it
    /// references. Assumes no dangling references.
    fn topological_order(&self) -> std::result::Result<Vec<usize>, Vec<Violation>> {
        let sigma = self.sigma();
        let r = self.rules.len();
        // fast path: builders emit rules that only reference earlier ones
        let forward = self
            .rules
            .iter()
            .enumerate()
            .all(|(k, rule)| rule.left.0 < sigma + k as u64 && rule.right.0 < sigma + k as u64);
        if forward {
            return Ok((0..r).collect());
        }
        const WHITE: u8 = 0;
        const GREY: u8 = 1;
        const BLACK: u8 = 2;
        let mut colour = vec![WHITE; r];
        let mut order = Vec::with_capacity(r);
        let mut cycles = Vec::new();
        let child = |k: usize, which: u8| -> Option<usize> {
            let rule = self.rules[k];
            let sym = if which == 0 { rule.left } else { rule.right };
            sym.0.checked_sub(sigma).map(|x| x as usize)
        };
        for root in 0..r {
            if colour[root] != WHITE {
                continue;
            }
            let mut stack: Vec<(usize, u8)> = vec![(root, 0)];
            colour[root] = GREY;
            while let Some(top) = stack.last_mut() {
                let (k, which) = *top;
                if which == 2 {
                    colour[k] = BLACK;
                    order.push(k);
                    stack.pop();
                    continue;
                }
                top.1 += 1;
                if let Some(c) = child(k, which) {
                    match colour[c] {
                        WHITE => {
                            colour[c] = GREY;
                            stack.push((c, 0));
                        }
                        GREY if !cycles.contains(&Violation::Cycle { rule: c }) => {
                            cycles.push(Violation::Cycle { rule: c });
                        }
                        _ => {}
                    }
                }
            }
        }
        if cycles.is_empty() {
            Ok(order)
        } else {
            Err(cycles)
        }
    }

    fn compute_text_length(&self) -> Result<u64> {
        let lengths = self.expansion_lengths_checked()?;
        let mut total = 0u64;
        for &x in &self.start {
            total =
                total
                    .checked_add(self.symbol_length(&lengths, x))
                    .ok_or(Error::InvalidGrammar(vec![Violation::LengthOverflow {
                        rule: usize::MAX,
                    }]))?;
        }
        Ok(total)
    }

    fn expansion_lengths_checked(&self) -> Result<Vec<u64>> {
        let order = self.topological_order().map_err(Error::InvalidGrammar)?;
        let sigma = self.sigma();
        let mut len = vec![0u64; self.rules.len()];
        let of = |len: &[u64], x: SymbolId| {
            if x.0 < sigma {
                1
            } else {
                len[(x.0 - sigma) as usize]
            }
        };
        for k in order {
            let rule = self.rules[k];
            len[k] = of(&len, rule.left)
                .checked_add(of(&len, rule.right))
                .ok_or(Error::InvalidGrammar(vec![Violation::LengthOverflow {
                    rule: k,
                }]))?;
        }
        Ok(len)
    }

    /// Expansion length of every rule, indexed by rule. Requires a valid
    /// grammar.
    pub fn expansion_lengths(&self) -> Vec<u64> {
        self.expansion_lengths_checked()
            .expect("expansion_lengths on an invalid grammar")
    }

    /// Length of symbol `x` given the rule lengths from
    /// [`Slp::expansion_lengths`].
    #[inline]
    pub fn symbol_length(&self, lengths: &[u64], x: SymbolId) -> u64 {
        match self.rule_index(x) {
            None => 1,
            Some(k) => lengths[k],
        }
    }

    /// Height of every rule: edges on the longest path down to a terminal.
    pub fn rule_heights(&self) -> Vec<u64> {
        let order = self
            .topological_order()
            .expect("rule_heights on an invalid grammar");
        let mut height = vec![0u64; self.rules.len()];
        for k in order {
            let rule = self.rules[k];
            let h = |x: SymbolId| self.rule_index(x).map_or(0, |c| height[c]);
            height[k] = 1 + h(rule.left).max(h(rule.right));
        }
        height
    }

    /// Parse-tree height: the largest height among start-rule symbols, so a
    /// grammar without rules has height 0.
    pub fn height(&self) -> u64 {
        let heights = self.rule_heights();
        self.start
            .iter()
            .map(|&x| self.rule_index(x).map_or(0, |k| heights[k]))
            .max()
            .unwrap_or(0)
    }

    pub fn stats(&self) -> GrammarStats {
        let mut lengths = self.expansion_lengths();
        lengths.sort_unstable();
        lengths.dedup();
        GrammarStats {
            sigma: self.sigma(),
            n: self.text_length,
            s: self.start.len() as u64,
            r: self.num_rules(),
            d: lengths.len() as u64,
            h: self.height(),
        }
    }

    /// The text this grammar generates.
    pub fn decompress(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.text_length as usize);
        let mut stack: Vec<SymbolId> = Vec::new();
        for &x in &self.start {
            stack.push(x);
            while let Some(y) = stack.pop() {
                match self.rule(y) {
                    None => out.push(self.alphabet[y.index()]),
                    Some(rule) => {
                        stack.push(rule.right);
                        stack.push(rule.left);
                    }
                }
            }
        }
        out
    }

    /// Character at 1-based position `i`, by full decompression.
    pub fn access_oracle(&self, i: u64) -> Result<u8> {
        if i == 0 || i > self.text_length {
            return Err(Error::PositionOutOfRange {
                pos: i,
                len: self.text_length,
            });
        }
        Ok(self.decompress()[(i - 1) as usize])
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.bytes(SLP_MAGIC);
        w.u64(self.sigma());
        w.u64(self.num_rules());
        w.u64(self.start.len() as u64);
        w.u64(self.text_length);
        w.bytes(&self.alphabet);
        for rule in &self.rules {
            w.u64(rule.left.0);
            w.u64(rule.right.0);
        }
        for x in &self.start {
            w.u64(x.0);
        }
        w.into_inner()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        r.magic(SLP_MAGIC)?;
        let sigma = r.u64()?;
        let nrules = r.u64()?;
        let s = r.u64()?;
        let n = r.u64()?;
        if sigma > 256 {
            return Err(Error::Corrupt(format!("alphabet size {sigma} exceeds 256")));
        }
        let needed = (sigma as u128) + 16 * (nrules as u128) + 8 * (s as u128);
        if needed > r.remaining() as u128 {
            return Err(Error::Truncated {
                offset: r.position(),
                needed: (needed - r.remaining() as u128).min(usize::MAX as u128) as usize,
            });
        }
        let alphabet = r.take(sigma as usize)?.to_vec();
        let mut rules = Vec::with_capacity(nrules as usize);
        for _ in 0..nrules {
            let left = SymbolId(r.u64()?);
            let right = SymbolId(r.u64()?);
            rules.push(Rule { left, right });
        }
        let mut start = Vec::with_capacity(s as usize);
        for _ in 0..s {
            start.push(SymbolId(r.u64()?));
        }
        r.finish()?;
        let slp = Self::from_raw(alphabet, rules, start, n);
        slp.validate().map_err(Error::InvalidGrammar)?;
        Ok(slp)
    }
}

/// Distinct bytes of `text` in ascending order.
pub fn alphabet_of(text: &[u8]) -> Vec<u8> {
    let mut present = [false; 256];
    for &b in text {
        present[b as usize] = true;
    }
    (0..=255u8).filter(|&b| present[b as usize]).collect()
}

/// The grammar of the worked example:
/// `S -> Z W A Y $ Z Y A W`, `Z -> W X`, `Y -> C V`, `X -> T A`,
/// `W -> G V`, `V -> A T`, generating `GATTAGATACAT$GATTACATAGAT`.
///
/// Rules are numbered V, X, W, Y, Z so that within each size group the
/// members appear in the order V, X and W, Y.
pub fn example_grammar() -> Slp {
    // alphabet $ A C G T -> 0..5
    const DOLLAR: u64 = 0;
    const A: u64 = 1;
    const C: u64 = 2;
    const G: u64 = 3;
    const T: u64 = 4;
    const V: u64 = 5;
    const X: u64 = 6;
    const W: u64 = 7;
    const Y: u64 = 8;
    const Z: u64 = 9;
    let rules = vec![
        Rule::new(A, T), // V
        Rule::new(T, A), // X
        Rule::new(G, V), // W
        Rule::new(C, V), // Y
        Rule::new(W, X), // Z
    ];
    let start = [Z, W, A, Y, DOLLAR, Z, Y, A, W]
        .into_iter()
        .map(SymbolId)
        .collect();
    Slp::new(b"$ACGT".to_vec(), rules, start).expect("example grammar is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1_TEXT: &[u8] = b"GATTAGATACAT$GATTACATAGAT";

    #[test]
    fn example_is_valid_and_decompresses() {
        let g = example_grammar();
        assert_eq!(g.validate(), Ok(()));
        assert_eq!(g.decompress(), FIG1_TEXT);
        assert_eq!(g.text_length(), 25);
    }

    #[test]
    fn example_expansion_lengths() {
        let g = example_grammar();
        // V, X, W, Y, Z
        assert_eq!(g.expansion_lengths(), vec![2, 2, 3, 3, 5]);
    }

    #[test]
    fn example_stats() {
        let st = example_grammar().stats();
        assert_eq!((st.sigma, st.n, st.s, st.r, st.d), (5, 25, 9, 5, 3));
        // Z -> W -> V -> terminal
        assert_eq!(st.h, 3);
    }

    #[test]
    fn example_access_oracle() {
        let g = example_grammar();
        assert_eq!(g.access_oracle(17).unwrap(), b'T');
        assert_eq!(g.access_oracle(1).unwrap(), b'G');
        assert_eq!(g.access_oracle(13).unwrap(), b'$');
        assert!(g.access_oracle(0).is_err());
        assert!(g.access_oracle(26).is_err());
    }

    #[test]
    fn terminals_only() {
        let g = Slp::from_terminals(b"abc").unwrap();
        assert_eq!(g.text_length(), 3);
        assert!(g.expansion_lengths().is_empty());
        let st = g.stats();
        assert_eq!((st.d, st.h), (0, 0));
        assert_eq!(Slp::from_terminals(b"x").unwrap().decompress(), b"x");
    }

    #[test]
    fn dangling_reference_names_rule() {
        let g = Slp::from_raw(
            b"ab".to_vec(),
            vec![Rule::new(0, 1), Rule::new(0, 7)],
            vec![SymbolId(3)],
            3,
        );
        let v = g.validate().unwrap_err();
        assert!(v.contains(&Violation::DanglingReference {
            rule: 1,
            symbol: SymbolId(7)
        }));
    }

    #[test]
    fn self_reference_is_a_cycle() {
        let rules = vec![
            Rule::new(0, 1),
            Rule::new(2, 2),
            Rule::new(3, 0),
            Rule::new(5, 1), // rule 3 is id 5
        ];
        let g = Slp::from_raw(b"ab".to_vec(), rules, vec![SymbolId(2)], 2);
        let v = g.validate().unwrap_err();
        assert!(v.contains(&Violation::Cycle { rule: 3 }), "{v:?}");
    }

    #[test]
    fn out_of_order_acyclic_rules_are_fine() {
        // rule 0 references rule 1
        let rules = vec![Rule::new(3, 0), Rule::new(0, 1)];
        let g = Slp::new(b"ab".to_vec(), rules, vec![SymbolId(2)]).unwrap();
        assert_eq!(g.decompress(), b"aba");
        assert_eq!(g.expansion_lengths(), vec![3, 2]);
        assert_eq!(g.height(), 2);
    }

    #[test]
    fn length_mismatch_is_reported() {
        let g = Slp::from_raw(b"a".to_vec(), vec![], vec![SymbolId(0)], 2);
        assert_eq!(
            g.validate(),
            Err(vec![Violation::TextLengthMismatch {
                declared: 2,
                actual: 1
            }])
        );
    }

    #[test]
    fn unsorted_alphabet_and_empty_start() {
        let g = Slp::from_raw(b"ba".to_vec(), vec![], vec![], 0);
        let v = g.validate().unwrap_err();
        assert!(v.contains(&Violation::AlphabetNotAscending));
        assert!(v.contains(&Violation::EmptyStart));
    }

    #[test]
    fn binary_round_trip_and_rejections() {
        let g = example_grammar();
        let bytes = g.to_bytes();
        assert_eq!(Slp::from_bytes(&bytes).unwrap(), g);
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(Slp::from_bytes(&bad), Err(Error::BadMagic { .. })));
        for cut in 0..bytes.len() {
            assert!(Slp::from_bytes(&bytes[..cut]).is_err());
        }
        // make rule 0 reference itself
        let mut cyc = bytes.clone();
        let off = 4 + 32 + 5;
        cyc[off..off + 8].copy_from_slice(&5u64.to_le_bytes());
        assert!(matches!(
            Slp::from_bytes(&cyc),
            Err(Error::InvalidGrammar(_))
        ));
    }

    /// Structural induction: each rule decompresses to the concatenation of
    /// its children.
    #[test]
    fn rule_expansion_is_concatenation() {
        let g = example_grammar();
        let expand = |x: SymbolId| {
            Slp::new(g.alphabet().to_vec(), g.rules().to_vec(), vec![x])
                .unwrap()
                .decompress()
        };
        for k in 0..g.rules().len() {
            let rule = g.rules()[k];
            let mut cat = expand(rule.left);
            cat.extend(expand(rule.right));
            assert_eq!(expand(g.nonterminal(k)), cat);
        }
    }
}
