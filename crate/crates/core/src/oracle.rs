//! Boolean functions `f: {0,1}^n -> {0,1}^m`, their XOR oracles
//! `|x>|y> -> |x>|y ^ f(x)>`, and hypothesis families over them.
//!
//! Register layout puts the `n` input qubits before the `m` output qubits, so
//! the basis index of `|x>|y>` is `x * 2^m + y`. Multi-bit outputs are packed
//! with the first output qubit as the most significant bit.

use std::fmt;

use num_complex::Complex64;

use crate::discrim::Ensemble;
use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, StateVector};

/// Upper bound on `m * 2^n` accepted by [`enumerate_functions`].
pub const ENUMERATION_LIMIT: usize = 20;

/// Tolerance on the prior sum of an [`OracleFamily`].
pub const PRIOR_SUM_TOL: f64 = 1e-12;

/// Truth table of a function from `n` input bits to `m` output bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoolFunc {
    n: usize,
    m: usize,
    table: Vec<u32>,
}

impl BoolFunc {
    pub fn new(n: usize, m: usize, table: Vec<u32>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidFunction("output width m must be >= 1".into()));
        }
        if n + m > 16 {
            return Err(Error::InvalidFunction(format!(
                "register of {} qubits is too wide",
                n + m
            )));
        }
        if table.len() != 1 << n {
            return Err(Error::InvalidFunction(format!(
                "table has {} entries, expected 2^{} = {}",
                table.len(),
                n,
                1usize << n
            )));
        }
        if let Some((x, &v)) = table.iter().enumerate().find(|(_, &v)| v >= 1 << m) {
            return Err(Error::InvalidFunction(format!(
                "entry {v} at x = {x} does not fit in {m} output bits"
            )));
        }
        Ok(Self { n, m, table })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn table(&self) -> &[u32] {
        &self.table
    }

    /// Register width `n + m`.
    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n + self.m
    }

    pub fn eval(&self, x: usize) -> u32 {
        self.table[x]
    }

    /// Pointwise XOR of two tables with the same shape.
    pub fn xor(&self, other: &Self) -> Result<Self> {
        if (self.n, self.m) != (other.n, other.m) {
            return Err(Error::InvalidFunction(format!(
                "shape ({}, {}) vs ({}, {})",
                self.n, self.m, other.n, other.m
            )));
        }
        Ok(Self {
            n: self.n,
            m: self.m,
            table: self
                .table
                .iter()
                .zip(&other.table)
                .map(|(a, b)| a ^ b)
                .collect(),
        })
    }

    /// Basis index reached from `index` under the oracle.
    #[inline]
    pub(crate) fn oracle_image(&self, index: usize) -> usize {
        let mask = (1usize << self.m) - 1;
        let x = index >> self.m;
        let y = index & mask;
        (x << self.m) | (y ^ self.table[x] as usize)
    }

    /// Parses the single-line truth-table format
    /// `n=<int> m=<int> table=<comma-separated integers>`.
    pub fn parse(text: &str) -> Result<Self> {
        parse_line(text, 1)
    }
}

impl fmt::Display for BoolFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let table: Vec<String> = self.table.iter().map(u32::to_string).collect();
        write!(f, "n={} m={} table={}", self.n, self.m, table.join(","))
    }
}

/// XOR oracle as an exact 0/1 permutation matrix of dimension `2^(n+m)`.
pub fn oracle_unitary(f: &BoolFunc) -> DenseMatrix {
    let dim = 1usize << f.num_qubits();
    let mut u = DenseMatrix::zeros(dim);
    for i in 0..dim {
        u[(f.oracle_image(i), i)] = Complex64::new(1.0, 0.0);
    }
    u
}

/// Applies the oracle to a state by permuting amplitudes.
pub fn apply_oracle(f: &BoolFunc, state: &StateVector) -> Result<StateVector> {
    if state.num_qubits() != f.num_qubits() {
        return Err(Error::WidthMismatch {
            expected: f.num_qubits(),
            got: state.num_qubits(),
        });
    }
    let amps = state.amplitudes();
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    for (i, &a) in amps.iter().enumerate() {
        out[f.oracle_image(i)] = a;
    }
    Ok(StateVector::from_unitary_image(state.num_qubits(), out))
}

/// Hypothesis set of Boolean functions with prior probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleFamily {
    members: Vec<BoolFunc>,
    priors: Vec<f64>,
}

impl OracleFamily {
    pub fn new(members: Vec<BoolFunc>, priors: Vec<f64>) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(Error::EmptyEnsemble);
        };
        if priors.len() != members.len() {
            return Err(Error::SizeMismatch {
                expected: members.len(),
                got: priors.len(),
            });
        }
        if let Some(f) = members.iter().find(|f| (f.n, f.m) != (first.n, first.m)) {
            return Err(Error::InvalidFunction(format!(
                "family mixes shapes ({}, {}) and ({}, {})",
                first.n, first.m, f.n, f.m
            )));
        }
        validate_priors(&priors)?;
        Ok(Self { members, priors })
    }

    pub fn uniform(members: Vec<BoolFunc>) -> Result<Self> {
        let k = members.len().max(1);
        let priors = vec![1.0 / k as f64; members.len()];
        Self::new(members, priors)
    }

    pub fn members(&self) -> &[BoolFunc] {
        &self.members
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `(n, m)` shared by all members.
    pub fn shape(&self) -> (usize, usize) {
        (self.members[0].n, self.members[0].m)
    }

    pub fn num_qubits(&self) -> usize {
        self.members[0].num_qubits()
    }

    /// Parses one truth-table line per member. Blank lines and `#` comments
    /// are skipped; priors are uniform.
    pub fn parse(text: &str) -> Result<Self> {
        let mut members = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            members.push(parse_line(content, lineno + 1)?);
        }
        if members.is_empty() {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: "family file contains no functions".into(),
            });
        }
        Self::uniform(members).map_err(|e| Error::Parse {
            line: 1,
            column: 1,
            message: e.to_string(),
        })
    }

    /// Serializes in the format read by [`OracleFamily::parse`].
    pub fn to_text(&self) -> String {
        self.members.iter().map(|f| format!("{f}\n")).collect()
    }
}

pub(crate) fn validate_priors(priors: &[f64]) -> Result<()> {
    if let Some(p) = priors.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::InvalidPriors(format!(
            "prior {p} is not a probability"
        )));
    }
    let sum: f64 = priors.iter().sum();
    if (sum - 1.0).abs() > PRIOR_SUM_TOL {
        return Err(Error::InvalidPriors(format!("priors sum to {sum}")));
    }
    Ok(())
}

/// The four one-bit functions in order `f0 = 0`, `f1 = 1`, `f2 = x`,
/// `f3 = 1 - x`, with uniform priors.
pub fn canonical_one_bit_family() -> OracleFamily {
    let tables = [[0, 0], [1, 1], [0, 1], [1, 0]];
    let members = tables
        .iter()
        .map(|t| BoolFunc::new(1, 1, t.to_vec()).expect("valid one-bit table"))
        .collect();
    OracleFamily::uniform(members).expect("four members")
}

/// Every function `{0,1}^n -> {0,1}^m` in lexicographic table order
/// (entry for `x = 0` most significant).
pub fn enumerate_functions(n: usize, m: usize) -> Result<Vec<BoolFunc>> {
    let requested = u32::try_from(n)
        .ok()
        .and_then(|n| 1usize.checked_shl(n))
        .and_then(|rows| rows.checked_mul(m))
        .unwrap_or(usize::MAX);
    if requested > ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            requested,
            limit: ENUMERATION_LIMIT,
        });
    }
    if m == 0 {
        return Err(Error::InvalidFunction("output width m must be >= 1".into()));
    }
    let rows = 1usize << n;
    let count = 1usize << requested;
    let mask = (1u64 << m) - 1;
    let mut out = Vec::with_capacity(count);
    for code in 0..count as u64 {
        let table = (0..rows)
            .map(|x| ((code >> (m * (rows - 1 - x))) & mask) as u32)
            .collect();
        out.push(BoolFunc::new(n, m, table)?);
    }
    Ok(out)
}

/// Applies each member's oracle to `probe`.
pub fn post_oracle_states(probe: &StateVector, fam: &OracleFamily) -> Result<Ensemble> {
    if probe.num_qubits() != fam.num_qubits() {
        return Err(Error::WidthMismatch {
            expected: fam.num_qubits(),
            got: probe.num_qubits(),
        });
    }
    let items = fam
        .members()
        .iter()
        .zip(fam.priors())
        .map(|(f, &p)| Ok((p, apply_oracle(f, probe)?)))
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(items)
}

// Parsing for `n=<int> m=<int> table=<ints>`; whitespace anywhere is ignored.

struct Cursor {
    chars: Vec<(usize, char)>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn new(src: &str, line: usize) -> Self {
        Self {
            chars: src.chars().enumerate().map(|(i, c)| (i + 1, c)).collect(),
            pos: 0,
            line,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn column(&self) -> usize {
        self.chars
            .get(self.pos)
            .map_or(self.chars.len() + 1, |&(col, _)| col)
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: self.column(),
            message: message.into(),
        }
    }

    fn expect_keyword(&mut self, key: &str) -> Result<()> {
        for want in key.chars() {
            match self.peek() {
                Some(c) if c == want => self.pos += 1,
                _ => return Err(self.err(format!("expected `{key}`"))),
            }
        }
        match self.peek() {
            Some('=') => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(format!("expected `=` after `{key}`"))),
        }
    }

    fn integer(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.column();
        let mut digits = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                digits.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        if digits.is_empty() {
            return Err(self.err("expected a non-negative integer"));
        }
        digits.parse().map_err(|_| Error::Parse {
            line: self.line,
            column: start,
            message: format!("integer `{digits}` out of range"),
        })
    }
}

fn parse_line(text: &str, line: usize) -> Result<BoolFunc> {
    let mut cur = Cursor::new(text, line);
    cur.expect_keyword("n")?;
    let n = cur.integer()? as usize;
    cur.expect_keyword("m")?;
    let m = cur.integer()? as usize;
    let table_col = {
        cur.skip_ws();
        cur.column()
    };
    cur.expect_keyword("table")?;
    let mut table = Vec::new();
    loop {
        let v = cur.integer()?;
        table.push(u32::try_from(v).map_err(|_| cur.err("table entry out of range"))?);
        match cur.peek() {
            Some(',') => cur.pos += 1,
            None => break,
            Some(c) => return Err(cur.err(format!("unexpected character `{c}`"))),
        }
    }
    BoolFunc::new(n, m, table).map_err(|e| Error::Parse {
        line,
        column: table_col,
        message: e.to_string(),
    })
}
