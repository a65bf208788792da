//! Complex polynomials in two noncommuting letters `x`, `y` without constant term.
//!
//! Monomials are stored as reduced words (`x^2*y`, never `x*x*y`), so the shape of a
//! word is just the sequence of its letter blocks. [`NCPolynomial::decompose`] sorts
//! the terms into the buckets used by the fluctuation formulas for `P(A, UBU*)`.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use faer::Mat;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    X,
    Y,
}

impl Letter {
    fn symbol(self) -> char {
        match self {
            Letter::X => 'x',
            Letter::Y => 'y',
        }
    }
}

/// A nonempty reduced word `l1^p1 l2^p2 ...` with adjacent letters distinct.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    blocks: Vec<(Letter, u32)>,
}

impl Monomial {
    /// Builds a monomial from a letter sequence with powers, merging adjacent equal
    /// letters. Zero powers are dropped. Returns `None` for the empty word.
    pub fn new<I>(factors: I) -> Option<Self>
    where
        I: IntoIterator<Item = (Letter, u32)>,
    {
        let mut blocks: Vec<(Letter, u32)> = Vec::new();
        for (letter, power) in factors {
            if power == 0 {
                continue;
            }
            match blocks.last_mut() {
                Some((last, p)) if *last == letter => *p += power,
                _ => blocks.push((letter, power)),
            }
        }
        (!blocks.is_empty()).then_some(Monomial { blocks })
    }

    pub fn x(power: u32) -> Self {
        Monomial::new([(Letter::X, power)]).expect("power must be positive")
    }

    pub fn y(power: u32) -> Self {
        Monomial::new([(Letter::Y, power)]).expect("power must be positive")
    }

    pub fn blocks(&self) -> &[(Letter, u32)] {
        &self.blocks
    }

    /// Number of letter blocks; `x^k` counts as one.
    pub fn block_len(&self) -> usize {
        self.blocks.len()
    }

    pub fn degree(&self) -> u32 {
        self.blocks.iter().map(|&(_, p)| p).sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.blocks
            .len()
            .cmp(&other.blocks.len())
            .then_with(|| self.blocks.cmp(&other.blocks))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &(letter, power)) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if power == 1 {
                write!(f, "{}", letter.symbol())?;
            } else {
                write!(f, "{}^{}", letter.symbol(), power)?;
            }
        }
        Ok(())
    }
}

/// Canonical polynomial: no stored coefficient is exactly zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NCPolynomial {
    terms: BTreeMap<Monomial, Complex64>,
}

impl NCPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Complex64)>,
    {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Adds `coeff * monomial`, pruning the entry if the sum is exactly zero.
    pub fn add_term(&mut self, monomial: Monomial, coeff: Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        match self.terms.entry(monomial) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if *e.get() == zero {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                if coeff != zero {
                    e.insert(coeff);
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, monomial: &Monomial) -> Complex64 {
        self.terms.get(monomial).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn parse(text: &str) -> Result<Self> {
        Parser::new(text).parse()
    }

    /// Scalar evaluation with commuting arguments.
    pub fn eval_commutative(&self, x: Complex64, y: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|(m, &c)| {
                m.blocks.iter().fold(c, |acc, &(letter, p)| {
                    let base = match letter {
                        Letter::X => x,
                        Letter::Y => y,
                    };
                    acc * base.powu(p)
                })
            })
            .sum()
    }

    /// Sums coefficient times the ordered matrix product over all monomials.
    pub fn eval_matrix(&self, mx: &Mat<Complex64>, my: &Mat<Complex64>) -> Result<Mat<Complex64>> {
        let n = mx.nrows();
        if mx.ncols() != n || my.nrows() != n || my.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "eval_matrix needs two square matrices of one size, got {}x{} and {}x{}",
                mx.nrows(),
                mx.ncols(),
                my.nrows(),
                my.ncols()
            )));
        }
        let mut powers = PowerCache::new(mx, my);
        let mut out = Mat::<Complex64>::zeros(n, n);
        for (m, &c) in &self.terms {
            let mut prod: Option<Mat<Complex64>> = None;
            for &(letter, p) in &m.blocks {
                let factor = powers.get(letter, p);
                prod = Some(match prod {
                    None => factor.clone(),
                    Some(acc) => &acc * factor,
                });
            }
            let prod = prod.expect("monomials are nonempty");
            linalg::axpy(&mut out, c, &prod);
        }
        Ok(out)
    }

    pub fn decompose(&self) -> Decomposition {
        use Letter::{X, Y};
        let mut d = Decomposition::default();
        for (m, &c) in &self.terms {
            match *m.blocks.as_slice() {
                [(X, k)] => {
                    d.p1.insert(k, c);
                }
                [(Y, l)] => {
                    d.q1.insert(l, c);
                }
                [(X, k), (Y, l)] => {
                    d.p2.insert((k, l), c);
                }
                [(Y, l), (X, k)] => {
                    d.q2.insert((k, l), c);
                }
                [(X, k), (Y, l), (X, mm)] => {
                    d.p3.insert((k, l, mm), c);
                }
                [(Y, l), (X, k), (Y, mm)] => {
                    d.q3.insert((k, l, mm), c);
                }
                _ => d.r.add_term(m.clone(), c),
            }
        }
        d
    }

    /// Random polynomial with up to `max_terms` monomials of block length and degree
    /// bounded as given; coefficients uniform in the square `[-1, 1]^2`.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        max_terms: usize,
        max_blocks: usize,
        max_degree: u32,
        complex_coeffs: bool,
    ) -> Self {
        let terms = rng.random_range(1..=max_terms.max(1));
        let mut p = NCPolynomial::zero();
        while p.len() < terms {
            let blocks = rng.random_range(1..=max_blocks.max(1));
            let mut letter = if rng.random_bool(0.5) { Letter::X } else { Letter::Y };
            let mut factors = Vec::with_capacity(blocks);
            let mut degree_left = max_degree.max(blocks as u32);
            for b in 0..blocks {
                let reserve = (blocks - b - 1) as u32;
                let hi = (degree_left - reserve).clamp(1, 2);
                let power = rng.random_range(1..=hi);
                degree_left -= power;
                factors.push((letter, power));
                letter = match letter {
                    Letter::X => Letter::Y,
                    Letter::Y => Letter::X,
                };
            }
            let re = rng.random_range(-1.0..1.0);
            let im = if complex_coeffs { rng.random_range(-1.0..1.0) } else { 0.0 };
            if let Some(m) = Monomial::new(factors) {
                p.add_term(m, Complex64::new(re, im));
            }
        }
        p
    }
}

struct PowerCache<'a> {
    mx: &'a Mat<Complex64>,
    my: &'a Mat<Complex64>,
    xs: Vec<Mat<Complex64>>,
    ys: Vec<Mat<Complex64>>,
}

impl<'a> PowerCache<'a> {
    fn new(mx: &'a Mat<Complex64>, my: &'a Mat<Complex64>) -> Self {
        PowerCache {
            mx,
            my,
            xs: vec![mx.clone()],
            ys: vec![my.clone()],
        }
    }

    fn get(&mut self, letter: Letter, power: u32) -> &Mat<Complex64> {
        let (base, cache) = match letter {
            Letter::X => (self.mx, &mut self.xs),
            Letter::Y => (self.my, &mut self.ys),
        };
        while cache.len() < power as usize {
            let next = cache.last().expect("seeded with the base") * base;
            cache.push(next);
        }
        &cache[power as usize - 1]
    }
}

impl FromStr for NCPolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NCPolynomial::parse(s)
    }
}

fn fmt_real(v: f64) -> String {
    format!("{v}")
}

impl fmt::Display for NCPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0*x");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let first = i == 0;
            if c.im == 0.0 {
                let negative = c.re < 0.0;
                let mag = c.re.abs();
                match (first, negative) {
                    (true, true) => f.write_str("-")?,
                    (true, false) => {}
                    (false, true) => f.write_str(" - ")?,
                    (false, false) => f.write_str(" + ")?,
                }
                if mag != 1.0 {
                    write!(f, "{}*", fmt_real(mag))?;
                }
            } else {
                if !first {
                    f.write_str(" + ")?;
                }
                let sign = if c.im < 0.0 { '-' } else { '+' };
                write!(f, "({}{}{}i)*", fmt_real(c.re), sign, fmt_real(c.im.abs()))?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

/// Polynomial split by word shape.
///
/// Keys follow the exponent names of the expansion: `p2[(k, l)]` is the coefficient of
/// `x^k y^l`, `q2[(k, l)]` of `y^l x^k`, `p3[(k, l, m)]` of `x^k y^l x^m` and
/// `q3[(k, l, m)]` of `y^l x^k y^m`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Decomposition {
    pub p1: BTreeMap<u32, Complex64>,
    pub q1: BTreeMap<u32, Complex64>,
    pub p2: BTreeMap<(u32, u32), Complex64>,
    pub q2: BTreeMap<(u32, u32), Complex64>,
    pub p3: BTreeMap<(u32, u32, u32), Complex64>,
    pub q3: BTreeMap<(u32, u32, u32), Complex64>,
    /// Words with four or more letter blocks.
    pub r: NCPolynomial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bucket {
    P2,
    Q2,
    P3,
    Q3,
}

pub fn eval_univariate(poly: &BTreeMap<u32, Complex64>, z: Complex64) -> Complex64 {
    poly.iter().map(|(&k, &c)| c * z.powu(k)).sum()
}

impl Decomposition {
    pub fn reassemble(&self) -> NCPolynomial {
        use Letter::{X, Y};
        let mut p = self.r.clone();
        let mono = |f: Vec<(Letter, u32)>| Monomial::new(f).expect("bucket keys have positive powers");
        for (&k, &c) in &self.p1 {
            p.add_term(mono(vec![(X, k)]), c);
        }
        for (&l, &c) in &self.q1 {
            p.add_term(mono(vec![(Y, l)]), c);
        }
        for (&(k, l), &c) in &self.p2 {
            p.add_term(mono(vec![(X, k), (Y, l)]), c);
        }
        for (&(k, l), &c) in &self.q2 {
            p.add_term(mono(vec![(Y, l), (X, k)]), c);
        }
        for (&(k, l, m), &c) in &self.p3 {
            p.add_term(mono(vec![(X, k), (Y, l), (X, m)]), c);
        }
        for (&(k, l, m), &c) in &self.q3 {
            p.add_term(mono(vec![(Y, l), (X, k), (Y, m)]), c);
        }
        p
    }

    pub fn p1_at(&self, x: Complex64) -> Complex64 {
        eval_univariate(&self.p1, x)
    }

    pub fn q1_at(&self, y: Complex64) -> Complex64 {
        eval_univariate(&self.q1, y)
    }

    /// `P2 = sum a_{k,l} a^k b^l`, `Q2 = sum b_{k,l} a^k b^l`,
    /// `P3 = sum c_{k,l,m} a^(k+m) b^l`, `Q3 = sum d_{k,l,m} a^k b^(l+m)`.
    pub fn eval_component(&self, bucket: Bucket, alpha: Complex64, beta: Complex64) -> Complex64 {
        match bucket {
            Bucket::P2 => self
                .p2
                .iter()
                .map(|(&(k, l), &c)| c * alpha.powu(k) * beta.powu(l))
                .sum(),
            Bucket::Q2 => self
                .q2
                .iter()
                .map(|(&(k, l), &c)| c * alpha.powu(k) * beta.powu(l))
                .sum(),
            Bucket::P3 => self
                .p3
                .iter()
                .map(|(&(k, l, m), &c)| c * alpha.powu(k + m) * beta.powu(l))
                .sum(),
            Bucket::Q3 => self
                .q3
                .iter()
                .map(|(&(k, l, m), &c)| c * alpha.powu(k) * beta.powu(l + m))
                .sum(),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn parse(mut self) -> Result<NCPolynomial> {
        let mut poly = NCPolynomial::zero();
        // A leading sign is accepted so that printed negative polynomials reparse.
        let mut sign = if self.eat(b'-') {
            -1.0
        } else {
            self.eat(b'+');
            1.0
        };
        loop {
            let (m, c) = self.term()?;
            poly.add_term(m, c * sign);
            match self.peek() {
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    sign = 1.0;
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -1.0;
                }
                Some(c) => return self.err(format!("unexpected '{}'", c as char)),
            }
        }
        Ok(poly)
    }

    fn term(&mut self) -> Result<(Monomial, Complex64)> {
        let start = {
            self.skip_ws();
            self.pos
        };
        let coeff = match self.peek() {
            Some(b'x') | Some(b'y') => Complex64::new(1.0, 0.0),
            Some(b'(') => {
                let c = self.complex()?;
                self.expect_star_after_coeff(start)?;
                c
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let v = self.number()?;
                self.expect_star_after_coeff(start)?;
                Complex64::new(v, 0.0)
            }
            Some(c) => return self.err(format!("expected a term, found '{}'", c as char)),
            None => return self.err("expected a term, found end of input"),
        };
        let mut factors = vec![self.factor()?];
        while self.eat(b'*') {
            factors.push(self.factor()?);
        }
        let m = Monomial::new(factors).expect("factors carry positive powers");
        Ok((m, coeff))
    }

    fn expect_star_after_coeff(&mut self, term_start: usize) -> Result<()> {
        match self.peek() {
            Some(b'*') => {
                self.pos += 1;
                Ok(())
            }
            None | Some(b'+') | Some(b'-') => Err(Error::ConstantTerm { pos: term_start }),
            Some(c) => self.err(format!("expected '*' after coefficient, found '{}'", c as char)),
        }
    }

    fn factor(&mut self) -> Result<(Letter, u32)> {
        let letter = match self.peek() {
            Some(b'x') => Letter::X,
            Some(b'y') => Letter::Y,
            Some(c) => return self.err(format!("expected 'x' or 'y', found '{}'", c as char)),
            None => return self.err("expected 'x' or 'y', found end of input"),
        };
        self.pos += 1;
        let power = if self.eat(b'^') {
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return self.err("expected a positive integer exponent");
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
            match text.parse::<u32>() {
                Ok(p) if p >= 1 => p,
                _ => {
                    self.pos = start;
                    return self.err(format!("exponent must be a positive integer, got {text}"));
                }
            }
        } else {
            1
        };
        Ok((letter, power))
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut n = digits(self);
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            self.pos = start;
            return self.err("expected a number");
        }
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && matches!(self.src[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii number");
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => {
                self.pos = start;
                self.err(format!("invalid number '{text}'"))
            }
        }
    }

    fn complex(&mut self) -> Result<Complex64> {
        if !self.eat(b'(') {
            return self.err("expected '('");
        }
        let re_sign = if self.eat(b'-') {
            -1.0
        } else {
            self.eat(b'+');
            1.0
        };
        let re = re_sign * self.number()?;
        let im_sign = match self.peek() {
            Some(b'+') => 1.0,
            Some(b'-') => -1.0,
            _ => return self.err("expected '+' or '-' in complex coefficient"),
        };
        self.pos += 1;
        let im = im_sign * self.number()?;
        if !self.eat(b'i') {
            return self.err("expected 'i' after imaginary part");
        }
        if !self.eat(b')') {
            return self.err("expected ')' closing complex coefficient");
        }
        Ok(Complex64::new(re, im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn mono(f: &[(Letter, u32)]) -> Monomial {
        Monomial::new(f.iter().copied()).unwrap()
    }

    use Letter::{X, Y};

    #[test]
    fn parses_unit_sum() {
        let p = NCPolynomial::parse("x + y").unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.coefficient(&Monomial::x(1)), c(1.0));
        assert_eq!(p.coefficient(&Monomial::y(1)), c(1.0));
    }

    #[test]
    fn parses_fig3_model() {
        let p = NCPolynomial::parse("x + y + x*y + y*x + 0.5*x*y*x + 0.5*y*x*y").unwrap();
        assert_eq!(p.len(), 6);
        assert_eq!(p.coefficient(&mono(&[(X, 1), (Y, 1), (X, 1)])), c(0.5));
        assert_eq!(p.coefficient(&mono(&[(Y, 1), (X, 1)])), c(1.0));
    }

    #[test]
    fn merges_adjacent_letters() {
        let p = NCPolynomial::parse("x*x*y").unwrap();
        assert_eq!(p.coefficient(&mono(&[(X, 2), (Y, 1)])), c(1.0));
        assert_eq!(p.to_string(), "x^2*y");
    }

    #[test]
    fn parses_complex_and_signs() {
        let p = NCPolynomial::parse("x - (1.5-2i)*y^3 - 2*x*y").unwrap();
        assert_eq!(p.coefficient(&Monomial::y(3)), Complex64::new(-1.5, 2.0));
        assert_eq!(p.coefficient(&mono(&[(X, 1), (Y, 1)])), c(-2.0));
    }

    #[test]
    fn cancelling_terms_are_pruned() {
        let p = NCPolynomial::parse("x*y - x*y + y").unwrap();
        assert_eq!(p.len(), 1);
        let tiny = NCPolynomial::parse("1e-300*x").unwrap();
        assert_eq!(tiny.len(), 1);
    }

    #[test]
    fn rejects_constant_term() {
        match NCPolynomial::parse("x + 2") {
            Err(Error::ConstantTerm { pos }) => assert_eq!(pos, 4),
            other => panic!("expected constant-term error, got {other:?}"),
        }
        assert!(matches!(NCPolynomial::parse("3"), Err(Error::ConstantTerm { .. })));
    }

    #[test]
    fn syntax_errors_carry_position() {
        match NCPolynomial::parse("x + z") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(NCPolynomial::parse("x^0"), Err(Error::Syntax { .. })));
        assert!(matches!(NCPolynomial::parse("x +"), Err(Error::Syntax { .. })));
        assert!(matches!(NCPolynomial::parse("2 x"), Err(Error::Syntax { .. })));
        assert!(matches!(NCPolynomial::parse("(1+2)*x"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn print_parse_fixed_point_on_corpus() {
        let corpus = [
            "x + y",
            "x + y + x*y*x + y*x*y",
            "x + y + x*y + y*x + 0.5*x*y*x + 0.5*y*x*y",
            "-x^3 + (0.25-1e-3i)*y*x - 7*x*y*x*y",
            "0.1*x + 1e-20*y",
            "(0+1i)*x",
            "x*x*x - y",
        ];
        for text in corpus {
            let p = NCPolynomial::parse(text).unwrap();
            let printed = p.to_string();
            let again = NCPolynomial::parse(&printed).unwrap();
            assert_eq!(p, again, "{text} -> {printed}");
            assert_eq!(printed, again.to_string());
        }
    }

    #[test]
    fn decompose_fig2_model() {
        let d = NCPolynomial::parse("x + y + x*y*x + y*x*y").unwrap().decompose();
        assert_eq!(d.p1, BTreeMap::from([(1, c(1.0))]));
        assert_eq!(d.q1, BTreeMap::from([(1, c(1.0))]));
        assert!(d.p2.is_empty() && d.q2.is_empty());
        assert_eq!(d.p3, BTreeMap::from([((1, 1, 1), c(1.0))]));
        assert_eq!(d.q3, BTreeMap::from([((1, 1, 1), c(1.0))]));
        assert!(d.r.is_empty());
    }

    #[test]
    fn decompose_by_shape() {
        let d = NCPolynomial::parse("x^2*y^3").unwrap().decompose();
        assert_eq!(d.p2, BTreeMap::from([((2, 3), c(1.0))]));
        assert!(d.p1.is_empty() && d.q1.is_empty() && d.q2.is_empty());
        assert!(d.p3.is_empty() && d.q3.is_empty() && d.r.is_empty());

        let d = NCPolynomial::parse("x*y*x*y").unwrap().decompose();
        assert_eq!(d.r.len(), 1);
        assert_eq!(d.r.coefficient(&mono(&[(X, 1), (Y, 1), (X, 1), (Y, 1)])), c(1.0));
        assert!(d.p1.is_empty() && d.p2.is_empty() && d.p3.is_empty());

        // y^l x^k is keyed (k, l)
        let d = NCPolynomial::parse("y^3*x^2").unwrap().decompose();
        assert_eq!(d.q2, BTreeMap::from([((2, 3), c(1.0))]));
    }

    #[test]
    fn component_values() {
        let fig2 = NCPolynomial::parse("x + y + x*y*x + y*x*y").unwrap().decompose();
        let (a, b) = (c(2.0), c(4.0));
        assert_eq!(fig2.eval_component(Bucket::P3, a, b), c(16.0));
        assert_eq!(fig2.eval_component(Bucket::P2, a, b), c(0.0));
        assert_eq!(fig2.eval_component(Bucket::Q3, a, b), c(32.0));
        let fig3 = NCPolynomial::parse("x + y + x*y + y*x + 0.5*x*y*x + 0.5*y*x*y")
            .unwrap()
            .decompose();
        assert_eq!(fig3.eval_component(Bucket::P2, a, b), c(8.0));
        assert_eq!(fig3.eval_component(Bucket::Q2, a, b), c(8.0));
    }

    #[test]
    fn univariate_parts() {
        let fig2 = NCPolynomial::parse("x + y + x*y*x + y*x*y").unwrap().decompose();
        assert_eq!(fig2.p1_at(c(5.0)), c(5.0));
        let fig3 = NCPolynomial::parse("x + y + x*y + y*x + 0.5*x*y*x + 0.5*y*x*y")
            .unwrap()
            .decompose();
        assert_eq!(fig3.q1_at(c(-0.2)), c(-0.2));
        let sq = NCPolynomial::parse("x^2").unwrap().decompose();
        assert_eq!(eval_univariate(&sq.p1, c(3.0)), c(9.0));
    }

    fn mat(rows: &[&[f64]]) -> Mat<Complex64> {
        Mat::from_fn(rows.len(), rows[0].len(), |i, j| c(rows[i][j]))
    }

    #[test]
    fn eval_matrix_basics() {
        let mx = mat(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let my = mat(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let px = NCPolynomial::parse("x").unwrap();
        assert_eq!(px.eval_matrix(&mx, &my).unwrap(), mx);

        let comm = NCPolynomial::parse("x*y - y*x").unwrap();
        let d1 = mat(&[&[2.0, 0.0], &[0.0, -1.0]]);
        let d2 = mat(&[&[5.0, 0.0], &[0.0, 3.0]]);
        let z = comm.eval_matrix(&d1, &d2).unwrap();
        assert!(linalg::max_abs(&z) == 0.0);

        // xyx with x = diag(2,0), y = swap: hand product is the zero matrix.
        let xyx = NCPolynomial::parse("x*y*x").unwrap();
        let got = xyx.eval_matrix(&mat(&[&[2.0, 0.0], &[0.0, 0.0]]), &my).unwrap();
        assert_eq!(got, mat(&[&[0.0, 0.0], &[0.0, 0.0]]));
        // y x y on the same inputs: swap * diag(2,0) * swap = diag(0,2)
        let yxy = NCPolynomial::parse("y*x*y").unwrap();
        let got = yxy.eval_matrix(&mat(&[&[2.0, 0.0], &[0.0, 0.0]]), &my).unwrap();
        assert_eq!(got, mat(&[&[0.0, 0.0], &[0.0, 2.0]]));
    }

    #[test]
    fn eval_matrix_dimension_mismatch() {
        let p = NCPolynomial::parse("x*y").unwrap();
        let a = Mat::<Complex64>::zeros(2, 2);
        let b = Mat::<Complex64>::zeros(3, 3);
        assert!(matches!(p.eval_matrix(&a, &b), Err(Error::DimensionMismatch(_))));
    }
}
