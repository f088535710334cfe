//! Group specifications: a direct product of family atoms.
//!
//! ```text
//! atom := "C(" n ")" | "EA(" p "," r ")" | "D(" 2n ")" | "Q(" m ")"
//!       | "M(" p "," n ")" | "He(" p ")" | "G(" p "," q "," n ")"
//!       | "H(" p "," s "," t ")" | "K(" p "," s "," t ")" | "SD(" p "," q ")"
//!       | "C27Q8"
//! spec := atom ("x" atom)*
//! ```
//!
//! Whitespace is ignored. The canonical rendering is atoms joined by `" x "`
//! with no spaces inside the parentheses.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::families::{self, FamilyInstance};
use crate::formulas;
use crate::group::{check_cap, direct_product, FiniteGroup};
use crate::rational::Rational;
use crate::Limits;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    Cyclic(u64),
    ElementaryAbelian(u64, u64),
    Dihedral(u64),
    Quaternion(u64),
    Modular(u64, u64),
    Heisenberg(u64),
    Schmidt(u64, u64, u64),
    H(u64, u64, u64),
    K(u64, u64, u64),
    SchmidtSection(u64, u64),
    C27Q8,
}

impl Atom {
    /// Group order implied by the parameters, without building anything.
    pub fn order(&self) -> Option<u64> {
        use Atom::*;
        let pow = |b: u64, e: u64| u32::try_from(e).ok().and_then(|e| b.checked_pow(e));
        match *self {
            Cyclic(n) | Dihedral(n) | Quaternion(n) => Some(n),
            ElementaryAbelian(p, r) => pow(p, r),
            Modular(p, n) => pow(p, n),
            Heisenberg(p) => pow(p, 3),
            Schmidt(p, q, n) => pow(q, n.checked_sub(1)?)?.checked_mul(p),
            H(p, s, t) => pow(p, s.checked_add(t)?.checked_add(1)?),
            K(p, s, t) => pow(p, s.checked_add(t)?),
            SchmidtSection(p, q) => {
                let r = crate::arith::multiplicative_order(p, q)?;
                pow(p, r)?.checked_mul(q)
            }
            C27Q8 => Some(216),
        }
    }

    pub fn build(&self) -> Result<FiniteGroup> {
        use Atom::*;
        match *self {
            Cyclic(n) => families::cyclic(n),
            ElementaryAbelian(p, r) => families::elementary_abelian(p, r),
            Dihedral(n) => families::dihedral(n),
            Quaternion(n) => families::generalized_quaternion(n),
            Modular(p, n) => families::modular_group(p, n),
            Heisenberg(p) => families::heisenberg(p),
            Schmidt(p, q, n) => families::schmidt_gpqn(p, q, n),
            H(p, s, t) => families::h_pst(p, s, t),
            K(p, s, t) => families::k_pst(p, s, t),
            SchmidtSection(p, q) => families::elementary_rtimes_cq(p, q),
            C27Q8 => families::c27_rtimes_q8(),
        }
    }

    /// Closed-form d′ where one is known for the family.
    pub fn closed_form_d_prime(&self) -> Option<Rational> {
        use Atom::*;
        match *self {
            Cyclic(_) | ElementaryAbelian(..) => Some(Rational::one()),
            Quaternion(8) => Some(Rational::one()),
            Modular(p, n) => formulas::d_prime_modular_formula(p, n).ok(),
            Schmidt(p, _, n) => formulas::d_prime_schmidt_formula(p, n).ok(),
            Dihedral(n) if n.is_power_of_two() => {
                formulas::d_prime_dihedral_formula(n.trailing_zeros() as u64).ok()
            }
            Heisenberg(p) => formulas::d_prime_heisenberg_formula(p).ok(),
            SchmidtSection(p, q) => {
                let r = crate::arith::multiplicative_order(p, q)?;
                formulas::d_prime_schmidt_section_formula(p, q, r).ok()
            }
            C27Q8 => Some(Rational::new(2, 11)),
            _ => None,
        }
    }

    pub fn instance(&self) -> Result<FamilyInstance> {
        Ok(FamilyInstance {
            atom: *self,
            group: self.build()?,
            expected_d_prime: self.closed_form_d_prime(),
        })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Atom::*;
        match *self {
            Cyclic(n) => write!(f, "C({n})"),
            ElementaryAbelian(p, r) => write!(f, "EA({p},{r})"),
            Dihedral(n) => write!(f, "D({n})"),
            Quaternion(n) => write!(f, "Q({n})"),
            Modular(p, n) => write!(f, "M({p},{n})"),
            Heisenberg(p) => write!(f, "He({p})"),
            Schmidt(p, q, n) => write!(f, "G({p},{q},{n})"),
            H(p, s, t) => write!(f, "H({p},{s},{t})"),
            K(p, s, t) => write!(f, "K({p},{s},{t})"),
            SchmidtSection(p, q) => write!(f, "SD({p},{q})"),
            C27Q8 => write!(f, "C27Q8"),
        }
    }
}

/// A parsed group description.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    atoms: Vec<Atom>,
}

impl GroupSpec {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::invalid("a group spec needs at least one atom"));
        }
        Ok(GroupSpec { atoms })
    }

    pub fn atom(atom: Atom) -> Self {
        GroupSpec { atoms: vec![atom] }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn order(&self) -> Option<u64> {
        self.atoms
            .iter()
            .try_fold(1u64, |acc, a| acc.checked_mul(a.order()?))
    }

    /// Builds the product group, refusing before construction when the
    /// implied order passes `limits.max_order`.
    pub fn build(&self, limits: &Limits) -> Result<FiniteGroup> {
        let order = self.order().unwrap_or(u64::MAX);
        check_cap(
            usize::try_from(order).unwrap_or(usize::MAX),
            limits.max_order,
        )?;
        let mut acc = self.atoms[0].build()?;
        for atom in &self.atoms[1..] {
            acc = direct_product(&acc, &atom.build()?, limits.max_order)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, " x ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_spec(s)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn eat(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", c as char)))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            // Digits only continue an identifier that started with a letter.
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a family name"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| Error::Parse {
                pos: start,
                msg: "number too large".into(),
            })
    }

    fn args(&mut self, count: usize) -> Result<Vec<u64>> {
        self.eat(b'(')?;
        let mut out = Vec::with_capacity(count);
        for i in 0..count {
            if i > 0 {
                self.eat(b',')?;
            }
            out.push(self.number()?);
        }
        self.eat(b')')?;
        Ok(out)
    }

    fn atom(&mut self) -> Result<Atom> {
        let start = self.pos;
        let name = self.ident()?;
        let atom = match name.as_str() {
            "C27Q8" => Atom::C27Q8,
            "C" => Atom::Cyclic(self.args(1)?[0]),
            "EA" => {
                let a = self.args(2)?;
                Atom::ElementaryAbelian(a[0], a[1])
            }
            "D" => Atom::Dihedral(self.args(1)?[0]),
            "Q" => Atom::Quaternion(self.args(1)?[0]),
            "M" => {
                let a = self.args(2)?;
                Atom::Modular(a[0], a[1])
            }
            "He" => Atom::Heisenberg(self.args(1)?[0]),
            "G" => {
                let a = self.args(3)?;
                Atom::Schmidt(a[0], a[1], a[2])
            }
            "H" => {
                let a = self.args(3)?;
                Atom::H(a[0], a[1], a[2])
            }
            "K" => {
                let a = self.args(3)?;
                Atom::K(a[0], a[1], a[2])
            }
            "SD" => {
                let a = self.args(2)?;
                Atom::SchmidtSection(a[0], a[1])
            }
            other => {
                return Err(Error::Parse {
                    pos: start,
                    msg: format!("unknown family '{other}'"),
                })
            }
        };
        Ok(atom)
    }
}

pub fn parse_spec(text: &str) -> Result<GroupSpec> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let mut atoms = vec![p.atom()?];
    loop {
        p.skip_ws();
        if p.pos == p.src.len() {
            break;
        }
        p.eat(b'x')?;
        atoms.push(p.atom()?);
    }
    Ok(GroupSpec { atoms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_examples() {
        let s: GroupSpec = "D(8)".parse().unwrap();
        assert_eq!(s.atoms(), &[Atom::Dihedral(8)]);
        let s: GroupSpec = " C( 3 )x D(8) ".parse().unwrap();
        assert_eq!(s.to_string(), "C(3) x D(8)");
        assert_eq!(s.order(), Some(24));
        let s: GroupSpec = "M(2,5)".parse().unwrap();
        assert_eq!(s.build(&Limits::default()).unwrap().order(), 32);
        assert_eq!("C27Q8".parse::<GroupSpec>().unwrap().order(), Some(216));
    }

    #[test]
    fn reports_error_positions() {
        match "C(3) y D(8)".parse::<GroupSpec>() {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("{other:?}"),
        }
        match "Z(3)".parse::<GroupSpec>() {
            Err(Error::Parse { pos, msg }) => {
                assert_eq!(pos, 0);
                assert!(msg.contains('Z'));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            "M(2)".parse::<GroupSpec>(),
            Err(Error::Parse { .. })
        ));
        assert!(matches!("".parse::<GroupSpec>(), Err(Error::Parse { .. })));
    }

    #[test]
    fn forwards_parameter_errors() {
        let s: GroupSpec = "D(7)".parse().unwrap();
        assert!(matches!(
            s.build(&Limits::default()),
            Err(Error::InvalidParameter(_))
        ));
        let s: GroupSpec = "C(1000)".parse().unwrap();
        assert!(matches!(
            s.build(&Limits::default()),
            Err(Error::OrderCapExceeded { .. })
        ));
    }

    fn arb_atom() -> impl Strategy<Value = Atom> {
        let n = 1u64..200;
        prop_oneof![
            n.clone().prop_map(Atom::Cyclic),
            (n.clone(), n.clone()).prop_map(|(a, b)| Atom::ElementaryAbelian(a, b)),
            n.clone().prop_map(Atom::Dihedral),
            n.clone().prop_map(Atom::Quaternion),
            (n.clone(), n.clone()).prop_map(|(a, b)| Atom::Modular(a, b)),
            n.clone().prop_map(Atom::Heisenberg),
            (n.clone(), n.clone(), n.clone()).prop_map(|(a, b, c)| Atom::Schmidt(a, b, c)),
            (n.clone(), n.clone(), n.clone()).prop_map(|(a, b, c)| Atom::H(a, b, c)),
            (n.clone(), n.clone(), n.clone()).prop_map(|(a, b, c)| Atom::K(a, b, c)),
            (n.clone(), n).prop_map(|(a, b)| Atom::SchmidtSection(a, b)),
            Just(Atom::C27Q8),
        ]
    }

    proptest! {
        #[test]
        fn canonical_round_trip(atoms in proptest::collection::vec(arb_atom(), 1..4)) {
            let spec = GroupSpec::new(atoms).unwrap();
            let text = spec.to_string();
            let back: GroupSpec = text.parse().unwrap();
            prop_assert_eq!(&back, &spec);
            prop_assert_eq!(back.to_string(), text);
        }
    }
}
