//! Symbolic field elements over jet variables: expression DAGs with
//! constant folding, a formal derivation and memoized evaluation.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::dfield::{Differential, Field};
use crate::error::{Error, Result};

/// Jet variable index `2k + c`: coordinate `c` (`0` for `x`, `1` for `y`)
/// differentiated `k` times.
pub type VarIndex = usize;

pub fn var_name(i: VarIndex) -> String {
    let base = if i.is_multiple_of(2) { "x" } else { "y" };
    format!("{base}{}", "'".repeat(i / 2))
}

enum Node<K: Field> {
    Const(K),
    Var(VarIndex),
    Add(Sym<K>, Sym<K>),
    Mul(Sym<K>, Sym<K>),
    Neg(Sym<K>),
    Inv(Sym<K>),
}

#[derive(Clone)]
pub struct Sym<K: Field> {
    node: Arc<Node<K>>,
    proto: K,
}

const DISPLAY_LIMIT: usize = 4096;

impl<K: Field> Sym<K> {
    fn mk(node: Node<K>, proto: &K) -> Sym<K> {
        Sym {
            node: Arc::new(node),
            proto: proto.zero_like(),
        }
    }

    pub fn constant(c: K) -> Sym<K> {
        let proto = c.zero_like();
        Sym::mk(Node::Const(c), &proto)
    }

    pub fn var(i: VarIndex, proto: &K) -> Sym<K> {
        Sym::mk(Node::Var(i), proto)
    }

    pub fn as_const(&self) -> Option<&K> {
        match &*self.node {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    fn key(&self) -> usize {
        Arc::as_ptr(&self.node) as *const () as usize
    }

    /// Largest jet variable index occurring, if any.
    pub fn max_var(&self) -> Option<VarIndex> {
        fn go<K: Field>(s: &Sym<K>, memo: &mut HashMap<usize, Option<VarIndex>>) -> Option<VarIndex> {
            if let Some(r) = memo.get(&s.key()) {
                return *r;
            }
            let r = match &*s.node {
                Node::Const(_) => None,
                Node::Var(i) => Some(*i),
                Node::Add(a, b) | Node::Mul(a, b) => go(a, memo).max(go(b, memo)),
                Node::Neg(a) | Node::Inv(a) => go(a, memo),
            };
            memo.insert(s.key(), r);
            r
        }
        go(self, &mut HashMap::new())
    }

    /// Highest derivative order among the variables used.
    pub fn order(&self) -> Option<usize> {
        self.max_var().map(|i| i / 2)
    }

    /// Substitutes `values[i]` for variable `i`.
    pub fn eval(&self, values: &[K]) -> Result<K> {
        fn go<K: Field>(s: &Sym<K>, values: &[K], memo: &mut HashMap<usize, K>) -> Result<K> {
            if let Some(r) = memo.get(&s.key()) {
                return Ok(r.clone());
            }
            let r = match &*s.node {
                Node::Const(c) => c.clone(),
                Node::Var(i) => values.get(*i).cloned().ok_or(Error::OrderMismatch {
                    used: i / 2,
                    declared: (values.len() / 2).saturating_sub(1),
                })?,
                Node::Add(a, b) => go(a, values, memo)? + go(b, values, memo)?,
                Node::Mul(a, b) => go(a, values, memo)? * go(b, values, memo)?,
                Node::Neg(a) => -go(a, values, memo)?,
                Node::Inv(a) => go(a, values, memo)?.inv()?,
            };
            memo.insert(s.key(), r.clone());
            Ok(r)
        }
        go(self, values, &mut HashMap::new())
    }

    fn write(&self, out: &mut String) {
        if out.len() > DISPLAY_LIMIT {
            return;
        }
        match &*self.node {
            Node::Const(c) => out.push_str(&format!("({c})")),
            Node::Var(i) => out.push_str(&var_name(*i)),
            Node::Add(a, b) => {
                out.push('(');
                a.write(out);
                out.push('+');
                b.write(out);
                out.push(')');
            }
            Node::Mul(a, b) => {
                a.write(out);
                out.push('*');
                b.write(out);
            }
            Node::Neg(a) => {
                out.push_str("(-");
                a.write(out);
                out.push(')');
            }
            Node::Inv(a) => {
                out.push_str("1/(");
                a.write(out);
                out.push(')');
            }
        }
    }
}

impl<K: Field> PartialEq for Sym<K> {
    fn eq(&self, other: &Sym<K>) -> bool {
        match (&*self.node, &*other.node) {
            (Node::Const(a), Node::Const(b)) => a == b,
            (Node::Var(i), Node::Var(j)) => i == j,
            _ => Arc::ptr_eq(&self.node, &other.node),
        }
    }
}

impl<K: Field> fmt::Display for Sym<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write(&mut s);
        if s.len() > DISPLAY_LIMIT {
            s.truncate(s.char_indices().take_while(|(i, _)| *i < DISPLAY_LIMIT).count());
            s.push('…');
        }
        write!(f, "{s}")
    }
}

impl<K: Field> fmt::Debug for Sym<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<K: Field> Add for Sym<K> {
    type Output = Sym<K>;
    fn add(self, rhs: Sym<K>) -> Sym<K> {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Sym::constant(a.clone() + b.clone()),
            (Some(a), _) if a.is_zero() => rhs,
            (_, Some(b)) if b.is_zero() => self,
            _ => {
                let proto = self.proto.clone();
                Sym::mk(Node::Add(self, rhs), &proto)
            }
        }
    }
}

impl<K: Field> Sub for Sym<K> {
    type Output = Sym<K>;
    fn sub(self, rhs: Sym<K>) -> Sym<K> {
        self + (-rhs)
    }
}

impl<K: Field> Neg for Sym<K> {
    type Output = Sym<K>;
    fn neg(self) -> Sym<K> {
        match &*self.node {
            Node::Const(c) => Sym::constant(-c.clone()),
            Node::Neg(a) => a.clone(),
            _ => {
                let proto = self.proto.clone();
                Sym::mk(Node::Neg(self), &proto)
            }
        }
    }
}

impl<K: Field> Mul for Sym<K> {
    type Output = Sym<K>;
    fn mul(self, rhs: Sym<K>) -> Sym<K> {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Sym::constant(a.clone() * b.clone()),
            (Some(a), _) | (_, Some(a)) if a.is_zero() => Sym::constant(a.zero_like()),
            (Some(a), _) if a.is_one() => rhs,
            (_, Some(b)) if b.is_one() => self,
            _ => {
                let proto = self.proto.clone();
                Sym::mk(Node::Mul(self, rhs), &proto)
            }
        }
    }
}

impl<K: Field> Field for Sym<K> {
    fn zero_like(&self) -> Sym<K> {
        Sym::constant(self.proto.zero_like())
    }

    fn one_like(&self) -> Sym<K> {
        Sym::constant(self.proto.one_like())
    }

    fn from_int_like(&self, n: i64) -> Sym<K> {
        Sym::constant(self.proto.from_int_like(n))
    }

    /// Only constants are recognized as zero; symbolic expressions are
    /// treated as generic.
    fn is_zero(&self) -> bool {
        self.as_const().is_some_and(|c| c.is_zero())
    }

    fn inv(&self) -> Result<Sym<K>> {
        match &*self.node {
            Node::Const(c) => Ok(Sym::constant(c.inv()?)),
            Node::Inv(a) => Ok(a.clone()),
            _ => Ok(Sym::mk(Node::Inv(self.clone()), &self.proto)),
        }
    }

    fn characteristic(&self) -> u64 {
        self.proto.characteristic()
    }
}

impl<K: Differential> Differential for Sym<K> {
    /// Formal derivation: `δ` on constants, `v^{(k)} ↦ v^{(k+1)}` on
    /// variables, extended by the Leibniz rule.
    fn derive(&self) -> Sym<K> {
        fn go<K: Differential>(s: &Sym<K>, memo: &mut HashMap<usize, Sym<K>>) -> Sym<K> {
            if let Some(r) = memo.get(&s.key()) {
                return r.clone();
            }
            let r = match &*s.node {
                Node::Const(c) => Sym::constant(c.derive()),
                Node::Var(i) => Sym::var(i + 2, &s.proto),
                Node::Add(a, b) => go(a, memo) + go(b, memo),
                Node::Mul(a, b) => go(a, memo) * b.clone() + a.clone() * go(b, memo),
                Node::Neg(a) => -go(a, memo),
                Node::Inv(a) => -(go(a, memo) * s.clone() * s.clone()),
            };
            memo.insert(s.key(), r.clone());
            r
        }
        go(self, &mut HashMap::new())
    }
}
