//! Finite groups stored as full multiplication tables.

use std::collections::{HashMap, VecDeque};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::GroupError;

pub const DEFAULT_CAP: usize = 2000;

/// Index into the element list of a [`FiniteGroup`]; `0` is the identity.
pub type Elem = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    mult: Vec<u32>,
    inv: Vec<Elem>,
    elem_order: Vec<usize>,
    class_of: Vec<usize>,
    classes: Vec<Vec<Elem>>,
    centralizer: Vec<usize>,
    exponent: usize,
}

impl FiniteGroup {
    /// Closes the given permutations (0-based image lists) under composition.
    ///
    /// Elements are numbered breadth-first from the identity, trying the
    /// generators in input order. The product `x·y` applies `y` first.
    pub fn from_permutations(gens: &[Vec<usize>], cap: usize) -> Result<Self, GroupError> {
        if gens.is_empty() {
            return Err(GroupError::InvalidPermutation("no generators given".into()));
        }
        let deg = gens[0].len();
        for p in gens {
            if p.len() != deg {
                return Err(GroupError::InvalidPermutation("generators act on sets of different sizes".into()));
            }
            let mut seen = vec![false; deg];
            for &x in p {
                if x >= deg || seen[x] {
                    return Err(GroupError::InvalidPermutation(format!("{p:?} is not a bijection of 0..{deg}")));
                }
                seen[x] = true;
            }
        }
        let compose = |x: &[usize], y: &[usize]| -> Vec<usize> { y.iter().map(|&i| x[i]).collect() };
        let id: Vec<usize> = (0..deg).collect();
        let mut elems = vec![id.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(id, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                let p = compose(&elems[i], g);
                if !index.contains_key(&p) {
                    if elems.len() == cap {
                        return Err(GroupError::ClosureExceedsCap { cap });
                    }
                    index.insert(p.clone(), elems.len());
                    queue.push_back(elems.len());
                    elems.push(p);
                }
            }
        }
        let n = elems.len();
        let mut mult = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                mult[i * n + j] = index[&compose(&elems[i], &elems[j])] as u32;
            }
        }
        Ok(Self::assemble(format!("perm({n})"), n, mult))
    }

    /// Validates a Cayley table whose element 0 is the identity.
    pub fn from_mult_table(table: &[Vec<usize>]) -> Result<Self, GroupError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::InvalidTable("empty table".into()));
        }
        let mut mult = vec![0u32; n * n];
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::InvalidTable(format!("row {i} has length {}", row.len())));
            }
            for (j, &x) in row.iter().enumerate() {
                if x >= n {
                    return Err(GroupError::InvalidTable(format!("entry ({i},{j}) = {x} out of range")));
                }
                mult[i * n + j] = x as u32;
            }
        }
        for i in 0..n {
            if mult[i] as usize != i || mult[i * n] as usize != i {
                return Err(GroupError::InvalidTable("element 0 is not the identity".into()));
            }
            let mut row = vec![false; n];
            let mut col = vec![false; n];
            for j in 0..n {
                let r = mult[i * n + j] as usize;
                let c = mult[j * n + i] as usize;
                if row[r] || col[c] {
                    return Err(GroupError::InvalidTable(format!("row or column {i} repeats an entry")));
                }
                row[r] = true;
                col[c] = true;
            }
        }
        // Light's test: elements s with (x·s)·y = x·(s·y) for all x, y form a
        // closed subset, so checking a generating set suffices.
        let m = |a: usize, b: usize| mult[a * n + b] as usize;
        let mut in_closure = vec![false; n];
        in_closure[0] = true;
        let mut members = vec![0usize];
        let mut gens = Vec::new();
        for s in 0..n {
            if in_closure[s] {
                continue;
            }
            gens.push(s);
            members.push(s);
            in_closure[s] = true;
            let mut k = 0;
            while k < members.len() {
                let x = members[k];
                for &g in &gens {
                    let y = m(x, g);
                    if !in_closure[y] {
                        in_closure[y] = true;
                        members.push(y);
                    }
                }
                k += 1;
            }
        }
        for &s in &gens {
            for x in 0..n {
                let xs = m(x, s);
                for y in 0..n {
                    if m(xs, y) != m(x, m(s, y)) {
                        return Err(GroupError::InvalidTable(format!("not associative at ({x},{s},{y})")));
                    }
                }
            }
        }
        Ok(Self::assemble(format!("table({n})"), n, mult))
    }

    pub fn builtin(family: &str, n: i64) -> Result<Self, GroupError> {
        let out_of_range = || GroupError::ParameterOutOfRange { family: family.to_string(), n };
        let mut g = match family {
            "cyclic" => {
                if !(1..=DEFAULT_CAP as i64).contains(&n) {
                    return Err(out_of_range());
                }
                let n = n as usize;
                let mut mult = vec![0u32; n * n];
                for i in 0..n {
                    for j in 0..n {
                        mult[i * n + j] = ((i + j) % n) as u32;
                    }
                }
                Self::assemble(String::new(), n, mult)
            }
            "dihedral" => {
                if !(1..=(DEFAULT_CAP / 2) as i64).contains(&n) {
                    return Err(out_of_range());
                }
                Self::metacyclic(n as usize, false)
            }
            "binary_dihedral" => {
                if !(1..=(DEFAULT_CAP / 4) as i64).contains(&n) {
                    return Err(out_of_range());
                }
                Self::metacyclic(n as usize, true)
            }
            "quaternion" => {
                if !(3..=10).contains(&n) {
                    return Err(out_of_range());
                }
                Self::metacyclic(1usize << (n - 2), true)
            }
            "symmetric" => {
                if !(1..=6).contains(&n) {
                    return Err(out_of_range());
                }
                let n = n as usize;
                if n == 1 {
                    Self::from_permutations(&[vec![0]], DEFAULT_CAP)?
                } else {
                    let mut t: Vec<usize> = (0..n).collect();
                    t.swap(0, 1);
                    let c: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
                    Self::from_permutations(&[t, c], DEFAULT_CAP)?
                }
            }
            _ => return Err(GroupError::UnknownFamily(family.to_string())),
        };
        g.name = format!("{family}({n})");
        Ok(g)
    }

    /// Elements `a^r` then `b a^r` for `r < 2n` (binary) or `r < n`, with
    /// `b a b⁻¹ = a⁻¹` and `b² = a^n` (binary) or `b² = 1`.
    fn metacyclic(n: usize, binary: bool) -> Self {
        let m = if binary { 2 * n } else { n };
        let order = 2 * m;
        let mut mult = vec![0u32; order * order];
        for x in 0..order {
            let (e1, r) = (x / m, x % m);
            for y in 0..order {
                let (e2, s) = (y / m, y % m);
                // b^{e1} a^r · b^{e2} a^s, using a^r b = b a^{−r}
                let mut e = e1 + e2;
                let mut k = if e2 == 1 { s as i64 - r as i64 } else { (r + s) as i64 };
                if e == 2 {
                    e = 0;
                    if binary {
                        k += n as i64;
                    }
                }
                let k = k.rem_euclid(m as i64) as usize;
                mult[x * order + y] = (e * m + k) as u32;
            }
        }
        Self::assemble(String::new(), order, mult)
    }

    fn assemble(name: String, n: usize, mult: Vec<u32>) -> Self {
        let m = |a: usize, b: usize| mult[a * n + b] as usize;
        let mut inv = vec![0; n];
        for a in 0..n {
            inv[a] = (0..n).find(|&b| m(a, b) == 0).expect("Latin square has an inverse");
        }
        let mut elem_order = vec![1; n];
        for (a, o) in elem_order.iter_mut().enumerate() {
            let mut x = a;
            while x != 0 {
                x = m(x, a);
                *o += 1;
            }
        }
        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        for h in 0..n {
            if class_of[h] != usize::MAX {
                continue;
            }
            let c = classes.len();
            let mut members = Vec::new();
            for x in 0..n {
                let y = m(m(x, h), inv[x]);
                if class_of[y] == usize::MAX {
                    class_of[y] = c;
                    members.push(y);
                }
            }
            members.sort_unstable();
            classes.push(members);
        }
        let centralizer = classes.iter().map(|k| n / k.len()).collect();
        let exponent = elem_order.iter().fold(1usize, |acc, &o| acc.lcm(&o));
        FiniteGroup { name, order: n, mult, inv, elem_order, class_of, classes, centralizer, exponent }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mult[a * self.order + b] as usize
    }

    pub fn inv(&self, a: Elem) -> Elem {
        self.inv[a]
    }

    /// `h^k` by repeated squaring; negative `k` uses the inverse.
    pub fn power(&self, h: Elem, k: i64) -> Elem {
        let mut base = if k < 0 { self.inv[h] } else { h };
        let mut e = k.unsigned_abs();
        let mut acc = 0;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn element_order(&self, h: Elem) -> usize {
        self.elem_order[h]
    }

    pub fn exponent(&self) -> usize {
        self.exponent
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[Vec<Elem>] {
        &self.classes
    }

    pub fn class(&self, c: usize) -> &[Elem] {
        &self.classes[c]
    }

    pub fn class_size(&self, c: usize) -> usize {
        self.classes[c].len()
    }

    /// Smallest element of the class.
    pub fn class_rep(&self, c: usize) -> Elem {
        self.classes[c][0]
    }

    pub fn class_of(&self, h: Elem) -> usize {
        self.class_of[h]
    }

    pub fn class_centralizer(&self, c: usize) -> usize {
        self.centralizer[c]
    }

    pub fn centralizer_order(&self, h: Elem) -> usize {
        self.centralizer[self.class_of[h]]
    }

    /// Order of the elements in class `c`.
    pub fn class_element_order(&self, c: usize) -> usize {
        self.elem_order[self.class_rep(c)]
    }

    /// Class of `h^k` for `h` in class `c`.
    pub fn class_power(&self, c: usize, k: i64) -> usize {
        self.class_of[self.power(self.class_rep(c), k)]
    }

    pub fn class_inverse(&self, c: usize) -> usize {
        self.class_of[self.inv[self.class_rep(c)]]
    }

    pub fn mult_table(&self) -> Vec<Vec<usize>> {
        (0..self.order).map(|a| (0..self.order).map(|b| self.mul(a, b)).collect()).collect()
    }
}

/// JSON group descriptor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupDescriptor {
    Family(FamilyDescriptor),
    Permutations(PermDescriptor),
    Table(TableDescriptor),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDescriptor {
    pub family: String,
    pub n: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PermDescriptor {
    pub permutations: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableDescriptor {
    pub mult_table: Vec<Vec<usize>>,
}

impl GroupDescriptor {
    pub fn family(name: &str, n: i64) -> Self {
        GroupDescriptor::Family(FamilyDescriptor { family: name.to_string(), n })
    }

    pub fn build(&self, cap: usize) -> Result<FiniteGroup, GroupError> {
        match self {
            GroupDescriptor::Family(f) => FiniteGroup::builtin(&f.family, f.n),
            GroupDescriptor::Permutations(p) => FiniteGroup::from_permutations(&p.permutations, cap),
            GroupDescriptor::Table(t) => {
                if t.mult_table.len() > cap {
                    return Err(GroupError::ClosureExceedsCap { cap });
                }
                FiniteGroup::from_mult_table(&t.mult_table)
            }
        }
    }

    pub fn from_json(s: &str) -> Result<Self, GroupError> {
        serde_json::from_str(s).map_err(|e| GroupError::InvalidDescriptor(e.to_string()))
    }
}
