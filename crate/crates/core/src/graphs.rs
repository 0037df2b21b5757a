//! Stable labeled graphs and the graph-sum formula for twisted and
//! `[ℂʳ/G]` correlators.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{EqScalar, Exponent, Monomial, Poly, Rational, Series, Series2, UVars};
use crate::chen_ruan::{Basis, Target};
use crate::error::GraphError;
use crate::psi::psi_integral;
use crate::rmatrix::RMatrix;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Twisted theory: `ν`, no `e₁` factors, insertions in φ coordinates.
    #[default]
    Twisted,
    /// `[ℂʳ/G]`: `ν̄ = ν/e₁`, leaves carry `1/√e₁`, insertions in φ̄ coordinates.
    X,
}

/// Sign of the dilaton-leaf weight.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DilatonSign {
    /// `−[z^{k−1}] Σ_β R̃(−z)^β_α √ν_β`, from the shift `q₁ = u₁ − 1`.
    #[default]
    Negative,
    /// The same expression without the minus sign.
    AsDisplayed,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GraphOptions {
    pub normalization: Normalization,
    pub dilaton_sign: DilatonSign,
}

impl GraphOptions {
    pub fn x() -> Self {
        GraphOptions { normalization: Normalization::X, ..Default::default() }
    }

    pub fn twisted() -> Self {
        GraphOptions::default()
    }
}

/// Undecorated stable graph: genera, edges (loops allowed), leaf placement.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Shape {
    pub genera: Vec<u32>,
    /// `(a, b)` with `a ≤ b`, sorted.
    pub edges: Vec<(usize, usize)>,
    /// Vertex of ordered leaf `j`.
    pub ordered: Vec<usize>,
    pub unordered: Vec<u32>,
    pub dilatons: Vec<u32>,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

impl Shape {
    pub fn num_vertices(&self) -> usize {
        self.genera.len()
    }

    pub fn genus(&self) -> u32 {
        let s: i64 = self.genera.iter().map(|&g| g as i64).sum();
        (s + self.edges.len() as i64 - self.num_vertices() as i64 + 1) as u32
    }

    /// Valence without dilaton leaves.
    pub fn base_valence(&self, v: usize) -> usize {
        let e: usize = self.edges.iter().map(|&(a, b)| (a == v) as usize + (b == v) as usize).sum();
        e + self.ordered.iter().filter(|&&x| x == v).count() + self.unordered[v] as usize
    }

    pub fn valence(&self, v: usize) -> usize {
        self.base_valence(v) + self.dilatons[v] as usize
    }

    /// `3g(v) − 3 + val(v)`.
    pub fn dimension(&self, v: usize) -> i64 {
        3 * self.genera[v] as i64 - 3 + self.valence(v) as i64
    }

    pub fn is_stable(&self) -> bool {
        (0..self.num_vertices()).all(|v| 2 * self.genera[v] as i64 - 2 + self.valence(v) as i64 > 0)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.num_vertices();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Shape {
        let n = self.num_vertices();
        let mut genera = vec![0; n];
        let mut unordered = vec![0; n];
        let mut dilatons = vec![0; n];
        for v in 0..n {
            genera[perm[v]] = self.genera[v];
            unordered[perm[v]] = self.unordered[v];
            dilatons[perm[v]] = self.dilatons[v];
        }
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (perm[a], perm[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        edges.sort_unstable();
        Shape { genera, edges, ordered: self.ordered.iter().map(|&v| perm[v]).collect(), unordered, dilatons }
    }

    pub fn canonical(&self) -> Shape {
        permutations(self.num_vertices()).iter().map(|p| self.permuted(p)).min().expect("at least one vertex")
    }

    /// Vertex permutations mapping the shape to itself.
    pub fn vertex_automorphisms(&self) -> Vec<Vec<usize>> {
        permutations(self.num_vertices()).into_iter().filter(|p| self.permuted(p) == *self).collect()
    }

    /// `|Aut|` acting on half-edges: vertex symmetries, parallel edges, loop
    /// flips and permutations of unordered and dilaton leaves.
    pub fn aut_order(&self) -> u64 {
        let mut mult: HashMap<(usize, usize), u64> = HashMap::new();
        for &e in &self.edges {
            *mult.entry(e).or_default() += 1;
        }
        let mut f = self.vertex_automorphisms().len() as u64;
        for (&(a, b), &m) in &mult {
            f *= factorial(m);
            if a == b {
                f *= 1 << m;
            }
        }
        for v in 0..self.num_vertices() {
            f *= factorial(self.unordered[v] as u64) * factorial(self.dilatons[v] as u64);
        }
        f
    }

    fn half_edges(&self) -> Vec<Half> {
        let mut out = Vec::new();
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            out.push(Half { vertex: a, kind: HalfKind::Edge(e, 0) });
            out.push(Half { vertex: b, kind: HalfKind::Edge(e, 1) });
        }
        for (j, &v) in self.ordered.iter().enumerate() {
            out.push(Half { vertex: v, kind: HalfKind::Ordered(j) });
        }
        for v in 0..self.num_vertices() {
            for _ in 0..self.unordered[v] {
                out.push(Half { vertex: v, kind: HalfKind::Unordered });
            }
        }
        for v in 0..self.num_vertices() {
            for _ in 0..self.dilatons[v] {
                out.push(Half { vertex: v, kind: HalfKind::Dilaton });
            }
        }
        out
    }

    /// All automorphisms as `(vertex map, half-edge map)` pairs.
    fn automorphisms(&self, halves: &[Half]) -> Vec<(Vec<usize>, Vec<usize>)> {
        let mut out = Vec::new();
        for pi in self.vertex_automorphisms() {
            // Each block lists alternative partial maps; the group is their product.
            let mut blocks: Vec<Vec<Vec<(usize, usize)>>> = Vec::new();
            let mut groups: Vec<((usize, usize), Vec<usize>)> = Vec::new();
            for (e, &key) in self.edges.iter().enumerate() {
                match groups.iter_mut().find(|(k, _)| *k == key) {
                    Some((_, list)) => list.push(e),
                    None => groups.push((key, vec![e])),
                }
            }
            for ((a, b), list) in &groups {
                let (x, y) = (pi[*a], pi[*b]);
                let image: Vec<usize> = groups.iter().find(|(k, _)| *k == (x.min(y), x.max(y))).unwrap().1.clone();
                let m = list.len();
                let mut alts = Vec::new();
                for p in permutations(m) {
                    let flips = if a == b { 1usize << m } else { 1 };
                    for mask in 0..flips {
                        let mut map = Vec::new();
                        for (i, &e) in list.iter().enumerate() {
                            let e2 = image[p[i]];
                            let swap = if a == b { mask >> i & 1 == 1 } else { pi[*a] != x.min(y) };
                            let (s0, s1) = if swap { (1, 0) } else { (0, 1) };
                            map.push((2 * e, 2 * e2 + s0));
                            map.push((2 * e + 1, 2 * e2 + s1));
                        }
                        alts.push(map);
                    }
                }
                blocks.push(alts);
            }
            let base = 2 * self.edges.len();
            let mut ordered_block = Vec::new();
            for j in 0..self.ordered.len() {
                ordered_block.push((base + j, base + j));
            }
            blocks.push(vec![ordered_block]);
            for pred in [HalfKind::Unordered, HalfKind::Dilaton] {
                for v in 0..self.num_vertices() {
                    let src: Vec<usize> =
                        (0..halves.len()).filter(|&h| halves[h].vertex == v && halves[h].kind == pred).collect();
                    let dst: Vec<usize> =
                        (0..halves.len()).filter(|&h| halves[h].vertex == pi[v] && halves[h].kind == pred).collect();
                    let alts = permutations(src.len())
                        .into_iter()
                        .map(|p| src.iter().enumerate().map(|(i, &h)| (h, dst[p[i]])).collect())
                        .collect();
                    blocks.push(alts);
                }
            }
            let mut partial: Vec<Vec<usize>> = vec![vec![usize::MAX; halves.len()]];
            for alts in &blocks {
                let mut next = Vec::with_capacity(partial.len() * alts.len());
                for p in &partial {
                    for alt in alts {
                        let mut q = p.clone();
                        for &(h, h2) in alt {
                            q[h] = h2;
                        }
                        next.push(q);
                    }
                }
                partial = next;
            }
            for sigma in partial {
                out.push((pi.clone(), sigma));
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum HalfKind {
    Edge(usize, usize),
    Ordered(usize),
    Unordered,
    Dilaton,
}

#[derive(Clone, Copy, Debug)]
struct Half {
    vertex: usize,
    kind: HalfKind,
}

fn compositions(total: usize, parts: usize, out: &mut Vec<Vec<u32>>) {
    fn rec(left: usize, parts: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() + 1 == parts {
            cur.push(left as u32);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for x in 0..=left {
            cur.push(x as u32);
            rec(left - x, parts, cur, out);
            cur.pop();
        }
    }
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return;
    }
    rec(total, parts, &mut Vec::with_capacity(parts), out);
}

fn multisets(items: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, items: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..items {
            cur.push(i);
            rec(i, items, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, items, size, &mut Vec::new(), &mut out);
    out
}

/// Non-increasing genus vectors of length `len` with sum at most `max`.
fn genus_vectors(len: usize, max: u32) -> Vec<Vec<u32>> {
    fn rec(len: usize, cap: u32, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for x in 0..=cap.min(left) {
            cur.push(x);
            rec(len, x, left - x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(len, max, max, &mut Vec::new(), &mut out);
    out
}

/// Isomorphism classes of stable graphs of genus `g` with `n_ordered`
/// labeled leaves, `n_unordered` interchangeable leaves, and every admissible
/// number of dilaton leaves, sorted canonically.
pub fn enumerate_shapes(g: u32, n_ordered: usize, n_unordered: usize) -> Result<Vec<Shape>, GraphError> {
    let n = n_ordered + n_unordered;
    let excess = 2 * g as i64 - 2 + n as i64;
    if excess <= 0 {
        return Err(GraphError::Unstable(excess));
    }
    let mut base = BTreeSet::new();
    for nv in 1..=excess as usize {
        let pairs: Vec<(usize, usize)> = (0..nv).flat_map(|a| (a..nv).map(move |b| (a, b))).collect();
        for genera in genus_vectors(nv, g) {
            let sum: u32 = genera.iter().sum();
            let ne = (g - sum) as usize + nv - 1;
            for ms in multisets(pairs.len(), ne) {
                let edges: Vec<(usize, usize)> = ms.iter().map(|&i| pairs[i]).collect();
                let skeleton = Shape {
                    genera: genera.clone(),
                    edges,
                    ordered: Vec::new(),
                    unordered: vec![0; nv],
                    dilatons: vec![0; nv],
                };
                if !skeleton.is_connected() {
                    continue;
                }
                let mut unordered_choices = Vec::new();
                compositions(n_unordered, nv, &mut unordered_choices);
                let total_ordered = nv.pow(n_ordered as u32);
                for code in 0..total_ordered {
                    let mut c = code;
                    let ordered: Vec<usize> = (0..n_ordered)
                        .map(|_| {
                            let v = c % nv;
                            c /= nv;
                            v
                        })
                        .collect();
                    for un in &unordered_choices {
                        let s = Shape { ordered: ordered.clone(), unordered: un.clone(), ..skeleton.clone() };
                        if s.is_stable() {
                            base.insert(s.canonical());
                        }
                    }
                }
            }
        }
    }
    let mut all = BTreeSet::new();
    for s in base {
        let caps: Vec<u32> = (0..s.num_vertices()).map(|v| s.dimension(v).max(0) as u32).collect();
        let mut counts = vec![0u32; s.num_vertices()];
        'odometer: loop {
            all.insert(Shape { dilatons: counts.clone(), ..s.clone() }.canonical());
            for i in 0..counts.len() {
                if counts[i] < caps[i] {
                    counts[i] += 1;
                    continue 'odometer;
                }
                counts[i] = 0;
            }
            break;
        }
    }
    Ok(all.into_iter().collect())
}

/// One insertion `τ_a(x)` with `x` a basis element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Insertion {
    pub basis: Basis,
    pub label: usize,
    pub a: u32,
}

/// Descendant input `u^β(z) = Σ c_{a,β} z^a`, coefficients polynomial in
/// the `u`-variables (constants for a concrete insertion).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafInput {
    pub terms: Vec<(u32, usize, Poly)>,
    rational: bool,
}

impl LeafInput {
    pub fn new(terms: Vec<(u32, usize, Poly)>) -> Self {
        LeafInput { terms, rational: false }
    }

    /// Coordinates of an insertion: φ̄ for [`Normalization::X`], φ for the
    /// twisted theory (where barred and unbarred bases are identified).
    pub fn from_insertion(target: &Target, norm: Normalization, ins: &Insertion) -> Result<Self, GraphError> {
        let bound = match ins.basis {
            Basis::Class | Basis::Classbar => target.num_classes(),
            Basis::Phi | Basis::Phibar => target.num_irreps(),
        };
        if ins.label >= bound {
            return Err(GraphError::InvalidInsertion(format!("label {} out of range 0..{}", ins.label, bound)));
        }
        let (basis, coords_basis) = match (norm, ins.basis) {
            (Normalization::X, b) => (b, Basis::Phibar),
            (Normalization::Twisted, Basis::Classbar) => (Basis::Class, Basis::Phi),
            (Normalization::Twisted, Basis::Phibar) => (Basis::Phi, Basis::Phi),
            (Normalization::Twisted, b) => (b, Basis::Phi),
        };
        let class = target.to_class_coords(basis, ins.label);
        let rational = class.iter().all(|c| c.has_rational_coeffs());
        let coords = target.from_class_coords(coords_basis, &class);
        let terms = coords
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(b, c)| (ins.a, b, Poly::constant(c)))
            .collect();
        Ok(LeafInput { terms, rational })
    }

    /// `u(z) = Σ_{a ≤ A, β} u^β_a z^a φ_β` in free variables.
    pub fn generic(target: &Target, vars: &UVars) -> Self {
        let mut terms = Vec::new();
        for a in 0..=vars.max_height {
            for b in 0..vars.irreps {
                terms.push((a, b, Poly::var(target.nvars(), vars.index(b, a))));
            }
        }
        LeafInput { terms, rational: true }
    }

    pub fn min_height(&self) -> Option<u32> {
        self.terms.iter().filter(|t| !t.2.is_zero()).map(|t| t.0).min()
    }
}

/// Weights of the graph sum for one target and truncated R-matrix.
pub struct GraphSum<'a> {
    target: &'a Target,
    r: &'a RMatrix,
    opts: GraphOptions,
    sqrt_nu: Vec<Rational>,
    /// `R̃(−z)^β_α`.
    rneg: Vec<Vec<Series>>,
    edges: Vec<Vec<Series2>>,
    inv_sqrt_e1: EqScalar,
}

fn rpow(q: &Rational, e: i64) -> Rational {
    Pow::pow(q, e as i32)
}

impl<'a> GraphSum<'a> {
    pub fn new(target: &'a Target, r: &'a RMatrix, opts: GraphOptions) -> Result<Self, GraphError> {
        let n = target.num_irreps();
        let m = target.nvars();
        let rneg: Vec<Vec<Series>> =
            (0..n).map(|b| (0..n).map(|a| r.ortho(b, a).negate_variable()).collect()).collect();
        let mut edges = vec![Vec::with_capacity(n); n];
        for (a, row) in edges.iter_mut().enumerate() {
            for b in 0..n {
                let mut num = Series2::zero(m, r.order());
                if a == b {
                    num.set_coeff(0, 0, EqScalar::one(m));
                }
                for c in 0..n {
                    num = num.add(&Series2::outer(&rneg[c][a], &rneg[c][b]).neg());
                }
                row.push(num.divide_by_z_plus_w()?);
            }
        }
        let inv_sqrt_e1 = target.e1().monomial_pow(Exponent::new(-1, 2))?;
        Ok(GraphSum {
            target,
            r,
            opts,
            sqrt_nu: (0..n).map(|a| target.table().sqrt_nu(a)).collect(),
            rneg,
            edges,
            inv_sqrt_e1,
        })
    }

    pub fn target(&self) -> &Target {
        self.target
    }

    pub fn options(&self) -> GraphOptions {
        self.opts
    }

    fn x_mode(&self) -> bool {
        self.opts.normalization == Normalization::X
    }

    fn check_height(&self, h: usize) -> Result<(), GraphError> {
        if h > self.r.order() {
            return Err(GraphError::BeyondTruncation { height: h, order: self.r.order() });
        }
        Ok(())
    }

    /// `[z^k] Σ_β R̃(−z)^β_α √ν_β u^β(z)`, times `1/√e₁` in 𝒳 mode.
    pub fn leaf_weight(&self, input: &LeafInput, alpha: usize, k: u32) -> Result<Poly, GraphError> {
        let m = self.target.nvars();
        let mut out = Poly::zero(m);
        for (a, b, c) in &input.terms {
            if *a > k || c.is_zero() {
                continue;
            }
            let d = (k - a) as usize;
            self.check_height(d)?;
            let s = self.rneg[*b][alpha].coeff_ref(d);
            if s.is_zero() {
                continue;
            }
            out.add_assign(&c.scale(&s.scale_rational(&self.sqrt_nu[*b])));
        }
        if self.x_mode() {
            out = out.scale(&self.inv_sqrt_e1);
        }
        Ok(out)
    }

    /// `∓[z^{k−1}] Σ_β R̃(−z)^β_α √ν_β`, times `1/√e₁` in 𝒳 mode.
    pub fn dilaton_weight(&self, alpha: usize, k: u32) -> Result<EqScalar, GraphError> {
        if k < 2 {
            return Err(GraphError::HeightBelowTwo(k));
        }
        let d = (k - 1) as usize;
        self.check_height(d)?;
        let mut out = EqScalar::zero(self.target.nvars());
        for b in 0..self.target.num_irreps() {
            out.add_assign(&self.rneg[b][alpha].coeff_ref(d).scale_rational(&self.sqrt_nu[b]));
        }
        if self.opts.dilaton_sign == DilatonSign::Negative {
            out = out.neg();
        }
        if self.x_mode() {
            out = out.mul(&self.inv_sqrt_e1);
        }
        Ok(out)
    }

    /// `[z^k w^l] (δ_{αβ} − Σ_γ R̃^γ_α(−z) R̃^γ_β(−w))/(z + w)`.
    pub fn edge_weight(&self, alpha: usize, beta: usize, k: u32, l: u32) -> Result<EqScalar, GraphError> {
        let (k, l) = (k as usize, l as usize);
        if k + l >= self.r.order() {
            return Err(GraphError::BeyondTruncation { height: k + l, order: self.r.order() });
        }
        Ok(self.edges[alpha][beta].coeff(k, l).clone())
    }

    /// `√ν_α^{2−2g−val}` (or `√ν̄_α`) times the ψ-integral.
    pub fn vertex_weight(&self, g: u32, alpha: usize, heights: &[u32]) -> Result<EqScalar, GraphError> {
        let psi = psi_integral(g, heights)?;
        Ok(self.vertex_factor(g, alpha, heights.len()).scale_rational(&psi))
    }

    fn vertex_factor(&self, g: u32, alpha: usize, val: usize) -> EqScalar {
        let e = 2 - 2 * g as i64 - val as i64;
        let m = self.target.nvars();
        let s = EqScalar::rational(m, rpow(&self.sqrt_nu[alpha], e));
        if self.x_mode() {
            s.mul(&self.target.e1().monomial_pow(Exponent::new(-e, 2)).expect("e1 is a monomial"))
        } else {
            s
        }
    }

    /// `Σ_Γ w(Γ)/|Aut Γ|` over graphs of genus `g` with one ordered leaf per
    /// entry of `ordered` and `count` unordered leaves carrying `input`.
    pub fn sum(
        &self,
        g: u32,
        ordered: &[LeafInput],
        unordered: Option<(&LeafInput, usize)>,
    ) -> Result<Poly, GraphError> {
        let m = self.target.nvars();
        let n_u = unordered.map_or(0, |u| u.1);
        let shapes = enumerate_shapes(g, ordered.len(), n_u)?;
        let mut mins = Vec::with_capacity(ordered.len());
        for inp in ordered {
            match inp.min_height() {
                Some(h) => mins.push(h),
                None => return Ok(Poly::zero(m)),
            }
        }
        let umin = match unordered {
            Some((inp, c)) if c > 0 => match inp.min_height() {
                Some(h) => h,
                None => return Ok(Poly::zero(m)),
            },
            _ => 0,
        };
        let partial: Vec<HashMap<LeafKey, EqScalar>> =
            shapes.par_iter().map(|s| self.shape_sum(s, &mins, umin)).collect::<Result<_, _>>()?;
        let mut merged: HashMap<LeafKey, EqScalar> = HashMap::new();
        for map in partial {
            for (k, v) in map {
                merged.entry(k).or_insert_with(|| EqScalar::zero(m)).add_assign(&v);
            }
        }
        let mut keys: Vec<LeafKey> = merged.keys().cloned().collect();
        keys.sort();
        let mut cache: HashMap<(Option<usize>, usize, u32), Poly> = HashMap::new();
        let mut leaf = |slot: Option<usize>, a: usize, k: u32| -> Result<Poly, GraphError> {
            if let Some(p) = cache.get(&(slot, a, k)) {
                return Ok(p.clone());
            }
            let inp = match slot {
                Some(j) => &ordered[j],
                None => unordered.expect("unordered leaf without input").0,
            };
            let p = self.leaf_weight(inp, a, k)?;
            cache.insert((slot, a, k), p.clone());
            Ok(p)
        };
        let mut out = Poly::zero(m);
        for key in keys {
            let c = &merged[&key];
            if c.is_zero() {
                continue;
            }
            let mut p = Poly::constant(c.clone());
            for (j, &(a, k)) in key.0.iter().enumerate() {
                p = p.mul(&leaf(Some(j), a, k)?);
            }
            for &(a, k) in &key.1 {
                p = p.mul(&leaf(None, a, k)?);
            }
            out.add_assign(&p);
        }
        Ok(out)
    }

    /// Decoration sum of one shape, keyed by leaf decorations and divided by `|Aut|`.
    fn shape_sum(&self, shape: &Shape, mins: &[u32], umin: u32) -> Result<HashMap<LeafKey, EqScalar>, GraphError> {
        let m = self.target.nvars();
        let halves = shape.half_edges();
        let nv = shape.num_vertices();
        let at: Vec<Vec<usize>> =
            (0..nv).map(|v| (0..halves.len()).filter(|&h| halves[h].vertex == v).collect()).collect();
        // Height assignments per vertex with their ψ-integrals.
        let mut options: Vec<Vec<(Vec<u32>, Rational)>> = Vec::with_capacity(nv);
        for v in 0..nv {
            let lows: Vec<u32> = at[v]
                .iter()
                .map(|&h| match halves[h].kind {
                    HalfKind::Dilaton => 2,
                    HalfKind::Ordered(j) => mins[j],
                    HalfKind::Unordered => umin,
                    HalfKind::Edge(..) => 0,
                })
                .collect();
            let low: i64 = lows.iter().map(|&x| x as i64).sum();
            let free = shape.dimension(v) - low;
            let mut opts = Vec::new();
            if free >= 0 {
                let mut comps = Vec::new();
                compositions(free as usize, lows.len(), &mut comps);
                for c in comps {
                    let hs: Vec<u32> = c.iter().zip(&lows).map(|(x, l)| x + l).collect();
                    let psi = psi_integral(shape.genera[v], &hs)?;
                    if !psi.is_zero() {
                        opts.push((hs, psi));
                    }
                }
            }
            if opts.is_empty() {
                return Ok(HashMap::new());
            }
            options.push(opts);
        }
        let n_irreps = self.target.num_irreps();
        let vfac: Vec<Vec<EqScalar>> = (0..nv)
            .map(|v| (0..n_irreps).map(|a| self.vertex_factor(shape.genera[v], a, shape.valence(v))).collect())
            .collect();
        let mut st = DfsState { marks: vec![0; nv], heights: vec![0; halves.len()], out: HashMap::new() };
        let ctx = DfsCtx { shape, halves: &halves, at: &at, options: &options, vfac: &vfac };
        self.dfs(&ctx, 0, EqScalar::one(m), &mut st)?;
        let inv = Rational::new(BigInt::one(), BigInt::from(shape.aut_order()));
        Ok(st.out.into_iter().map(|(k, v)| (k, v.scale_rational(&inv))).collect())
    }

    fn dfs(&self, ctx: &DfsCtx, v: usize, acc: EqScalar, st: &mut DfsState) -> Result<(), GraphError> {
        if v == ctx.shape.num_vertices() {
            let mut ord = vec![(0usize, 0u32); ctx.shape.ordered.len()];
            let mut un = Vec::new();
            for (h, half) in ctx.halves.iter().enumerate() {
                match half.kind {
                    HalfKind::Ordered(j) => ord[j] = (st.marks[half.vertex], st.heights[h]),
                    HalfKind::Unordered => un.push((st.marks[half.vertex], st.heights[h])),
                    _ => {}
                }
            }
            un.sort_unstable();
            let m = acc.nvars();
            st.out.entry(LeafKey(ord, un)).or_insert_with(|| EqScalar::zero(m)).add_assign(&acc);
            return Ok(());
        }
        for alpha in 0..self.target.num_irreps() {
            st.marks[v] = alpha;
            for (hs, psi) in &ctx.options[v] {
                for (i, &h) in ctx.at[v].iter().enumerate() {
                    st.heights[h] = hs[i];
                }
                let mut w = acc.mul(&ctx.vfac[v][alpha]).scale_rational(psi);
                for &h in &ctx.at[v] {
                    if w.is_zero() {
                        break;
                    }
                    match ctx.halves[h].kind {
                        HalfKind::Dilaton => w = w.mul(&self.dilaton_weight(alpha, st.heights[h])?),
                        HalfKind::Edge(e, 1) => {
                            let (a, _) = ctx.shape.edges[e];
                            let w_e = self.edge_weight(st.marks[a], alpha, st.heights[2 * e], st.heights[h])?;
                            w = w.mul(&w_e);
                        }
                        _ => {}
                    }
                }
                if !w.is_zero() {
                    self.dfs(ctx, v + 1, w, st)?;
                }
            }
        }
        Ok(())
    }

    /// Weight of one decorated graph (without the `1/|Aut|`).
    pub fn graph_weight(
        &self,
        graph: &StableLabeledGraph,
        ordered: &[LeafInput],
        unordered: Option<&LeafInput>,
    ) -> Result<Poly, GraphError> {
        let m = self.target.nvars();
        let mut heights: Vec<Vec<u32>> = vec![Vec::new(); graph.vertices.len()];
        let mut w = EqScalar::one(m);
        for e in &graph.edges {
            heights[e.v1].push(e.k1);
            heights[e.v2].push(e.k2);
            w = w.mul(&self.edge_weight(graph.vertices[e.v1].marking, graph.vertices[e.v2].marking, e.k1, e.k2)?);
        }
        for d in &graph.dilaton_leaves {
            heights[d.vertex].push(d.height);
            w = w.mul(&self.dilaton_weight(graph.vertices[d.vertex].marking, d.height)?);
        }
        let mut p = Poly::zero(m);
        for l in &graph.ordered_leaves {
            heights[l.vertex].push(l.height);
        }
        for l in &graph.unordered_leaves {
            heights[l.vertex].push(l.height);
        }
        for (v, vert) in graph.vertices.iter().enumerate() {
            w = w.mul(&self.vertex_weight(vert.genus, vert.marking, &heights[v])?);
        }
        p.add_term(Monomial::one(), w);
        for l in &graph.ordered_leaves {
            p = p.mul(&self.leaf_weight(&ordered[l.slot], graph.vertices[l.vertex].marking, l.height)?);
        }
        for l in &graph.unordered_leaves {
            let inp = unordered.ok_or_else(|| GraphError::InvalidInsertion("missing unordered input".into()))?;
            p = p.mul(&self.leaf_weight(inp, graph.vertices[l.vertex].marking, l.height)?);
        }
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct LeafKey(Vec<(usize, u32)>, Vec<(usize, u32)>);

struct DfsCtx<'s> {
    shape: &'s Shape,
    halves: &'s [Half],
    at: &'s [Vec<usize>],
    options: &'s [Vec<(Vec<u32>, Rational)>],
    vfac: &'s [Vec<EqScalar>],
}

struct DfsState {
    marks: Vec<usize>,
    heights: Vec<u32>,
    out: HashMap<LeafKey, EqScalar>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphVertex {
    pub genus: u32,
    pub marking: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GraphEdge {
    pub v1: usize,
    pub v2: usize,
    pub k1: u32,
    pub k2: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrderedLeaf {
    pub vertex: usize,
    pub height: u32,
    pub slot: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Leaf {
    pub vertex: usize,
    pub height: u32,
}

/// Decorated stable graph `(Γ, g, α, k)` with its automorphism count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StableLabeledGraph {
    pub vertices: Vec<GraphVertex>,
    pub edges: Vec<GraphEdge>,
    pub ordered_leaves: Vec<OrderedLeaf>,
    pub unordered_leaves: Vec<Leaf>,
    pub dilaton_leaves: Vec<Leaf>,
    pub aut_order: u64,
}

impl StableLabeledGraph {
    pub fn genus(&self) -> u32 {
        let s: i64 = self.vertices.iter().map(|v| v.genus as i64).sum();
        (s + self.edges.len() as i64 - self.vertices.len() as i64 + 1) as u32
    }

    fn heights_at(&self, v: usize) -> Vec<u32> {
        let mut h = Vec::new();
        for e in &self.edges {
            if e.v1 == v {
                h.push(e.k1);
            }
            if e.v2 == v {
                h.push(e.k2);
            }
        }
        h.extend(self.ordered_leaves.iter().filter(|l| l.vertex == v).map(|l| l.height));
        h.extend(self.unordered_leaves.iter().filter(|l| l.vertex == v).map(|l| l.height));
        h.extend(self.dilaton_leaves.iter().filter(|l| l.vertex == v).map(|l| l.height));
        h
    }

    /// Stability, connectedness and the per-vertex dimension constraint.
    pub fn is_valid(&self) -> bool {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for e in &self.edges {
                for (x, y) in [(e.v1, e.v2), (e.v2, e.v1)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.iter().all(|&s| s)
            && self.dilaton_leaves.iter().all(|d| d.height >= 2)
            && (0..n).all(|v| {
                let h = self.heights_at(v);
                let g = self.vertices[v].genus as i64;
                2 * g - 2 + h.len() as i64 > 0 && h.iter().map(|&x| x as i64).sum::<i64>() == 3 * g - 3 + h.len() as i64
            })
    }
}

/// Decorated graphs of genus `g`, one per isomorphism class; `markings[j]`
/// optionally fixes the marking at ordered leaf `j`.
pub fn enumerate_graphs(
    g: u32,
    n_ordered: usize,
    n_unordered: usize,
    n_irreps: usize,
    markings: Option<&[Option<usize>]>,
) -> Result<Vec<StableLabeledGraph>, GraphError> {
    let mut out = Vec::new();
    for shape in enumerate_shapes(g, n_ordered, n_unordered)? {
        let halves = shape.half_edges();
        let nv = shape.num_vertices();
        let auts = shape.automorphisms(&halves);
        let at: Vec<Vec<usize>> =
            (0..nv).map(|v| (0..halves.len()).filter(|&h| halves[h].vertex == v).collect()).collect();
        let mut per_vertex: Vec<Vec<Vec<u32>>> = Vec::new();
        for v in 0..nv {
            let lows: Vec<u32> =
                at[v].iter().map(|&h| if halves[h].kind == HalfKind::Dilaton { 2 } else { 0 }).collect();
            let free = shape.dimension(v) - lows.iter().map(|&x| x as i64).sum::<i64>();
            let mut comps = Vec::new();
            if free >= 0 {
                compositions(free as usize, lows.len(), &mut comps);
            }
            per_vertex.push(comps.into_iter().map(|c| c.iter().zip(&lows).map(|(x, l)| x + l).collect()).collect());
        }
        if per_vertex.iter().any(|p| p.is_empty()) {
            continue;
        }
        let total_marks = n_irreps.pow(nv as u32);
        for code in 0..total_marks {
            let mut c = code;
            let marks: Vec<usize> = (0..nv)
                .map(|_| {
                    let a = c % n_irreps;
                    c /= n_irreps;
                    a
                })
                .collect();
            if let Some(fixed) = markings {
                let ok = shape
                    .ordered
                    .iter()
                    .enumerate()
                    .all(|(j, &v)| fixed.get(j).copied().flatten().is_none_or(|a| marks[v] == a));
                if !ok {
                    continue;
                }
            }
            let mut idx = vec![0usize; nv];
            'heights: loop {
                let mut heights = vec![0u32; halves.len()];
                for v in 0..nv {
                    for (i, &h) in at[v].iter().enumerate() {
                        heights[h] = per_vertex[v][idx[v]][i];
                    }
                }
                let mut is_min = true;
                let mut stab = 0u64;
                for (pi, sigma) in &auts {
                    let mut m2 = vec![0; nv];
                    for v in 0..nv {
                        m2[pi[v]] = marks[v];
                    }
                    let mut h2 = vec![0; halves.len()];
                    for h in 0..halves.len() {
                        h2[sigma[h]] = heights[h];
                    }
                    match (m2.as_slice(), h2.as_slice()).cmp(&(marks.as_slice(), heights.as_slice())) {
                        std::cmp::Ordering::Less => {
                            is_min = false;
                            break;
                        }
                        std::cmp::Ordering::Equal => stab += 1,
                        std::cmp::Ordering::Greater => {}
                    }
                }
                if is_min {
                    out.push(decorated(&shape, &halves, &marks, &heights, stab));
                }
                for v in 0..nv {
                    if idx[v] + 1 < per_vertex[v].len() {
                        idx[v] += 1;
                        continue 'heights;
                    }
                    idx[v] = 0;
                }
                break;
            }
        }
    }
    Ok(out)
}

fn decorated(shape: &Shape, halves: &[Half], marks: &[usize], heights: &[u32], aut: u64) -> StableLabeledGraph {
    let mut edges: Vec<GraphEdge> = shape
        .edges
        .iter()
        .enumerate()
        .map(|(e, &(a, b))| {
            let (x, y) = ((a, heights[2 * e]), (b, heights[2 * e + 1]));
            let (p, q) = if x <= y { (x, y) } else { (y, x) };
            GraphEdge { v1: p.0, v2: q.0, k1: p.1, k2: q.1 }
        })
        .collect();
    edges.sort();
    let mut ordered = Vec::new();
    let mut unordered = Vec::new();
    let mut dilatons = Vec::new();
    for (h, half) in halves.iter().enumerate() {
        match half.kind {
            HalfKind::Ordered(j) => ordered.push(OrderedLeaf { vertex: half.vertex, height: heights[h], slot: j }),
            HalfKind::Unordered => unordered.push(Leaf { vertex: half.vertex, height: heights[h] }),
            HalfKind::Dilaton => dilatons.push(Leaf { vertex: half.vertex, height: heights[h] }),
            HalfKind::Edge(..) => {}
        }
    }
    ordered.sort_by_key(|l| l.slot);
    unordered.sort();
    dilatons.sort();
    StableLabeledGraph {
        vertices: shape.genera.iter().zip(marks).map(|(&genus, &marking)| GraphVertex { genus, marking }).collect(),
        edges,
        ordered_leaves: ordered,
        unordered_leaves: unordered,
        dilaton_leaves: dilatons,
        aut_order: aut,
    }
}

fn factorial_rational(n: usize) -> Rational {
    Rational::from_integer((1..=n as u64).product::<u64>().into())
}

/// `⟨τ_{a₁}(x₁)…τ_{a_n}(x_n) τ_{a}(x)^{n′}⟩_g` in the chosen normalization.
pub fn correlator(
    sum: &GraphSum,
    g: u32,
    ordered: &[Insertion],
    unordered: Option<(Insertion, usize)>,
) -> Result<EqScalar, GraphError> {
    let target = sum.target();
    let norm = sum.options().normalization;
    let ins: Vec<LeafInput> =
        ordered.iter().map(|x| LeafInput::from_insertion(target, norm, x)).collect::<Result<_, _>>()?;
    let un = match unordered {
        Some((x, c)) => Some((LeafInput::from_insertion(target, norm, &x)?, c)),
        None => None,
    };
    let p = sum.sum(g, &ins, un.as_ref().map(|(i, c)| (i, *c)))?;
    let count = un.as_ref().map_or(0, |u| u.1);
    let value = p.coeff(&Monomial::one()).scale_rational(&factorial_rational(count));
    let rational = ins.iter().all(|i| i.rational) && un.as_ref().is_none_or(|u| u.0.rational);
    if rational && !value.has_rational_coeffs() {
        return Err(GraphError::NonRationalCoefficient);
    }
    Ok(value)
}

/// Correlator of `[ℂʳ/G]` with insertions in any of the four bases.
pub fn correlator_x(
    target: &Target,
    r: &RMatrix,
    g: u32,
    ordered: &[Insertion],
    unordered: Option<(Insertion, usize)>,
) -> Result<EqScalar, GraphError> {
    let s = GraphSum::new(target, r, GraphOptions::x())?;
    correlator(&s, g, ordered, unordered)
}

/// Twisted correlator; barred and unbarred bases are identified.
pub fn correlator_tw(
    target: &Target,
    r: &RMatrix,
    g: u32,
    ordered: &[Insertion],
    unordered: Option<(Insertion, usize)>,
) -> Result<EqScalar, GraphError> {
    let s = GraphSum::new(target, r, GraphOptions::twisted())?;
    correlator(&s, g, ordered, unordered)
}

/// Degree-`n` part of `ℱ_g` in the variables `u^β_a`, `a ≤ vars.max_height`.
pub fn potential_part(sum: &GraphSum, g: u32, n: usize, vars: &UVars) -> Result<Poly, GraphError> {
    let input = LeafInput::generic(sum.target(), vars);
    sum.sum(g, &[], Some((&input, n)))
}
