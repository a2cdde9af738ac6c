use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use parking_lot::RwLock;

use super::delta::dim_of;
use super::{parse_usize, Arrow, CatError, Category, HomCache, Mor, Obj};

/// Which lattice operation the connections γ_i use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConnKind {
    Max,
    Min,
}

/// Epimorphisms out of □_m with predecessor links: entry k was obtained as
/// `gen ∘ epis[parent]`.
struct EpiTable {
    epis: Vec<Mor>,
    links: Vec<Option<(usize, Mor)>>,
    index: HashMap<Mor, usize>,
}

/// The cube category □, or □ᶜ with connections.  Morphisms are function
/// tables on {0,1}^m, coordinate i (1-based) stored in bit i−1.
pub struct Cube {
    trunc: usize,
    conn: Option<ConnKind>,
    cache: HomCache,
    epis: RwLock<HashMap<usize, Arc<EpiTable>>>,
}

fn low_mask(k: usize) -> u32 {
    (1u32 << k) - 1
}

impl Cube {
    pub fn new(trunc: usize, conn: Option<ConnKind>) -> Cube {
        Cube { trunc, conn, cache: HomCache::default(), epis: RwLock::new(HashMap::new()) }
    }

    pub fn connections(&self) -> Option<ConnKind> {
        self.conn
    }

    fn table(m: usize, f: impl Fn(u32) -> u32) -> Vec<u32> {
        (0..(1u32 << m)).map(f).collect()
    }

    /// δ_{i,ε}: □_{n−1} → □_n, inserting ε at coordinate i.
    pub fn face(n: usize, i: usize, eps: u32) -> Mor {
        let t = Cube::table(n - 1, |x| (x & low_mask(i - 1)) | (eps << (i - 1)) | ((x >> (i - 1)) << i));
        Mor::new(Obj::Dim(n - 1), Obj::Dim(n), Arrow::Map(t))
    }

    /// σ_i: □_{n+1} → □_n, deleting coordinate i.
    pub fn degeneracy(n: usize, i: usize) -> Mor {
        let t = Cube::table(n + 1, |x| (x & low_mask(i - 1)) | ((x >> i) << (i - 1)));
        Mor::new(Obj::Dim(n + 1), Obj::Dim(n), Arrow::Map(t))
    }

    /// γ_i: □_{n+1} → □_n, merging coordinates i and i+1.
    pub fn connection(n: usize, i: usize, kind: ConnKind) -> Mor {
        let t = Cube::table(n + 1, |x| {
            let a = (x >> (i - 1)) & 1;
            let b = (x >> i) & 1;
            let c = match kind {
                ConnKind::Max => a | b,
                ConnKind::Min => a & b,
            };
            (x & low_mask(i - 1)) | (c << (i - 1)) | ((x >> (i + 1)) << i)
        });
        Mor::new(Obj::Dim(n + 1), Obj::Dim(n), Arrow::Map(t))
    }

    fn compose_tables(g: &Mor, f: &Mor) -> Mor {
        let gv = g.map();
        let v = f.map().iter().map(|&x| gv[x as usize]).collect();
        Mor::new(f.src.clone(), g.tgt.clone(), Arrow::Map(v))
    }

    fn identity_of(n: usize) -> Mor {
        Mor::new(Obj::Dim(n), Obj::Dim(n), Arrow::Map(Cube::table(n, |x| x)))
    }

    /// Dimension-lowering generators out of □_k.
    fn down_generators(&self, k: usize) -> Vec<Mor> {
        let mut out = Vec::new();
        if k >= 1 {
            out.extend((1..=k).map(|i| Cube::degeneracy(k - 1, i)));
        }
        if let Some(kind) = self.conn {
            if k >= 2 {
                out.extend((1..k).map(|i| Cube::connection(k - 1, i, kind)));
            }
        }
        out
    }

    fn epi_table(&self, m: usize) -> Arc<EpiTable> {
        if let Some(t) = self.epis.read().get(&m) {
            return t.clone();
        }
        let mut epis = vec![Cube::identity_of(m)];
        let mut links = vec![None];
        let mut index = HashMap::new();
        index.insert(epis[0].clone(), 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(k) = queue.pop_front() {
            let e = epis[k].clone();
            for g in self.down_generators(dim_of(&e.tgt)) {
                let h = Cube::compose_tables(&g, &e);
                if !index.contains_key(&h) {
                    index.insert(h.clone(), epis.len());
                    epis.push(h);
                    links.push(Some((k, g)));
                    queue.push_back(epis.len() - 1);
                }
            }
        }
        let t = Arc::new(EpiTable { epis, links, index });
        self.epis.write().entry(m).or_insert(t).clone()
    }

    /// All face composites □_j → □_n: choose n−j coordinates to hold constants.
    fn face_embeddings(j: usize, n: usize) -> Vec<Mor> {
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != n - j {
                continue;
            }
            let fixed: Vec<usize> = (0..n).filter(|&b| mask >> b & 1 == 1).collect();
            for vals in 0u32..(1 << (n - j)) {
                let mut word_src = Cube::identity_of(j);
                let mut dim = j;
                for (t, &b) in fixed.iter().enumerate() {
                    dim += 1;
                    let fm = Cube::face(dim, b + 1, vals >> t & 1);
                    word_src = Cube::compose_tables(&fm, &word_src);
                }
                out.push(word_src);
            }
        }
        out
    }

    /// Hom-set by breadth-first closure under all generators with
    /// intermediate dimensions ≤ bound; independent of `hom`.
    pub fn closure_hom(&self, m: usize, n: usize, bound: usize) -> HashSet<Mor> {
        let mut seen: HashSet<Mor> = HashSet::new();
        let start = Cube::identity_of(m);
        seen.insert(start.clone());
        let mut queue = VecDeque::from([start]);
        while let Some(e) = queue.pop_front() {
            let k = dim_of(&e.tgt);
            let mut gens = self.down_generators(k);
            if k < bound {
                for i in 1..=k + 1 {
                    gens.push(Cube::face(k + 1, i, 0));
                    gens.push(Cube::face(k + 1, i, 1));
                }
            }
            for g in gens {
                let h = Cube::compose_tables(&g, &e);
                if seen.insert(h.clone()) {
                    queue.push_back(h);
                }
            }
        }
        seen.into_iter().filter(|f| dim_of(&f.tgt) == n).collect()
    }

    fn constant_coords(f: &Mor) -> Vec<(usize, u32)> {
        let t = f.map();
        let n = dim_of(&f.tgt);
        (0..n)
            .filter_map(|b| {
                let v = t[0] >> b & 1;
                t.iter().all(|&y| y >> b & 1 == v).then_some((b, v))
            })
            .collect()
    }
}

impl Category for Cube {
    fn name(&self) -> String {
        match self.conn {
            None => "cube".into(),
            Some(ConnKind::Max) => "cube_c".into(),
            Some(ConnKind::Min) => "cube_c_min".into(),
        }
    }
    fn max_dim(&self) -> usize {
        self.trunc
    }
    fn objects_of_dim(&self, d: usize) -> Vec<Obj> {
        assert!(d <= self.trunc, "dimension {d} beyond truncation {}", self.trunc);
        vec![Obj::Dim(d)]
    }
    fn dim(&self, a: &Obj) -> usize {
        dim_of(a)
    }
    fn compute_hom(&self, a: &Obj, b: &Obj) -> Vec<Mor> {
        let (m, n) = (dim_of(a), dim_of(b));
        let table = self.epi_table(m);
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        let mut embeds: HashMap<usize, Vec<Mor>> = HashMap::new();
        for e in &table.epis {
            let j = dim_of(&e.tgt);
            if j > n {
                continue;
            }
            for fm in embeds.entry(j).or_insert_with(|| Cube::face_embeddings(j, n)).iter() {
                let h = Cube::compose_tables(fm, e);
                if seen.insert(h.clone()) {
                    out.push(h);
                }
            }
        }
        out.sort_by(|x, y| x.map().cmp(y.map()));
        out
    }
    fn cache(&self) -> &HomCache {
        &self.cache
    }
    fn identity(&self, a: &Obj) -> Mor {
        Cube::identity_of(dim_of(a))
    }
    fn compose_raw(&self, g: &Mor, f: &Mor) -> Mor {
        Cube::compose_tables(g, f)
    }
    fn generators_from(&self, a: &Obj) -> Vec<Mor> {
        let n = dim_of(a);
        let mut out = Vec::new();
        if n < self.trunc {
            for i in 1..=n + 1 {
                out.push(Cube::face(n + 1, i, 0));
                out.push(Cube::face(n + 1, i, 1));
            }
        }
        out.extend(self.down_generators(n));
        out
    }
    fn generators_into(&self, b: &Obj) -> Vec<Mor> {
        let n = dim_of(b);
        let mut out = Vec::new();
        for i in 1..=n {
            out.push(Cube::face(n, i, 0));
            out.push(Cube::face(n, i, 1));
        }
        if n < self.trunc {
            out.extend((1..=n + 1).map(|i| Cube::degeneracy(n, i)));
            if let Some(kind) = self.conn {
                out.extend((1..=n).map(|i| Cube::connection(n, i, kind)));
            }
        }
        out
    }
    fn factor(&self, f: &Mor) -> Result<Vec<Mor>, CatError> {
        let m = dim_of(&f.src);
        let n = dim_of(&f.tgt);
        let consts = Cube::constant_coords(f);
        let j = n - consts.len();
        // the epi part: drop the constant coordinates
        let keep: Vec<usize> = (0..n).filter(|b| !consts.iter().any(|c| c.0 == *b)).collect();
        let etab: Vec<u32> = f.map().iter().map(|&y| keep.iter().enumerate().fold(0, |acc, (t, &b)| acc | ((y >> b & 1) << t))).collect();
        let e = Mor::new(Obj::Dim(m), Obj::Dim(j), Arrow::Map(etab));
        let table = self.epi_table(m);
        let mut k = *table.index.get(&e).ok_or_else(|| CatError::Unsupported(format!("{} is not in the category", self.mor_name(f))))?;
        let mut word = Vec::new();
        while let Some((p, g)) = &table.links[k] {
            word.push(g.clone());
            k = *p;
        }
        word.reverse();
        let mut dim = j;
        for (b, v) in consts {
            dim += 1;
            word.push(Cube::face(dim, b + 1, v));
        }
        Ok(word)
    }
    fn mor_name(&self, f: &Mor) -> String {
        let m = dim_of(&f.src);
        let n = dim_of(&f.tgt);
        if m + 1 == n {
            for i in 1..=n {
                for e in 0..2 {
                    if *f == Cube::face(n, i, e) {
                        return format!("d{n}.{i}.{e}");
                    }
                }
            }
        }
        if m == n + 1 {
            for i in 1..=m {
                if *f == Cube::degeneracy(n, i) {
                    return format!("s{n}.{i}");
                }
            }
            if let Some(kind) = self.conn {
                for i in 1..m {
                    if *f == Cube::connection(n, i, kind) {
                        return format!("g{n}.{i}");
                    }
                }
            }
        }
        let parts: Vec<String> = f.map().iter().map(|x| x.to_string()).collect();
        format!("<{}>", parts.join(","))
    }
    fn parse_object(&self, s: &str) -> Result<Obj, CatError> {
        let n = parse_usize(s)?;
        if n > self.trunc {
            return Err(CatError::BadObject(format!("□_{n} beyond truncation {}", self.trunc)));
        }
        Ok(Obj::Dim(n))
    }
    fn is_catenary(&self) -> bool {
        true
    }
    fn mono_shortcut(&self, f: &Mor) -> Option<bool> {
        let t = f.map();
        let set: HashSet<&u32> = t.iter().collect();
        Some(set.len() == t.len())
    }
    fn codim1_closed(&self, a: &Obj) -> Option<Vec<Mor>> {
        let n = dim_of(a);
        let mut out = Vec::new();
        for i in 1..=n {
            out.push(Cube::face(n, i, 0));
            out.push(Cube::face(n, i, 1));
        }
        Some(out)
    }
    fn standard_sign(&self, f: &Mor) -> Option<i64> {
        let n = dim_of(&f.tgt);
        if dim_of(&f.src) + 1 != n {
            return None;
        }
        let (b, v) = *Cube::constant_coords(f).first()?;
        Some(if (b + 1 + v as usize) % 2 == 0 { 1 } else { -1 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapecat::{check_axioms, check_factorizations, codim1_monos};

    #[test]
    fn small_homs() {
        let c = Cube::new(3, Some(ConnKind::Max));
        assert_eq!(c.hom(&Obj::Dim(1), &Obj::Dim(1)).len(), 3);
        assert_eq!(c.hom(&Obj::Dim(0), &Obj::Dim(2)).len(), 4);
        let plain = Cube::new(3, None);
        assert_eq!(plain.hom(&Obj::Dim(2), &Obj::Dim(1)).len(), 4);
        assert_eq!(c.hom(&Obj::Dim(2), &Obj::Dim(1)).len(), 5);
    }

    #[test]
    fn closure_matches() {
        for conn in [None, Some(ConnKind::Max)] {
            let c = Cube::new(3, conn);
            for m in 0..=3 {
                for n in 0..=3 {
                    let direct: HashSet<Mor> = c.hom(&Obj::Dim(m), &Obj::Dim(n)).iter().cloned().collect();
                    let b = m.max(n);
                    assert_eq!(direct, c.closure_hom(m, n, b));
                    assert_eq!(direct, c.closure_hom(m, n, b + 1));
                }
            }
        }
    }

    #[test]
    fn axioms_words_faces() {
        let c = Cube::new(3, Some(ConnKind::Max));
        check_axioms(&c, 2).unwrap();
        check_factorizations(&c, 3).unwrap();
        let f = codim1_monos(&c, &Obj::Dim(2)).unwrap();
        assert_eq!(f.len(), 4);
        let s: Vec<i64> = f.iter().map(|x| c.standard_sign(x).unwrap()).collect();
        assert_eq!(s, vec![-1, 1, 1, -1]);
    }
}
