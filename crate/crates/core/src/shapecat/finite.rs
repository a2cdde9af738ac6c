use std::collections::HashMap;

use serde_json::Value;

use super::{Arrow, CatError, Category, HomCache, Mor, Obj};

/// A finite category given by explicit tables.  Morphism i < |objects| is
/// the identity of object i.
pub struct Finite {
    name: String,
    objects: Vec<String>,
    mors: Vec<(String, usize, usize)>,
    comp: HashMap<(usize, usize), usize>,
    cache: HomCache,
}

impl Finite {
    /// Builds and validates a presentation.  `compose` lists triples
    /// (g, f, g∘f) for all composable pairs of non-identity morphisms.
    pub fn new(name: &str, objects: Vec<String>, arrows: Vec<(String, usize, usize)>, compose: Vec<(String, String, String)>) -> Result<Finite, CatError> {
        let n = objects.len();
        let mut mors: Vec<(String, usize, usize)> = objects.iter().enumerate().map(|(i, o)| (format!("id_{o}"), i, i)).collect();
        for (nm, s, t) in arrows {
            if s >= n || t >= n {
                return Err(CatError::InvalidPresentation(format!("morphism {nm} has an unknown endpoint")));
            }
            mors.push((nm, s, t));
        }
        let mut by_name = HashMap::new();
        for (i, m) in mors.iter().enumerate() {
            if by_name.insert(m.0.clone(), i).is_some() {
                return Err(CatError::InvalidPresentation(format!("duplicate morphism name {}", m.0)));
            }
        }
        let look = |s: &str| by_name.get(s).copied().ok_or_else(|| CatError::InvalidPresentation(format!("unknown morphism {s}")));
        let mut comp = HashMap::new();
        for (g, f, h) in &compose {
            let (g, f, h) = (look(g)?, look(f)?, look(h)?);
            if mors[f].2 != mors[g].1 || mors[h].1 != mors[f].1 || mors[h].2 != mors[g].2 {
                return Err(CatError::InvalidPresentation(format!("composite {} ∘ {} = {} has wrong endpoints", mors[g].0, mors[f].0, mors[h].0)));
            }
            if let Some(old) = comp.insert((g, f), h) {
                if old != h {
                    return Err(CatError::InvalidPresentation(format!("conflicting composites for {} ∘ {}", mors[g].0, mors[f].0)));
                }
            }
        }
        for (i, m) in mors.iter().enumerate() {
            comp.insert((m.2, i), i);
            comp.insert((i, m.1), i);
        }
        for g in 0..mors.len() {
            for f in 0..mors.len() {
                if mors[f].2 == mors[g].1 && !comp.contains_key(&(g, f)) {
                    return Err(CatError::InvalidPresentation(format!("missing composite {} ∘ {}", mors[g].0, mors[f].0)));
                }
            }
        }
        for h in 0..mors.len() {
            for g in 0..mors.len() {
                if mors[g].2 != mors[h].1 {
                    continue;
                }
                for f in 0..mors.len() {
                    if mors[f].2 != mors[g].1 {
                        continue;
                    }
                    if comp[&(h, comp[&(g, f)])] != comp[&(comp[&(h, g)], f)] {
                        return Err(CatError::InvalidPresentation(format!("associativity fails at {}, {}, {}", mors[f].0, mors[g].0, mors[h].0)));
                    }
                }
            }
        }
        Ok(Finite { name: name.to_string(), objects, mors, comp, cache: HomCache::default() })
    }

    /// `{"name":…, "objects":[…], "morphisms":[{"name","src","tgt"}], "compose":[[g,f,g∘f]]}`
    pub fn from_json(v: &Value) -> Result<Finite, CatError> {
        let bad = |m: &str| CatError::InvalidPresentation(m.to_string());
        let objects: Vec<String> = v["objects"]
            .as_array()
            .ok_or_else(|| bad("missing objects"))?
            .iter()
            .map(|o| o.as_str().map(String::from).ok_or_else(|| bad("object names must be strings")))
            .collect::<Result<_, _>>()?;
        let idx = |s: &str| objects.iter().position(|o| o == s).ok_or_else(|| bad(&format!("unknown object {s}")));
        let mut arrows = Vec::new();
        for m in v["morphisms"].as_array().unwrap_or(&Vec::new()) {
            let name = m["name"].as_str().ok_or_else(|| bad("morphism without name"))?;
            let s = idx(m["src"].as_str().ok_or_else(|| bad("morphism without src"))?)?;
            let t = idx(m["tgt"].as_str().ok_or_else(|| bad("morphism without tgt"))?)?;
            arrows.push((name.to_string(), s, t));
        }
        let mut compose = Vec::new();
        for c in v["compose"].as_array().unwrap_or(&Vec::new()) {
            let parts: Vec<&str> = c.as_array().map(|a| a.iter().filter_map(|x| x.as_str()).collect()).unwrap_or_default();
            if parts.len() != 3 {
                return Err(bad("compose entries are [g, f, g∘f]"));
            }
            compose.push((parts[0].to_string(), parts[1].to_string(), parts[2].to_string()));
        }
        let name = v["name"].as_str().unwrap_or("finite");
        Finite::new(name, objects, arrows, compose)
    }

    /// The chain 0 < 1 < ⋯ < n−1.
    pub fn chain_poset(n: usize) -> Finite {
        let n = if n == 0 { 2 } else { n };
        let objects: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let mut arrows = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                arrows.push((format!("{i}<{j}"), i, j));
            }
        }
        let mut compose = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    compose.push((format!("{j}<{k}"), format!("{i}<{j}"), format!("{i}<{k}")));
                }
            }
        }
        let mut f = Finite::new("poset", objects, arrows, compose).expect("chain poset is a category");
        f.name = format!("poset{n}");
        f
    }

    /// The free category on two parallel arrows u, v: a ⇉ b.
    pub fn parallel_pair() -> Finite {
        Finite::new("parallel", vec!["a".into(), "b".into()], vec![("u".into(), 0, 1), ("v".into(), 0, 1)], vec![]).expect("parallel pair is a category")
    }

    fn id_of(a: &Obj) -> usize {
        match a {
            Obj::Node(i) => *i,
            _ => panic!("expected a finite-category object, got {a}"),
        }
    }

    fn mor_index(f: &Mor) -> usize {
        match f.arrow {
            Arrow::Fin(i) => i,
            _ => panic!("expected a finite-category morphism"),
        }
    }

    fn mk(&self, i: usize) -> Mor {
        let (_, s, t) = &self.mors[i];
        Mor::new(Obj::Node(*s), Obj::Node(*t), Arrow::Fin(i))
    }
}

impl Category for Finite {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn max_dim(&self) -> usize {
        0
    }
    fn objects_of_dim(&self, d: usize) -> Vec<Obj> {
        if d == 0 { self.all_objects() } else { Vec::new() }
    }
    fn dim(&self, _a: &Obj) -> usize {
        0
    }
    fn compute_hom(&self, a: &Obj, b: &Obj) -> Vec<Mor> {
        let (s, t) = (Finite::id_of(a), Finite::id_of(b));
        (0..self.mors.len()).filter(|&i| self.mors[i].1 == s && self.mors[i].2 == t).map(|i| self.mk(i)).collect()
    }
    fn cache(&self) -> &HomCache {
        &self.cache
    }
    fn identity(&self, a: &Obj) -> Mor {
        self.mk(Finite::id_of(a))
    }
    fn compose_raw(&self, g: &Mor, f: &Mor) -> Mor {
        self.mk(self.comp[&(Finite::mor_index(g), Finite::mor_index(f))])
    }
    fn generators_from(&self, a: &Obj) -> Vec<Mor> {
        let s = Finite::id_of(a);
        (self.objects.len()..self.mors.len()).filter(|&i| self.mors[i].1 == s).map(|i| self.mk(i)).collect()
    }
    fn generators_into(&self, b: &Obj) -> Vec<Mor> {
        let t = Finite::id_of(b);
        (self.objects.len()..self.mors.len()).filter(|&i| self.mors[i].2 == t).map(|i| self.mk(i)).collect()
    }
    fn factor(&self, f: &Mor) -> Result<Vec<Mor>, CatError> {
        Ok(if Finite::mor_index(f) < self.objects.len() { vec![] } else { vec![f.clone()] })
    }
    fn mor_name(&self, f: &Mor) -> String {
        self.mors[Finite::mor_index(f)].0.clone()
    }
    fn obj_name(&self, a: &Obj) -> String {
        self.objects[Finite::id_of(a)].clone()
    }
    fn parse_object(&self, s: &str) -> Result<Obj, CatError> {
        self.objects.iter().position(|o| o == s.trim()).map(Obj::Node).ok_or_else(|| CatError::BadObject(format!("no object {s:?} in {}", self.name)))
    }
    fn is_finite(&self) -> bool {
        true
    }
    fn all_objects(&self) -> Vec<Obj> {
        (0..self.objects.len()).map(Obj::Node).collect()
    }
}

/// The terminal category: one object, one morphism.
#[derive(Default)]
pub struct Terminal {
    cache: HomCache,
}

impl Terminal {
    pub fn new() -> Terminal {
        Terminal::default()
    }

    pub fn unit() -> Mor {
        Mor::new(Obj::point(), Obj::point(), Arrow::Unit)
    }
}

impl Category for Terminal {
    fn name(&self) -> String {
        "terminal".into()
    }
    fn max_dim(&self) -> usize {
        0
    }
    fn objects_of_dim(&self, d: usize) -> Vec<Obj> {
        if d == 0 { vec![Obj::point()] } else { Vec::new() }
    }
    fn dim(&self, _a: &Obj) -> usize {
        0
    }
    fn compute_hom(&self, _a: &Obj, _b: &Obj) -> Vec<Mor> {
        vec![Terminal::unit()]
    }
    fn cache(&self) -> &HomCache {
        &self.cache
    }
    fn identity(&self, _a: &Obj) -> Mor {
        Terminal::unit()
    }
    fn compose_raw(&self, _g: &Mor, _f: &Mor) -> Mor {
        Terminal::unit()
    }
    fn generators_from(&self, _a: &Obj) -> Vec<Mor> {
        Vec::new()
    }
    fn generators_into(&self, _b: &Obj) -> Vec<Mor> {
        Vec::new()
    }
    fn factor(&self, _f: &Mor) -> Result<Vec<Mor>, CatError> {
        Ok(Vec::new())
    }
    fn mor_name(&self, _f: &Mor) -> String {
        "id".into()
    }
    fn obj_name(&self, _a: &Obj) -> String {
        "*".into()
    }
    fn parse_object(&self, s: &str) -> Result<Obj, CatError> {
        match s.trim() {
            "*" | "0" => Ok(Obj::point()),
            _ => Err(CatError::BadObject(format!("the terminal category has only the object *, got {s:?}"))),
        }
    }
    fn is_catenary(&self) -> bool {
        true
    }
    fn is_finite(&self) -> bool {
        true
    }
    fn mono_shortcut(&self, _f: &Mor) -> Option<bool> {
        Some(true)
    }
    fn codim1_closed(&self, _a: &Obj) -> Option<Vec<Mor>> {
        Some(Vec::new())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapecat::{check_axioms, nerve};

    #[test]
    fn nerves() {
        let t = Terminal::new();
        for n in 0..4 {
            assert_eq!(nerve(&t, n).unwrap().len(), 1);
        }
        assert_eq!(nerve(&Finite::chain_poset(2), 1).unwrap().len(), 3);
        assert_eq!(nerve(&Finite::parallel_pair(), 1).unwrap().len(), 4);
        assert!(nerve(&crate::shapecat::Delta::new(2), 1).is_err());
    }

    #[test]
    fn presentations() {
        check_axioms(&Finite::chain_poset(3), 0).unwrap();
        let v: Value = serde_json::json!({
            "objects": ["a", "b", "c"],
            "morphisms": [{"name": "f", "src": "a", "tgt": "b"}, {"name": "g", "src": "b", "tgt": "c"}],
            "compose": []
        });
        assert!(matches!(Finite::from_json(&v), Err(CatError::InvalidPresentation(_))));
        let v: Value = serde_json::json!({
            "objects": ["a", "b"],
            "morphisms": [{"name": "f", "src": "a", "tgt": "b"}, {"name": "g", "src": "b", "tgt": "a"}],
            "compose": [["g", "f", "id_a"], ["f", "g", "f"]]
        });
        assert!(matches!(Finite::from_json(&v), Err(CatError::InvalidPresentation(_))));
        let v: Value = serde_json::json!({
            "objects": ["a", "b"],
            "morphisms": [{"name": "f", "src": "a", "tgt": "b"}, {"name": "g", "src": "b", "tgt": "a"}],
            "compose": [["g", "f", "id_a"], ["f", "g", "id_b"]]
        });
        let c = Finite::from_json(&v).unwrap();
        check_axioms(&c, 0).unwrap();
    }
}
