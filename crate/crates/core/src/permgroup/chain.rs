//! Deterministic Schreier–Sims stabilizer chain.
//!
//! Level `i` holds a base point `beta_i`, the strong generators fixing
//! `beta_0..beta_{i-1}`, and a Schreier tree for the orbit of `beta_i` under
//! those generators. Construction verifies levels bottom-up: every Schreier
//! generator of a level must sift to the identity through the levels below
//! it; a failing residue is inserted below and verification resumes from the
//! deepest level it touched. No randomization anywhere, so the same input
//! always yields the same chain.

use num_bigint::BigUint;
use num_traits::One;

use super::Permutation;

#[derive(Debug, Clone)]
struct Level {
    beta: usize,
    gens: Vec<Permutation>,
    /// Schreier tree: `parent[x] = (gen index, previous point)`; the root
    /// `beta` is stored as `(usize::MAX, beta)`. `None` means not in orbit.
    parent: Vec<Option<(usize, usize)>>,
    orbit: Vec<usize>,
}

impl Level {
    fn new(beta: usize, degree: usize) -> Self {
        let mut parent = vec![None; degree];
        parent[beta] = Some((usize::MAX, beta));
        Level {
            beta,
            gens: Vec::new(),
            parent,
            orbit: vec![beta],
        }
    }
}

#[derive(Debug, Clone)]
pub struct StabChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabChain {
    /// Builds the chain for `gens` on `0..degree`. Points in `base_hint` are
    /// installed as the leading base points (levels exist for them even if
    /// their orbits stay trivial), which [`orbit_len_at`] relies on.
    ///
    /// [`orbit_len_at`]: StabChain::orbit_len_at
    pub fn build(degree: usize, gens: &[Permutation], base_hint: &[usize]) -> Self {
        let mut chain = StabChain {
            degree,
            levels: Vec::new(),
        };
        for &b in base_hint {
            chain.levels.push(Level::new(b, degree));
        }
        for g in gens {
            if !g.is_identity() {
                chain.register(g.clone(), 0);
            }
        }
        let mut i = chain.levels.len() as isize - 1;
        while i >= 0 {
            match chain.verify_level(i as usize) {
                None => i -= 1,
                Some(deepest) => i = deepest as isize,
            }
        }
        chain
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.beta).collect()
    }

    pub fn order(&self) -> BigUint {
        let mut acc = BigUint::one();
        for level in &self.levels {
            acc *= BigUint::from(level.orbit.len());
        }
        acc
    }

    /// Orbit size of the `i`-th basic orbit; 1 beyond the chain.
    pub fn orbit_len_at(&self, i: usize) -> usize {
        self.levels.get(i).map_or(1, |l| l.orbit.len())
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        g.degree() == self.degree && self.sift_from(0, g.clone()).is_none()
    }

    /// Sifts `g` through levels `start..`; returns the residue if it fails
    /// to reduce to the identity.
    fn sift_from(&self, start: usize, mut g: Permutation) -> Option<Permutation> {
        for i in start..self.levels.len() {
            if g.is_identity() {
                return None;
            }
            let beta = self.levels[i].beta;
            let x = g.apply(beta);
            if x == beta {
                continue;
            }
            if self.levels[i].parent[x].is_none() {
                return Some(g);
            }
            g = self.rep(i, x).inverse().compose(&g);
        }
        if g.is_identity() {
            None
        } else {
            Some(g)
        }
    }

    /// Transversal representative `u` at level `i` with `u(beta_i) = x`.
    fn rep(&self, i: usize, x: usize) -> Permutation {
        let level = &self.levels[i];
        let mut word = Vec::new();
        let mut cur = x;
        while cur != level.beta {
            let (gi, prev) = level.parent[cur].expect("point in orbit");
            word.push(gi);
            cur = prev;
        }
        let mut u = Permutation::identity(self.degree);
        for &gi in word.iter().rev() {
            u = level.gens[gi].compose(&u);
        }
        u
    }

    /// Re-runs the Schreier closure check at level `i`. On the first
    /// Schreier generator that fails to sift, the residue is registered at
    /// the levels below and the deepest changed level is returned; `None`
    /// means the level is verified against the current chain.
    fn verify_level(&mut self, i: usize) -> Option<usize> {
        self.rebuild_orbit(i);
        let orbit = self.levels[i].orbit.clone();
        let ngens = self.levels[i].gens.len();
        for &x in &orbit {
            let ux = self.rep(i, x);
            for gi in 0..ngens {
                let s = self.levels[i].gens[gi].clone();
                let schreier = self.rep(i, s.apply(x)).inverse().compose(&s).compose(&ux);
                if let Some(residue) = self.sift_from(i + 1, schreier) {
                    // residue fixes beta_0..beta_i, so it belongs strictly
                    // below; generators at this level and above already
                    // generate it
                    let deepest = self.register(residue, i + 1);
                    return Some(deepest);
                }
            }
        }
        None
    }

    /// Adds a non-identity strong generator to every level from
    /// `from_level` through the last base point it fixes, opening a new
    /// level when it fixes the whole base. Returns the deepest level that
    /// received it. Orbits are rebuilt lazily by `verify_level`.
    fn register(&mut self, g: Permutation, from_level: usize) -> usize {
        let mut j = 0;
        while j < self.levels.len() && g.apply(self.levels[j].beta) == self.levels[j].beta {
            j += 1;
        }
        debug_assert!(j >= from_level, "generator moves a base point above its level");
        if j == self.levels.len() {
            let beta = (0..self.degree)
                .find(|&x| g.apply(x) != x)
                .expect("non-identity permutation moves a point");
            self.levels.push(Level::new(beta, self.degree));
        }
        for level in &mut self.levels[from_level..=j] {
            if !level.gens.contains(&g) {
                level.gens.push(g.clone());
            }
        }
        j
    }

    fn rebuild_orbit(&mut self, i: usize) {
        let beta = self.levels[i].beta;
        let degree = self.degree;
        let level = &mut self.levels[i];
        level.parent = vec![None; degree];
        level.parent[beta] = Some((usize::MAX, beta));
        level.orbit = vec![beta];
        let mut head = 0;
        while head < level.orbit.len() {
            let x = level.orbit[head];
            head += 1;
            for (gi, g) in level.gens.iter().enumerate() {
                let y = g.apply(x);
                if level.parent[y].is_none() {
                    level.parent[y] = Some((gi, x));
                    level.orbit.push(y);
                }
            }
        }
    }
}
