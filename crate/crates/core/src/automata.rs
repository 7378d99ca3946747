//! Deterministic parity word automata over arena state ids.
//!
//! Acceptance is min-even everywhere: a run accepts iff the minimum priority
//! among the states visited infinitely often is even. Automata read the full
//! play, including the arena's initial state as the first letter.
//!
//! Conjunction is an index appearance record product: each component's parity
//! condition splits into one Streett-style pair per odd priority value, and
//! the product state carries a recency permutation of those pairs plus the
//! priority emitted by the incoming transition (so priorities stay
//! state-based). Disjunction is De Morgan over complement, which only shifts
//! priorities, so a single product construction carries the whole algebra.

use std::collections::HashMap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("letter {0} is outside the automaton alphabet")]
    UnknownLetter(usize),
    #[error("automata alphabets differ ({0} vs {1})")]
    AlphabetMismatch(usize, usize),
    #[error("product construction exceeded {0} states")]
    SizeLimit(usize),
}

/// Deterministic parity automaton. Letters are arena state indices
/// `0..alphabet`; `delta` is total by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dpa {
    pub alphabet: usize,
    pub initial: usize,
    /// `delta[state][letter] -> state`.
    pub delta: Vec<Vec<usize>>,
    /// `priority[state]`, min-even acceptance.
    pub priority: Vec<u32>,
}

impl Dpa {
    pub fn state_count(&self) -> usize {
        self.delta.len()
    }

    pub fn step(&self, state: usize, letter: usize) -> Result<usize, AutomatonError> {
        self.delta
            .get(state)
            .and_then(|row| row.get(letter))
            .copied()
            .ok_or(AutomatonError::UnknownLetter(letter))
    }

    /// Runs over a finite word from `state`, returning the final state.
    pub fn run_from(&self, mut state: usize, word: &[usize]) -> Result<usize, AutomatonError> {
        for &letter in word {
            state = self.step(state, letter)?;
        }
        Ok(state)
    }

    /// Structural determinism check: `delta` total over states x alphabet and
    /// all targets in range.
    pub fn is_deterministic_total(&self) -> bool {
        self.delta.len() == self.priority.len()
            && self.initial < self.delta.len()
            && self
                .delta
                .iter()
                .all(|row| row.len() == self.alphabet && row.iter().all(|&t| t < self.delta.len()))
    }
}

/// Runs `stem` then iterates `cycle` until the (state, cycle position) pair
/// repeats; accepts iff the minimum priority on the detected loop is even.
pub fn dpa_accepts_lasso(d: &Dpa, stem: &[usize], cycle: &[usize]) -> Result<bool, AutomatonError> {
    assert!(!cycle.is_empty(), "lasso cycle must be nonempty");
    let mut state = d.run_from(d.initial, stem)?;
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    let mut trace: Vec<usize> = Vec::new();
    let mut pos = 0usize;
    loop {
        if let Some(&start) = seen.get(&(state, pos)) {
            let min = trace[start..].iter().map(|&q| d.priority[q]).min().unwrap();
            return Ok(min % 2 == 0);
        }
        seen.insert((state, pos), trace.len());
        state = d.step(state, cycle[pos])?;
        trace.push(state);
        pos = (pos + 1) % cycle.len();
    }
}

/// Complement by shifting every priority up by one.
pub fn dpa_complement(d: &Dpa) -> Dpa {
    Dpa {
        alphabet: d.alphabet,
        initial: d.initial,
        delta: d.delta.clone(),
        priority: d.priority.iter().map(|p| p + 1).collect(),
    }
}

/// One Streett-style pair per odd priority value of a component: the pair
/// resets when the component shows a priority below the odd value, and fires
/// when it shows the odd value itself.
#[derive(Debug, Clone, Copy)]
struct Pair {
    component: usize,
    odd: u32,
}

#[derive(PartialEq, Eq, Hash, Clone)]
struct IarKey {
    comps: Vec<usize>,
    perm: Vec<u8>,
    pri: u32,
}

const DEFAULT_PRODUCT_CAP: usize = 1_000_000;

/// Intersection of the component languages.
pub fn dpa_conj(ds: &[&Dpa]) -> Result<Dpa, AutomatonError> {
    dpa_conj_capped(ds, DEFAULT_PRODUCT_CAP)
}

/// As [`dpa_conj`] with an explicit bound on materialized product states.
pub fn dpa_conj_capped(ds: &[&Dpa], cap: usize) -> Result<Dpa, AutomatonError> {
    assert!(!ds.is_empty(), "conjunction of zero automata");
    let alphabet = ds[0].alphabet;
    for d in ds {
        if d.alphabet != alphabet {
            return Err(AutomatonError::AlphabetMismatch(alphabet, d.alphabet));
        }
    }

    let mut pairs: Vec<Pair> = Vec::new();
    for (c, d) in ds.iter().enumerate() {
        let mut odds: Vec<u32> = d.priority.iter().copied().filter(|p| p % 2 == 1).collect();
        odds.sort_unstable();
        odds.dedup();
        for odd in odds {
            pairs.push(Pair { component: c, odd });
        }
    }
    let r = pairs.len();

    // All components accept everything: a single always-accepting state.
    if r == 0 {
        return Ok(Dpa {
            alphabet,
            initial: 0,
            delta: vec![vec![0; alphabet]],
            priority: vec![0],
        });
    }
    assert!(r <= u8::MAX as usize, "too many appearance-record pairs");

    let top = 2 * r as u32; // neutral even priority, emitted when nothing fires
    let initial_key = IarKey {
        comps: ds.iter().map(|d| d.initial).collect(),
        perm: (0..r as u8).collect(),
        pri: top,
    };

    let mut index: HashMap<IarKey, usize> = HashMap::new();
    let mut keys: Vec<IarKey> = Vec::new();
    let mut delta: Vec<Vec<usize>> = Vec::new();
    index.insert(initial_key.clone(), 0);
    keys.push(initial_key);

    let mut next = 0usize;
    while next < keys.len() {
        let key = keys[next].clone();
        let mut row = Vec::with_capacity(alphabet);
        for letter in 0..alphabet {
            let comps: Vec<usize> = key
                .comps
                .iter()
                .zip(ds)
                .map(|(&q, d)| d.delta[q][letter])
                .collect();
            let mut max_f = 0usize; // deepest reset position, 1-based
            let mut max_e = 0usize; // deepest fire position, 1-based
            let mut hit_f = vec![false; r];
            for (pos0, &pair_idx) in key.perm.iter().enumerate() {
                let pair = pairs[pair_idx as usize];
                let p = ds[pair.component].priority[comps[pair.component]];
                if p < pair.odd {
                    hit_f[pair_idx as usize] = true;
                    max_f = pos0 + 1;
                }
                if p == pair.odd {
                    max_e = pos0 + 1;
                }
            }
            let pri = if max_f >= max_e {
                2 * (r - max_f) as u32
            } else {
                2 * (r - max_e) as u32 + 1
            };
            // Move reset pairs to the front, preserving relative order.
            let mut perm = Vec::with_capacity(r);
            perm.extend(key.perm.iter().copied().filter(|&a| hit_f[a as usize]));
            perm.extend(key.perm.iter().copied().filter(|&a| !hit_f[a as usize]));

            let succ_key = IarKey { comps, perm, pri };
            let id = match index.get(&succ_key) {
                Some(&id) => id,
                None => {
                    let id = keys.len();
                    if id >= cap {
                        return Err(AutomatonError::SizeLimit(cap));
                    }
                    index.insert(succ_key.clone(), id);
                    keys.push(succ_key);
                    id
                }
            };
            row.push(id);
        }
        delta.push(row);
        next += 1;
    }

    let priority = keys.iter().map(|k| k.pri).collect();
    Ok(dpa_reduce(&Dpa {
        alphabet,
        initial: 0,
        delta,
        priority,
    }))
}

/// Language-preserving shrink: keep reachable states, quotient by
/// priority-respecting bisimulation, and fold transient states (never on a
/// cycle, so their priority cannot occur infinitely often) into any state
/// with the same successor rows. Output layout is canonical BFS order.
pub fn dpa_reduce(d: &Dpa) -> Dpa {
    let mut current = restrict_reachable(d);
    loop {
        let classes = bisimulation_classes(&current);
        let mut quotient = apply_classes(&current, &classes);
        transient_fold(&mut quotient);
        let next = restrict_reachable(&quotient);
        if next.state_count() == current.state_count() {
            debug_assert!(next.is_deterministic_total());
            return next;
        }
        current = next;
    }
}

fn restrict_reachable(d: &Dpa) -> Dpa {
    let mut order = vec![d.initial];
    let mut index: HashMap<usize, usize> = HashMap::new();
    index.insert(d.initial, 0);
    let mut head = 0;
    while head < order.len() {
        let s = order[head];
        for letter in 0..d.alphabet {
            let t = d.delta[s][letter];
            index.entry(t).or_insert_with(|| {
                order.push(t);
                order.len() - 1
            });
        }
        head += 1;
    }
    Dpa {
        alphabet: d.alphabet,
        initial: 0,
        delta: order
            .iter()
            .map(|&s| d.delta[s].iter().map(|t| index[t]).collect())
            .collect(),
        priority: order.iter().map(|&s| d.priority[s]).collect(),
    }
}

/// Coarsest partition where blocks agree on priority and per-letter successor
/// blocks.
fn bisimulation_classes(d: &Dpa) -> Vec<usize> {
    let n = d.state_count();
    let mut class: Vec<usize> = {
        let mut by_priority: HashMap<u32, usize> = HashMap::new();
        let mut next = 0;
        (0..n)
            .map(|s| {
                *by_priority.entry(d.priority[s]).or_insert_with(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect()
    };
    loop {
        let mut signature: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut next_class = vec![0usize; n];
        for s in 0..n {
            let key = (
                class[s],
                d.delta[s].iter().map(|&t| class[t]).collect::<Vec<_>>(),
            );
            let fresh = signature.len();
            next_class[s] = *signature.entry(key).or_insert(fresh);
        }
        if signature.len()
            == class
                .iter()
                .copied()
                .collect::<std::collections::BTreeSet<_>>()
                .len()
        {
            return next_class;
        }
        class = next_class;
    }
}

fn apply_classes(d: &Dpa, class: &[usize]) -> Dpa {
    let count = class.iter().max().map_or(0, |m| m + 1);
    let mut repr = vec![usize::MAX; count];
    for s in 0..d.state_count() {
        if repr[class[s]] == usize::MAX {
            repr[class[s]] = s;
        }
    }
    Dpa {
        alphabet: d.alphabet,
        initial: class[d.initial],
        delta: repr
            .iter()
            .map(|&s| d.delta[s].iter().map(|&t| class[t]).collect())
            .collect(),
        priority: repr.iter().map(|&s| d.priority[s]).collect(),
    }
}

/// Merges states that are on no cycle into any state with identical successor
/// rows; such states are visited at most once per run, so their priorities
/// never count toward acceptance.
fn transient_fold(d: &mut Dpa) {
    let n = d.state_count();
    let recurrent = recurrent_states(d);
    let mut rep: Vec<usize> = (0..n).collect();
    let mut changed = true;
    while changed {
        changed = false;
        let mut by_row: HashMap<Vec<usize>, usize> = HashMap::new();
        // recurrent states claim their rows first so transients fold into them
        for s in 0..n {
            if rep[s] != s || !recurrent[s] {
                continue;
            }
            let row: Vec<usize> = d.delta[s].iter().map(|&t| rep[t]).collect();
            by_row.entry(row).or_insert(s);
        }
        for s in 0..n {
            if rep[s] != s || recurrent[s] {
                continue;
            }
            let row: Vec<usize> = d.delta[s].iter().map(|&t| rep[t]).collect();
            match by_row.get(&row) {
                Some(&t) if t != s => {
                    rep[s] = t;
                    changed = true;
                }
                Some(_) => {}
                None => {
                    by_row.insert(row, s);
                }
            }
        }
        // compress chains
        for s in 0..n {
            let mut r = rep[s];
            while rep[r] != r {
                r = rep[r];
            }
            rep[s] = r;
        }
    }
    d.initial = rep[d.initial];
    for row in &mut d.delta {
        for t in row.iter_mut() {
            *t = rep[*t];
        }
    }
}

/// States lying on some cycle of the transition graph.
fn recurrent_states(d: &Dpa) -> Vec<bool> {
    let n = d.state_count();
    // iterative Tarjan SCC
    let mut index_of = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut counter = 0usize;
    let mut recurrent = vec![false; n];
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index_of[root] != usize::MAX {
            continue;
        }
        call.push((root, 0));
        index_of[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (s, ref mut next)) = call.last_mut() {
            if *next < d.alphabet {
                let t = d.delta[s][*next];
                *next += 1;
                if index_of[t] == usize::MAX {
                    index_of[t] = counter;
                    low[t] = counter;
                    counter += 1;
                    stack.push(t);
                    on_stack[t] = true;
                    call.push((t, 0));
                } else if on_stack[t] {
                    low[s] = low[s].min(index_of[t]);
                }
            } else {
                call.pop();
                if let Some(&mut (parent, _)) = call.last_mut() {
                    low[parent] = low[parent].min(low[s]);
                }
                if low[s] == index_of[s] {
                    let mut component = Vec::new();
                    loop {
                        let t = stack.pop().expect("scc stack");
                        on_stack[t] = false;
                        component.push(t);
                        if t == s {
                            break;
                        }
                    }
                    let cyclic = component.len() > 1 || d.delta[s].contains(&s);
                    if cyclic {
                        for &t in &component {
                            recurrent[t] = true;
                        }
                    }
                }
            }
        }
    }
    recurrent
}

/// Union of the component languages, via De Morgan over [`dpa_conj`].
pub fn dpa_disj(ds: &[&Dpa]) -> Result<Dpa, AutomatonError> {
    dpa_disj_capped(ds, DEFAULT_PRODUCT_CAP)
}

pub fn dpa_disj_capped(ds: &[&Dpa], cap: usize) -> Result<Dpa, AutomatonError> {
    let complements: Vec<Dpa> = ds.iter().map(|d| dpa_complement(d)).collect();
    let refs: Vec<&Dpa> = complements.iter().collect();
    Ok(dpa_complement(&dpa_conj_capped(&refs, cap)?))
}
