//! Shared test helpers: a small AIG builder, hand-written toy models, a
//! seeded random circuit generator, and AIGER writers (test-only).

#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const FALSE: usize = 0;
pub const TRUE: usize = 1;

/// Builds AIGs with the canonical variable layout (inputs, then latches,
/// then gates), which both the ASCII and the binary writer accept.
pub struct AigBuilder {
    n_inputs: usize,
    latches: Vec<(usize, Option<usize>, LatchInit)>, // (current, next, reset)
    gates: Vec<(usize, usize, usize)>,
    bad: Option<usize>,
    frozen: bool, // no more inputs/latches once gates exist
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum LatchInit {
    Zero,
    One,
    Free,
}

impl AigBuilder {
    pub fn new() -> Self {
        AigBuilder {
            n_inputs: 0,
            latches: Vec::new(),
            gates: Vec::new(),
            bad: None,
            frozen: false,
        }
    }

    pub fn input(&mut self) -> usize {
        assert!(self.latches.is_empty() && !self.frozen);
        self.n_inputs += 1;
        2 * self.n_inputs
    }

    pub fn latch(&mut self, init: LatchInit) -> usize {
        assert!(!self.frozen);
        let current = 2 * (self.n_inputs + self.latches.len() + 1);
        self.latches.push((current, None, init));
        current
    }

    pub fn set_next(&mut self, latch_lit: usize, next: usize) {
        let idx = self
            .latches
            .iter()
            .position(|&(c, _, _)| c == latch_lit)
            .expect("unknown latch");
        self.latches[idx].1 = Some(next);
    }

    pub fn and(&mut self, a: usize, b: usize) -> usize {
        self.frozen = true;
        // fold the cheap constant cases so generated circuits stay small
        match (a, b) {
            (FALSE, _) | (_, FALSE) => return FALSE,
            (TRUE, x) | (x, TRUE) => return x,
            (x, y) if x == y => return x,
            (x, y) if x ^ 1 == y => return FALSE,
            _ => {}
        }
        let lhs = 2 * (self.n_inputs + self.latches.len() + self.gates.len() + 1);
        self.gates.push((lhs, a.max(b), a.min(b)));
        lhs
    }

    pub fn or(&mut self, a: usize, b: usize) -> usize {
        self.and(a ^ 1, b ^ 1) ^ 1
    }

    pub fn xor(&mut self, a: usize, b: usize) -> usize {
        let x = self.and(a, b ^ 1);
        let y = self.and(a ^ 1, b);
        self.or(x, y)
    }

    /// a == b (XNOR)
    pub fn eq(&mut self, a: usize, b: usize) -> usize {
        self.xor(a, b) ^ 1
    }

    pub fn mux(&mut self, sel: usize, then_lit: usize, else_lit: usize) -> usize {
        let t = self.and(sel, then_lit);
        let e = self.and(sel ^ 1, else_lit);
        self.or(t, e)
    }

    pub fn set_bad(&mut self, lit: usize) {
        self.bad = Some(lit);
    }

    pub fn max_var(&self) -> usize {
        self.n_inputs + self.latches.len() + self.gates.len()
    }

    pub fn to_aag(&self) -> String {
        let bad = self.bad.expect("bad signal unset");
        let mut out = format!(
            "aag {} {} {} 1 {}\n",
            self.max_var(),
            self.n_inputs,
            self.latches.len(),
            self.gates.len()
        );
        for i in 0..self.n_inputs {
            out.push_str(&format!("{}\n", 2 * (i + 1)));
        }
        for &(current, next, init) in &self.latches {
            let next = next.expect("latch next unset");
            match init {
                LatchInit::Zero => out.push_str(&format!("{current} {next}\n")),
                LatchInit::One => out.push_str(&format!("{current} {next} 1\n")),
                LatchInit::Free => out.push_str(&format!("{current} {next} {current}\n")),
            }
        }
        out.push_str(&format!("{bad}\n"));
        for &(lhs, rhs0, rhs1) in &self.gates {
            out.push_str(&format!("{lhs} {rhs0} {rhs1}\n"));
        }
        out
    }

    pub fn to_aig(&self) -> Vec<u8> {
        let bad = self.bad.expect("bad signal unset");
        let mut out = format!(
            "aig {} {} {} 1 {}\n",
            self.max_var(),
            self.n_inputs,
            self.latches.len(),
            self.gates.len()
        )
        .into_bytes();
        for &(current, next, init) in &self.latches {
            let next = next.expect("latch next unset");
            match init {
                LatchInit::Zero => out.extend_from_slice(format!("{next}\n").as_bytes()),
                LatchInit::One => out.extend_from_slice(format!("{next} 1\n").as_bytes()),
                LatchInit::Free => out.extend_from_slice(format!("{next} {current}\n").as_bytes()),
            }
        }
        out.extend_from_slice(format!("{bad}\n").as_bytes());
        for &(lhs, rhs0, rhs1) in &self.gates {
            let mut push_delta = |mut d: usize| loop {
                let byte = (d & 0x7f) as u8;
                d >>= 7;
                if d == 0 {
                    out.push(byte);
                    break;
                }
                out.push(byte | 0x80);
            };
            push_delta(lhs - rhs0);
            push_delta(rhs0 - rhs1);
        }
        out
    }
}

/// Re-encodes a parsed model in the binary format. Requires the canonical
/// variable layout (inputs, latches, gates) that every builder-generated
/// model has.
pub fn rebuild_as_aig(model: &ic3ctp::aiger::AigerModel) -> Vec<u8> {
    use ic3ctp::aiger::LatchReset;
    let ni = model.inputs.len();
    let nl = model.latches.len();
    for (i, &inp) in model.inputs.iter().enumerate() {
        assert_eq!(inp, 2 * (i + 1), "layout not canonical");
    }
    for (i, latch) in model.latches.iter().enumerate() {
        assert_eq!(latch.current, 2 * (ni + i + 1), "layout not canonical");
    }
    let mut out = format!(
        "aig {} {} {} {} {}",
        model.max_var,
        ni,
        nl,
        model.outputs.len(),
        model.ands.len()
    );
    if !model.bads.is_empty() {
        out.push_str(&format!(" {}", model.bads.len()));
    }
    out.push('\n');
    let mut out = out.into_bytes();
    for latch in &model.latches {
        let line = match latch.reset {
            LatchReset::Zero => format!("{}\n", latch.next),
            LatchReset::One => format!("{} 1\n", latch.next),
            LatchReset::Uninitialized => format!("{} {}\n", latch.next, latch.current),
        };
        out.extend_from_slice(line.as_bytes());
    }
    for &o in &model.outputs {
        out.extend_from_slice(format!("{o}\n").as_bytes());
    }
    for &b in &model.bads {
        out.extend_from_slice(format!("{b}\n").as_bytes());
    }
    for (i, and) in model.ands.iter().enumerate() {
        assert_eq!(and.lhs, 2 * (ni + nl + i + 1), "layout not canonical");
        let mut push_delta = |mut d: usize| loop {
            let byte = (d & 0x7f) as u8;
            d >>= 7;
            if d == 0 {
                out.push(byte);
                break;
            }
            out.push(byte | 0x80);
        };
        push_delta(and.lhs - and.rhs0);
        push_delta(and.rhs0 - and.rhs1);
    }
    out
}

// ---------------------------------------------------------------------------
// Hand-written toys
// ---------------------------------------------------------------------------

pub fn toggle_latch() -> String {
    "aag 1 0 1 1 0\n2 3\n2\n".to_string()
}

pub fn hold_latch() -> String {
    "aag 1 0 1 1 0\n2 2\n2\n".to_string()
}

/// n-bit binary counter that resets to 0 upon reaching `reset_at`.
/// bad = (value == bad_value). Safe iff bad_value is never visited, i.e.
/// bad_value > reset_at (counting starts at 0).
pub fn counter(n: usize, reset_at: u64, bad_value: u64) -> String {
    let mut b = AigBuilder::new();
    let bits: Vec<usize> = (0..n).map(|_| b.latch(LatchInit::Zero)).collect();
    // at_reset = AND over (bit_i == reset_i)
    let mut at_reset = TRUE;
    for (i, &bit) in bits.iter().enumerate() {
        let want = if reset_at >> i & 1 == 1 { bit } else { bit ^ 1 };
        at_reset = b.and(at_reset, want);
    }
    // increment with carry chain, squashed to zero on reset
    let mut carry = TRUE;
    let mut nexts = Vec::new();
    for &bit in &bits {
        let sum = b.xor(bit, carry);
        carry = b.and(bit, carry);
        let nxt = b.and(sum, at_reset ^ 1);
        nexts.push(nxt);
    }
    for (&bit, &nxt) in bits.iter().zip(nexts.iter()) {
        b.set_next(bit, nxt);
    }
    let mut at_bad = TRUE;
    for (i, &bit) in bits.iter().enumerate() {
        let want = if bad_value >> i & 1 == 1 {
            bit
        } else {
            bit ^ 1
        };
        at_bad = b.and(at_bad, want);
    }
    b.set_bad(at_bad);
    b.to_aag()
}

/// n-stage shift register. With `fed_by_input` the first stage samples a free
/// input (unsafe: a 1 reaches the last stage); otherwise it holds 0 (safe).
/// bad = last stage.
pub fn shift_register(n: usize, fed_by_input: bool) -> String {
    let mut b = AigBuilder::new();
    let feed = if fed_by_input { b.input() } else { FALSE };
    let stages: Vec<usize> = (0..n).map(|_| b.latch(LatchInit::Zero)).collect();
    b.set_next(stages[0], feed);
    for i in 1..n {
        b.set_next(stages[i], stages[i - 1]);
    }
    b.set_bad(stages[n - 1]);
    b.to_aag()
}

/// One-hot ring counter of n stages (stage 0 starts at 1, rotating). With
/// `safe`, bad = two adjacent stages high (unreachable); otherwise bad = the
/// last stage (reached after n-1 rotations).
pub fn ring_counter(n: usize, safe: bool) -> String {
    assert!(n >= 2);
    let mut b = AigBuilder::new();
    let stages: Vec<usize> = (0..n)
        .map(|i| {
            b.latch(if i == 0 {
                LatchInit::One
            } else {
                LatchInit::Zero
            })
        })
        .collect();
    for i in 0..n {
        let prev = stages[(i + n - 1) % n];
        b.set_next(stages[i], prev);
    }
    if safe {
        let pair = b.and(stages[0], stages[1]);
        b.set_bad(pair);
    } else {
        b.set_bad(stages[n - 1]);
    }
    b.to_aag()
}

pub fn toy_corpus() -> Vec<(String, String)> {
    let mut toys = vec![
        ("toggle".to_string(), toggle_latch()),
        ("hold".to_string(), hold_latch()),
        ("const_false".to_string(), "aag 0 0 0 1 0\n0\n".to_string()),
        ("const_true".to_string(), "aag 0 0 0 1 0\n1\n".to_string()),
    ];
    for n in 2..=5 {
        toys.push((format!("shift{n}_safe"), shift_register(n, false)));
        toys.push((format!("shift{n}_unsafe"), shift_register(n, true)));
    }
    for n in 3..=5 {
        toys.push((format!("ring{n}_safe"), ring_counter(n, true)));
        toys.push((format!("ring{n}_unsafe"), ring_counter(n, false)));
    }
    // safe: counts 0..=5, bad value 7 unreachable; unsafe: bad value 3
    toys.push(("counter3_safe".to_string(), counter(3, 5, 7)));
    toys.push(("counter3_unsafe".to_string(), counter(3, 5, 3)));
    toys.push(("counter4_safe".to_string(), counter(4, 11, 14)));
    toys.push(("counter4_unsafe".to_string(), counter(4, 11, 9)));
    toys
}

// ---------------------------------------------------------------------------
// Seeded random circuits
// ---------------------------------------------------------------------------

/// Random AIG within the desk-scale envelope: at most `max_latches` latches,
/// 4 inputs and 40 gates. Deterministic per seed.
pub fn random_aag(seed: u64, max_latches: usize) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_latches = rng.gen_range(1..=max_latches);
    let n_inputs = rng.gen_range(0..=4usize);
    let n_gates = rng.gen_range(1..=40usize);

    let mut b = AigBuilder::new();
    let inputs: Vec<usize> = (0..n_inputs).map(|_| b.input()).collect();
    let latches: Vec<usize> = (0..n_latches)
        .map(|_| {
            b.latch(match rng.gen_range(0..10) {
                0 => LatchInit::One,
                1 => LatchInit::Free,
                _ => LatchInit::Zero,
            })
        })
        .collect();
    let mut pool: Vec<usize> = Vec::new();
    pool.extend(&inputs);
    pool.extend(&latches);
    let pick = |rng: &mut ChaCha8Rng, pool: &[usize]| -> usize {
        let lit = pool[rng.gen_range(0..pool.len())];
        if rng.gen_bool(0.5) {
            lit ^ 1
        } else {
            lit
        }
    };
    for _ in 0..n_gates {
        let x = pick(&mut rng, &pool);
        let y = pick(&mut rng, &pool);
        let g = b.and(x, y);
        if g > 1 {
            pool.push(g & !1);
        }
    }
    for &l in &latches {
        let next = pick(&mut rng, &pool);
        b.set_next(l, next);
    }
    // Prefer state-dependent bad signals so the checker has work to do.
    let bad_base = pool[rng.gen_range(n_inputs..pool.len())];
    let bad = if rng.gen_bool(0.3) {
        bad_base ^ 1
    } else {
        bad_base
    };
    b.set_bad(bad);
    b.to_aag()
}

/// The generated corpus for the acceptance suite: 200 random models capped
/// at 12 latches plus a band of smaller ones for density.
pub fn random_corpus() -> Vec<(String, String)> {
    let mut corpus = Vec::new();
    for seed in 0..140u64 {
        corpus.push((format!("rand12_{seed:03}"), random_aag(seed, 12)));
    }
    for seed in 1000..1060u64 {
        corpus.push((format!("rand5_{seed}"), random_aag(seed, 5)));
    }
    corpus
}
