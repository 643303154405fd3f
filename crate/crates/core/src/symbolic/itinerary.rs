//! Itineraries through the cells of a Cantor node and their inversion.

use crate::error::{Error, Result};
use crate::interval_set::Interval;
use crate::map::UnimodalMap;
use crate::tower::{ItineraryPartition, Node};

use super::sft::{backward_dense_tail, covering_word, symbol, BiSequence, SftDescriptor};

const CELL_TOL: f64 = 1e-9;

fn digits(w: &str, alphabet: usize) -> Result<Vec<usize>> {
    w.chars()
        .map(|c| c.to_digit(10).map(|d| d as usize).filter(|&d| d < alphabet))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Inadmissible(w.to_string()))
}

/// First `n` symbols of the itinerary of `p` under `g = f^r`.
pub fn itinerary(part: &ItineraryPartition, m: &UnimodalMap, p: f64, n: usize) -> Result<String> {
    let mut x = p;
    let mut out = String::with_capacity(n);
    for step in 0..n {
        let cell = part.cell_of(x, CELL_TOL).ok_or(Error::Escape { step })?;
        out.push(char::from_digit(cell as u32, 10).unwrap());
        x = part.g(m, x);
    }
    Ok(out)
}

/// `I_w`: points whose first `|w|` symbols are `w`.
pub fn invert_itinerary(part: &ItineraryPartition, m: &UnimodalMap, w: &str) -> Result<Interval> {
    let syms = digits(w, part.cells.len())?;
    let Some((&last, rest)) = syms.split_last() else {
        return Err(Error::Inadmissible(String::new()));
    };
    let mut cur = part.cells[last];
    for &s in rest.iter().rev() {
        cur = part
            .pull_into_cell(m, s, cur, 0.0)
            .filter(|j| j.len() > 1e-13)
            .ok_or_else(|| Error::Inadmissible(w.to_string()))?;
    }
    Ok(cur)
}

/// Minimal forbidden words up to `word_len`, inferred from empty cylinders.
pub fn sft_from_node(node: &Node, m: &UnimodalMap, word_len: usize) -> Result<SftDescriptor> {
    let cs = node.cantor().ok_or(Error::NotCantor(node.index))?;
    let part = &cs.partition;
    let k = part.cells.len().min(10);
    let mut admissible: Vec<String> = vec![String::new()];
    let mut forbidden: Vec<String> = vec![];
    let is_adm = |w: &str| invert_itinerary(part, m, w).is_ok();
    for len in 1..=word_len.max(1) {
        let mut next = vec![];
        for w in &admissible {
            for s in 0..k {
                let v = format!("{w}{s}");
                if forbidden.iter().any(|f| v.contains(f.as_str())) {
                    continue;
                }
                if is_adm(&v) {
                    next.push(v);
                } else if len == 1 || is_adm(&v[1..]) {
                    forbidden.push(v);
                }
            }
        }
        admissible = next;
    }
    let refs: Vec<&str> = forbidden.iter().map(String::as_str).collect();
    Ok(SftDescriptor::new(k, &refs))
}

/// Admissible words whose cylinders have width at most `eps`, refined only
/// where needed; together they cover the invariant set.
fn fine_words(part: &ItineraryPartition, m: &UnimodalMap, sft: &SftDescriptor, eps: f64) -> Vec<String> {
    const MAX_LEN: usize = 40;
    let mut out = Vec::new();
    let mut stack: Vec<String> = (0..sft.alphabet_size).map(|s| symbol(s).to_string()).collect();
    while let Some(w) = stack.pop() {
        let Ok(i) = invert_itinerary(part, m, &w) else { continue };
        if i.len() <= eps || w.len() >= MAX_LEN {
            out.push(w);
            continue;
        }
        for s in 0..sft.alphabet_size {
            let v = format!("{w}{}", symbol(s));
            if sft.is_admissible(&v) {
                stack.push(v);
            }
        }
    }
    out.sort();
    out
}

/// Backward orbit of `x` (nearest preimage first) whose itinerary is a
/// backward-dense tail; `depth` bounds the number of steps of `g = f^r`.
pub fn backward_dense_bitrajectory(node: &Node, m: &UnimodalMap, x: f64, depth: usize) -> Result<Vec<f64>> {
    let cs = node.cantor().ok_or(Error::NotCantor(node.index))?;
    let part = &cs.partition;
    let sft = sft_from_node(node, m, 4)?;
    let head = itinerary(part, m, x, 6)?;
    // Shrink the cylinder width bound while the covering tail fits in `depth` steps.
    let mut base = backward_dense_tail(&sft, &head, 1)?;
    let mut eps = (part.domain.hi - part.domain.lo) / 2.0;
    while eps > 1e-6 {
        let words = fine_words(part, m, &sft, eps);
        let Some(cover) = covering_word(&sft, &words) else { break };
        let Some(u) = sft.connecting_word(&cover, &head) else { break };
        if cover.len() + u.len() > depth {
            break;
        }
        base = BiSequence { tail: cover + &u, head: head.clone() };
        eps *= 0.8;
    }
    let mut tail = base.tail.clone();
    while tail.len() < depth {
        let u = sft.connecting_word(&base.tail, &tail).ok_or(Error::Reducible)?;
        tail = format!("{}{u}{tail}", base.tail);
    }
    let syms = digits(&tail, part.cells.len())?;
    let mut out = Vec::with_capacity(syms.len() * part.r);
    let mut y = x;
    for &s in syms.iter().rev().take(depth) {
        let prev = part.inverse_on_cell(m, s, y, 1e-9).ok_or(Error::Escape { step: out.len() })?;
        // Intermediate f-preimages between prev and y.
        let mut chain = Vec::with_capacity(part.r);
        let mut z = prev;
        for _ in 1..part.r {
            z = m.eval(z);
            chain.push(z);
        }
        out.extend(chain.into_iter().rev());
        out.push(prev);
        y = prev;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Settings;
    use crate::interval_set::IntervalSet;
    use crate::orbit::find_cycles;
    use crate::tower::{build_tower, CantorSupport, Tower};

    fn setup() -> (UnimodalMap, Tower) {
        let m = UnimodalMap::logistic(3.84).unwrap();
        let t = build_tower(&m, &Settings::default()).unwrap();
        (m, t)
    }

    #[test]
    fn fixed_point_and_cycles() {
        let (m, t) = setup();
        let part = &t.nodes[1].cantor().unwrap().partition;
        let xbar = 1.0 - 1.0 / 3.84;
        assert_eq!(itinerary(part, &m, xbar, 6).unwrap(), "111111");
        let two = &find_cycles(&m, 2, &Settings::default()).unwrap()[0];
        assert_eq!(itinerary(part, &m, two.points[0], 6).unwrap(), "010101");
        let p1 = t.nodes[1].region.as_ref().unwrap().gamma.points.iter().copied().find(|&p| {
            (p - 0.5).abs() == t.nodes[1].region.as_ref().unwrap().gamma.points.iter().map(|q| (q - 0.5).abs()).fold(1.0, f64::min)
        });
        assert_eq!(itinerary(part, &m, p1.unwrap(), 6).unwrap(), "110110");
    }

    #[test]
    fn escape_reported() {
        let (m, t) = setup();
        let part = &t.nodes[1].cantor().unwrap().partition;
        assert!(matches!(itinerary(part, &m, 0.5, 4), Err(Error::Escape { step: 0 })));
    }

    #[test]
    fn forbidden_words_golden_mean() {
        let (m, t) = setup();
        let sft = sft_from_node(&t.nodes[1], &m, 4).unwrap();
        assert_eq!(sft.forbidden_words, vec!["00".to_string()]);
        assert!(matches!(sft_from_node(&t.nodes[2], &m, 4), Err(Error::NotCantor(2))));
    }

    #[test]
    fn inversion_examples() {
        let (m, t) = setup();
        let part = &t.nodes[1].cantor().unwrap().partition;
        let i = invert_itinerary(part, &m, "11111111").unwrap();
        assert!(i.len() < 1e-2 && i.contains(1.0 - 1.0 / 3.84));
        assert!(invert_itinerary(part, &m, "00").is_err());
        let two = &find_cycles(&m, 2, &Settings::default()).unwrap()[0];
        let i = invert_itinerary(part, &m, "10101010").unwrap();
        assert!(i.contains(two.points[1]) && two.points[1] > m.c);
    }

    #[test]
    fn shift_equivariance_and_shrinking() {
        let (m, t) = setup();
        let part = &t.nodes[1].cantor().unwrap().partition;
        let sft = sft_from_node(&t.nodes[1], &m, 4).unwrap();
        for w in sft.admissible_words(7) {
            let i = invert_itinerary(part, &m, &w).unwrap();
            let x = i.mid();
            let s = itinerary(part, &m, x, 7).unwrap();
            assert_eq!(s, w);
            assert_eq!(itinerary(part, &m, m.eval(x), 6).unwrap(), s[1..]);
            let longer = invert_itinerary(part, &m, &format!("{w}1")).unwrap();
            assert!(longer.len() <= i.len());
        }
    }

    #[test]
    fn dense_backward_orbit() {
        let (m, t) = setup();
        let node = &t.nodes[1];
        let approx6 = CantorSupport::build(&m, node.cantor().unwrap().partition.clone(), 6, 1e-9);
        for x in [1.0 - 1.0 / 3.84, node.region.as_ref().unwrap().j1().hi] {
            let orbit = backward_dense_bitrajectory(node, &m, x, 200).unwrap();
            assert_eq!(orbit.len(), 200);
            let cloud = IntervalSet::points(orbit.iter().copied());
            let d = approx6.set.hausdorff(&cloud);
            assert!(d < 1e-2, "hausdorff {d}");
            // consecutive entries are genuine preimages
            assert!((m.eval(orbit[0]) - x).abs() < 1e-9);
            for w in orbit.windows(2) {
                assert!((m.eval(w[1]) - w[0]).abs() < 1e-9);
            }
        }
    }
}
