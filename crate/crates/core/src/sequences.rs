//! Combinatorics of the factor-chain expansion: hilly words, the sequence
//! classes indexing the intermediate polynomials, the polynomial attached
//! to a sequence, and the cross-checks that compare the mutation pipeline
//! against the independent enumeration.

use std::collections::BTreeSet;

use crate::engine::{ComponentOutcome, IdentityCheck, VerificationReport};
use crate::error::Error;
use crate::laurent::{ExpVec, LaurentPoly};
use crate::toric::{NefPartition, ToricModel};

/// A word is hilly when every pair of equal letters has a strictly larger
/// letter between them. The empty word is hilly.
pub fn is_hilly(word: &[usize]) -> bool {
    for i in 0..word.len() {
        for j in i + 1..word.len() {
            if word[i] == word[j] && !word[i + 1..j].iter().any(|&x| x > word[i]) {
                return false;
            }
        }
    }
    true
}

/// All hilly words over the alphabet {1..=max_letter}, built from the
/// structural recursion: the maximal letter of a nonempty hilly word occurs
/// exactly once and splits it into two hilly words over smaller letters.
/// Results are sorted; lengths are bounded by 2^max_letter - 1.
pub fn hilly_words(max_letter: usize) -> Vec<Vec<usize>> {
    let mut by_alphabet: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new()]];
    for m in 1..=max_letter {
        let mut words: Vec<Vec<usize>> = vec![Vec::new()];
        for top in 1..=m {
            for left in &by_alphabet[top - 1] {
                for right in &by_alphabet[top - 1] {
                    let mut w = left.clone();
                    w.push(top);
                    w.extend_from_slice(right);
                    words.push(w);
                }
            }
        }
        words.sort();
        words.dedup();
        by_alphabet.push(words);
    }
    by_alphabet.pop().unwrap()
}

/// Membership predicate for the sequence class M(i, j) over labels
/// {1..=universe_max}: first letter i, middle letters at most j forming a
/// hilly word, last letter greater than j.
pub fn in_class_m(word: &[usize], i: usize, j: usize, universe_max: usize) -> bool {
    if word.len() < 2 {
        return false;
    }
    let last = *word.last().unwrap();
    word[0] == i
        && last > j
        && last <= universe_max
        && word[1..word.len() - 1]
            .iter()
            .all(|&x| x >= 1 && x <= j)
        && is_hilly(&word[1..word.len() - 1])
}

/// Complete enumeration of M(i, j) over labels {1..=universe_max}, sorted.
pub fn enumerate_m(i: usize, j: usize, universe_max: usize) -> Vec<Vec<usize>> {
    assert!(j < i, "class M(i, j) requires j < i");
    let middles = hilly_words(j);
    let mut out = Vec::new();
    for middle in &middles {
        for last in j + 1..=universe_max {
            let mut w = Vec::with_capacity(middle.len() + 2);
            w.push(i);
            w.extend_from_slice(middle);
            w.push(last);
            out.push(w);
        }
    }
    out.sort();
    out
}

/// Exhaustive-search oracle for M(i, j): depth-first search over all words
/// whose middles have only hilly prefixes, checking the full membership
/// predicate on every candidate. Independent of the structural recursion
/// behind `enumerate_m`; pruning is sound because a non-hilly prefix stays
/// non-hilly under extension.
pub fn search_m(i: usize, j: usize, universe_max: usize) -> Vec<Vec<usize>> {
    let bound = (1usize << j).saturating_sub(1);
    let mut out = Vec::new();
    let mut middle: Vec<usize> = Vec::new();
    fn rec(
        middle: &mut Vec<usize>,
        bound: usize,
        i: usize,
        j: usize,
        universe_max: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        for last in 1..=universe_max {
            let mut w = Vec::with_capacity(middle.len() + 2);
            w.push(i);
            w.extend_from_slice(middle);
            w.push(last);
            if in_class_m(&w, i, j, universe_max) {
                out.push(w);
            }
        }
        if middle.len() == bound {
            return;
        }
        for next in 1..=j {
            middle.push(next);
            if is_hilly(middle) {
                rec(middle, bound, i, j, universe_max, out);
            }
            middle.pop();
        }
    }
    rec(&mut middle, bound, i, j, universe_max, &mut out);
    out.sort();
    out
}

/// Literal brute force over every word of middle length up to the bound,
/// with no pruning. Exponential; intended for small alphabets only.
pub fn brute_force_m(i: usize, j: usize, universe_max: usize) -> Vec<Vec<usize>> {
    brute_force_m_with_cap(i, j, universe_max, (1usize << j).saturating_sub(1))
}

/// Brute force with an explicit middle-length cap, for alphabets whose
/// full word space is out of reach.
pub fn brute_force_m_with_cap(
    i: usize,
    j: usize,
    universe_max: usize,
    cap: usize,
) -> Vec<Vec<usize>> {
    let bound = cap.min((1usize << j).saturating_sub(1));
    let mut out = Vec::new();
    for len in 0..=bound {
        let mut word = vec![1usize; len];
        loop {
            for last in 1..=universe_max {
                let mut w = Vec::with_capacity(len + 2);
                w.push(i);
                w.extend_from_slice(&word);
                w.push(last);
                if in_class_m(&w, i, j, universe_max) {
                    out.push(w);
                }
            }
            // odometer over {1..=j}^len
            let mut pos = len;
            loop {
                if pos == 0 {
                    break;
                }
                if word[pos - 1] < j {
                    word[pos - 1] += 1;
                    break;
                }
                word[pos - 1] = 1;
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
        }
    }
    out.sort();
    out
}

/// Everything needed to evaluate sequence polynomials for one
/// communicating set: the model, the two partitions, and the component's
/// member labels and plus vectors.
pub struct SequenceContext<'a> {
    pub model: &'a ToricModel,
    pub first: &'a NefPartition,
    pub second: &'a NefPartition,
    pub members: &'a [usize],
    pub u_plus: &'a [ExpVec],
}

impl<'a> SequenceContext<'a> {
    pub fn from_component(
        model: &'a ToricModel,
        first: &'a NefPartition,
        second: &'a NefPartition,
        outcome: &'a ComponentOutcome,
    ) -> Self {
        SequenceContext {
            model,
            first,
            second,
            members: &outcome.data.members,
            u_plus: &outcome.data.u_plus,
        }
    }

    /// Bracket sum over the crossing of local member a against local
    /// member b on the primed side, without its monomial prefix.
    fn bracket_sum(&self, a: usize, b: usize) -> Result<LaurentPoly, Error> {
        let ga = self.first.part(self.members[a - 1]);
        let gb = self.second.part(self.members[b - 1]);
        let crossing: BTreeSet<usize> = ga.intersection(gb).copied().collect();
        self.model.partition_sum(&crossing)
    }

    /// The polynomial attached to a sequence of local labels: the product
    /// of the bracket sums along consecutive pairs, divided by the plus
    /// monomials of the interior labels. The leading prefix cancels against
    /// the first bracket, so only interior labels need plus vectors.
    pub fn sequence_poly(&self, word: &[usize]) -> Result<LaurentPoly, Error> {
        assert!(word.len() >= 2, "a sequence polynomial needs two labels");
        let n = self.model.rank();
        let mut poly = LaurentPoly::one(n);
        for pair in word.windows(2) {
            poly = poly.mul(&self.bracket_sum(pair[0], pair[1])?);
            if poly.is_zero() {
                return Ok(poly);
            }
        }
        let mut shift = ExpVec::zero(n);
        for &a in &word[1..word.len() - 1] {
            let u = self
                .u_plus
                .get(a - 1)
                .ok_or_else(|| Error::Internal(format!("no plus vector for label {a}")))?;
            shift = shift.add(u);
        }
        Ok(poly.shift(&shift.neg()))
    }

    /// Sum of sequence polynomials over an enumerated class.
    pub fn class_sum(&self, words: &[Vec<usize>]) -> Result<LaurentPoly, Error> {
        let mut acc = LaurentPoly::zero(self.model.rank());
        for w in words {
            acc = acc.add(&self.sequence_poly(w)?);
        }
        Ok(acc)
    }
}

/// Compare the mutation pipeline of a component against the independent
/// sequence enumeration:
/// - every intermediate snapshot equals the sum over its sequence class,
///   each sequence contributing exactly once;
/// - after the full chain, each mutated member equals its plus monomial
///   plus the closed-loop sequences;
/// - each factor equals its shifted open-ended class sum;
/// - snapshots stabilize once their own mutation has been applied;
/// - the enumerator agrees with the exhaustive search oracle.
pub fn crosscheck_component(
    ctx: &SequenceContext<'_>,
    outcome: &ComponentOutcome,
) -> Result<VerificationReport, Error> {
    let mut report = VerificationReport::default();
    let l = outcome.data.chain_length();
    let size = l + 1;

    let mut push = |name: String, lhs: &LaurentPoly, rhs: &LaurentPoly| {
        report.checks.push(IdentityCheck {
            name,
            passed: lhs == rhs,
            lhs: lhs.canonical_text(),
            rhs: rhs.canonical_text(),
        });
    };

    for i in 1..=size {
        for j in 0..i.min(l + 1) {
            if j > l {
                continue;
            }
            let words = enumerate_m(i, j, size);
            let oracle = search_m(i, j, size);
            if words != oracle {
                return Err(Error::Internal(format!(
                    "sequence enumeration disagrees with search at ({i}, {j})"
                )));
            }
            let unique: BTreeSet<&Vec<usize>> = words.iter().collect();
            if unique.len() != words.len() {
                return Err(Error::Internal(format!(
                    "sequence enumeration repeats a word at ({i}, {j})"
                )));
            }
            for w in &words {
                if !in_class_m(w, i, j, size) {
                    return Err(Error::Internal(format!(
                        "enumerated word {w:?} fails its own membership predicate"
                    )));
                }
            }
            let sum = ctx.class_sum(&words)?;
            push(
                format!("snapshot-{i}-after-{j}"),
                outcome.chain.snapshot(j, i - 1),
                &sum,
            );
        }
    }

    // after the whole chain, a mutated member is its plus monomial plus the
    // sequences returning to it
    for i in 1..=l {
        let closed: Vec<Vec<usize>> = enumerate_m(i, i - 1, size)
            .into_iter()
            .filter(|w| *w.last().unwrap() == i)
            .collect();
        let expected = LaurentPoly::monomial(ctx.u_plus[i - 1].clone(), num_traits::One::one())
            .add(&ctx.class_sum(&closed)?);
        push(
            format!("final-snapshot-{i}"),
            outcome.chain.snapshot(l, i - 1),
            &expected,
        );

        let open: Vec<Vec<usize>> = enumerate_m(i, i - 1, size)
            .into_iter()
            .filter(|w| *w.last().unwrap() > i)
            .collect();
        let expected_factor = ctx.class_sum(&open)?.shift(&ctx.u_plus[i - 1].neg());
        push(
            format!("factor-{i}"),
            &outcome.chain.factors[i - 1],
            &expected_factor,
        );

        // stabilization: later mutations leave the member unchanged
        for j in i..=l {
            push(
                format!("stable-{i}-after-{j}"),
                outcome.chain.snapshot(j, i - 1),
                outcome.chain.snapshot(i, i - 1),
            );
        }
    }

    Ok(report)
}

/// Exhaustively confirm that reversal preserves hillyness for all words up
/// to the given length over alphabets up to the given size.
pub fn reversal_closure_holds(max_len: usize, max_letter: usize) -> bool {
    for alphabet in 1..=max_letter {
        for len in 0..=max_len {
            let mut word = vec![1usize; len];
            loop {
                let mut rev = word.clone();
                rev.reverse();
                if is_hilly(&word) != is_hilly(&rev) {
                    return false;
                }
                let mut pos = len;
                loop {
                    if pos == 0 {
                        break;
                    }
                    if word[pos - 1] < alphabet {
                        word[pos - 1] += 1;
                        break;
                    }
                    word[pos - 1] = 1;
                    pos -= 1;
                }
                if pos == 0 {
                    break;
                }
            }
        }
    }
    true
}
