//! Weighted Pauli sums as hash maps with merging insertion, truncation,
//! norms, and lossless text/JSON serialization.

use crate::bits::PauliBits;
use crate::coeff::{Coeff, Real};
use crate::pauli::PauliWord;
use crate::Error;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

/// Truncation rules applied after each gate of a propagation.
///
/// Absent optional fields disable that rule. The counter thresholds
/// (`max_freq`, `max_sins`, `max_pathweight`) require tracked coefficients.
pub struct TruncationConfig<B: PauliBits, T: Real> {
    pub min_abs_coeff: T,
    pub max_weight: Option<u32>,
    pub max_freq: Option<u32>,
    pub max_sins: Option<u32>,
    pub max_pathweight: Option<u32>,
    /// Extra predicate: entries for which it returns true are discarded.
    pub custom: Option<Arc<dyn Fn(&PauliWord<B>, T) -> bool + Send + Sync>>,
}

impl<B: PauliBits, T: Real> Default for TruncationConfig<B, T> {
    fn default() -> Self {
        TruncationConfig {
            min_abs_coeff: T::from_f64_lossy(1e-10),
            max_weight: None,
            max_freq: None,
            max_sins: None,
            max_pathweight: None,
            custom: None,
        }
    }
}

impl<B: PauliBits, T: Real> Clone for TruncationConfig<B, T> {
    fn clone(&self) -> Self {
        TruncationConfig {
            min_abs_coeff: self.min_abs_coeff,
            max_weight: self.max_weight,
            max_freq: self.max_freq,
            max_sins: self.max_sins,
            max_pathweight: self.max_pathweight,
            custom: self.custom.clone(),
        }
    }
}

impl<B: PauliBits, T: Real> fmt::Debug for TruncationConfig<B, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TruncationConfig")
            .field("min_abs_coeff", &self.min_abs_coeff)
            .field("max_weight", &self.max_weight)
            .field("max_freq", &self.max_freq)
            .field("max_sins", &self.max_sins)
            .field("max_pathweight", &self.max_pathweight)
            .field("custom", &self.custom.is_some())
            .finish()
    }
}

impl<B: PauliBits, T: Real> TruncationConfig<B, T> {
    /// Config with every rule disabled, including the coefficient floor.
    pub fn none() -> Self {
        TruncationConfig {
            min_abs_coeff: T::zero(),
            ..Default::default()
        }
    }

    pub fn with_min_abs_coeff(mut self, v: T) -> Self {
        self.min_abs_coeff = v;
        self
    }

    pub fn with_max_weight(mut self, v: u32) -> Self {
        self.max_weight = Some(v);
        self
    }

    pub fn with_max_freq(mut self, v: u32) -> Self {
        self.max_freq = Some(v);
        self
    }

    pub fn with_max_sins(mut self, v: u32) -> Self {
        self.max_sins = Some(v);
        self
    }

    pub fn with_max_pathweight(mut self, v: u32) -> Self {
        self.max_pathweight = Some(v);
        self
    }

    pub fn has_counter_rules(&self) -> bool {
        self.max_freq.is_some() || self.max_sins.is_some() || self.max_pathweight.is_some()
    }

    /// Whether any rule can remove anything at all.
    pub fn is_trivial(&self) -> bool {
        self.min_abs_coeff <= T::zero()
            && self.max_weight.is_none()
            && !self.has_counter_rules()
            && self.custom.is_none()
    }
}

/// Norm summary of a sum.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Norms<T> {
    pub l1: T,
    pub l2sq: T,
    pub nterms: usize,
}

/// Map from Pauli word to coefficient, all keys sharing one qubit count.
#[derive(Clone, Debug)]
pub struct PauliSum<B: PauliBits, T: Real, C: Coeff<T> = T> {
    nqubits: usize,
    terms: HashMap<PauliWord<B>, C>,
    _scalar: std::marker::PhantomData<T>,
}

impl<B: PauliBits, T: Real, C: Coeff<T>> PauliSum<B, T, C> {
    pub fn new(nqubits: usize) -> Self {
        PauliSum {
            nqubits,
            terms: HashMap::new(),
            _scalar: std::marker::PhantomData,
        }
    }

    pub fn with_capacity(nqubits: usize, capacity: usize) -> Self {
        PauliSum {
            nqubits,
            terms: HashMap::with_capacity(capacity),
            _scalar: std::marker::PhantomData,
        }
    }

    /// Single weighted word.
    pub fn single(word: PauliWord<B>, coeff: C) -> Self {
        let mut s = PauliSum::new(word.nqubits());
        s.add(word, coeff).expect("matching nqubits");
        s
    }

    pub fn from_terms<I>(nqubits: usize, terms: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (PauliWord<B>, C)>,
    {
        let mut s = PauliSum::new(nqubits);
        for (w, c) in terms {
            s.add(w, c)?;
        }
        Ok(s)
    }

    pub fn nqubits(&self) -> usize {
        self.nqubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliWord<B>, &C)> {
        self.terms.iter()
    }

    pub fn get(&self, w: &PauliWord<B>) -> Option<&C> {
        self.terms.get(w)
    }

    /// Stored coefficient value, or zero if absent.
    pub fn get_coeff(&self, w: &PauliWord<B>) -> T {
        self.terms.get(w).map(|c| c.value()).unwrap_or_else(T::zero)
    }

    /// Merge a coefficient into the entry at `w`; exact-zero results evict
    /// the key.
    pub fn add(&mut self, w: PauliWord<B>, c: C) -> Result<(), Error> {
        if w.nqubits() != self.nqubits {
            return Err(Error::NQubitsMismatch(w.nqubits(), self.nqubits));
        }
        match self.terms.entry(w) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                let merged = e.get().merge(&c);
                if merged.value() == T::zero() {
                    e.remove();
                } else {
                    e.insert(merged);
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                if c.value() != T::zero() {
                    e.insert(c);
                }
            }
        }
        Ok(())
    }

    /// Overwrite the entry at `w` without merging.
    pub fn set(&mut self, w: PauliWord<B>, c: C) -> Result<(), Error> {
        if w.nqubits() != self.nqubits {
            return Err(Error::NQubitsMismatch(w.nqubits(), self.nqubits));
        }
        if c.value() == T::zero() {
            self.terms.remove(&w);
        } else {
            self.terms.insert(w, c);
        }
        Ok(())
    }

    pub fn remove(&mut self, w: &PauliWord<B>) -> Option<C> {
        self.terms.remove(w)
    }

    pub(crate) fn map_mut(&mut self) -> &mut HashMap<PauliWord<B>, C> {
        &mut self.terms
    }

    pub(crate) fn into_map(self) -> HashMap<PauliWord<B>, C> {
        self.terms
    }

    /// Drain `other` into `self`, merging coefficients. The caller is
    /// expected to keep the larger map as `self`.
    pub fn absorb(&mut self, other: PauliSum<B, T, C>) -> Result<(), Error> {
        if other.nqubits != self.nqubits {
            return Err(Error::NQubitsMismatch(other.nqubits, self.nqubits));
        }
        for (w, c) in other.terms {
            self.add(w, c)?;
        }
        Ok(())
    }

    /// Sum over shared keys of the coefficient products, iterating the
    /// smaller map.
    pub fn scalar_product(&self, other: &Self) -> Result<T, Error> {
        if other.nqubits != self.nqubits {
            return Err(Error::NQubitsMismatch(self.nqubits, other.nqubits));
        }
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = T::zero();
        for (w, c) in small.iter() {
            if let Some(d) = large.get(w) {
                acc += c.value() * d.value();
            }
        }
        Ok(acc)
    }

    pub fn norms(&self) -> Norms<T> {
        let mut l1 = T::zero();
        let mut l2sq = T::zero();
        for c in self.terms.values() {
            let v = c.value();
            l1 += v.abs();
            l2sq += v * v;
        }
        Norms {
            l1,
            l2sq,
            nterms: self.terms.len(),
        }
    }

    /// Multiply every coefficient by a scalar.
    pub fn scale(&mut self, factor: T) {
        for c in self.terms.values_mut() {
            *c = c.scale(factor);
        }
    }

    /// Remove entries failing the config; returns (discarded l1, discarded
    /// l2 squared).
    pub fn truncate(&mut self, cfg: &TruncationConfig<B, T>) -> Result<(T, T), Error> {
        if cfg.has_counter_rules() && !C::TRACKED {
            return Err(Error::TrackingRequired);
        }
        if cfg.is_trivial() {
            return Ok((T::zero(), T::zero()));
        }
        let mut dropped_l1 = T::zero();
        let mut dropped_l2sq = T::zero();
        self.terms.retain(|w, c| {
            let v = c.value();
            let mut drop = v.abs() < cfg.min_abs_coeff;
            if !drop {
                if let Some(mw) = cfg.max_weight {
                    drop = w.weight() > mw;
                }
            }
            if !drop && cfg.has_counter_rules() {
                let ctr = c.counters().expect("tracked coefficients");
                drop = cfg.max_freq.is_some_and(|m| ctr.ncos + ctr.nsin > m)
                    || cfg.max_sins.is_some_and(|m| ctr.nsin > m)
                    || cfg.max_pathweight.is_some_and(|m| ctr.pathweight > m);
            }
            if !drop {
                if let Some(pred) = &cfg.custom {
                    drop = pred(w, v);
                }
            }
            if drop {
                dropped_l1 += v.abs();
                dropped_l2sq += v * v;
                false
            } else {
                true
            }
        });
        Ok((dropped_l1, dropped_l2sq))
    }

    /// Entries sorted by the numeric value of the word, for deterministic
    /// output.
    pub fn sorted_terms(&self) -> Vec<(PauliWord<B>, C)> {
        let mut v: Vec<_> = self.terms.iter().map(|(w, c)| (*w, *c)).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    /// Forget counters, keeping plain values.
    pub fn to_plain(&self) -> PauliSum<B, T> {
        let mut s = PauliSum::with_capacity(self.nqubits, self.len());
        for (w, c) in self.iter() {
            s.set(*w, c.value()).expect("matching nqubits");
        }
        s
    }
}

impl<B: PauliBits, T: Real> PauliSum<B, T> {
    /// Two-column text form: `<symbols> <coefficient>` per line, sorted by
    /// word value, 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (w, c) in self.sorted_terms() {
            out.push_str(&format!("{} {:.16e}\n", w, c.to_f64_lossy()));
        }
        out
    }

    pub fn from_text(nqubits: usize, text: &str) -> Result<Self, Error> {
        let mut s = PauliSum::new(nqubits);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let word = parts
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing word", lineno + 1)))?;
            let coeff = parts
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing coefficient", lineno + 1)))?;
            let w = PauliWord::<B>::parse(word)?;
            if w.nqubits() != nqubits {
                return Err(Error::NQubitsMismatch(w.nqubits(), nqubits));
            }
            let c: f64 = coeff
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad coefficient '{coeff}'", lineno + 1)))?;
            s.add(w, T::from_f64_lossy(c))?;
        }
        Ok(s)
    }

    /// Structured (JSON) form mirroring the text dump.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .sorted_terms()
            .into_iter()
            .map(|(w, c)| {
                serde_json::json!({
                    "pauli": w.to_string(),
                    "coeff": c.to_f64_lossy(),
                })
            })
            .collect();
        serde_json::json!({ "nqubits": self.nqubits, "terms": terms })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, Error> {
        let nqubits = value
            .get("nqubits")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::Parse("missing nqubits".into()))? as usize;
        let mut s = PauliSum::new(nqubits);
        let terms = value
            .get("terms")
            .and_then(|v| v.as_array())
            .ok_or_else(|| Error::Parse("missing terms array".into()))?;
        for t in terms {
            let word = t
                .get("pauli")
                .and_then(|v| v.as_str())
                .ok_or_else(|| Error::Parse("term missing pauli".into()))?;
            let coeff = t
                .get("coeff")
                .and_then(|v| v.as_f64())
                .ok_or_else(|| Error::Parse("term missing coeff".into()))?;
            let w = PauliWord::<B>::parse(word)?;
            if w.nqubits() != nqubits {
                return Err(Error::NQubitsMismatch(w.nqubits(), nqubits));
            }
            s.add(w, T::from_f64_lossy(coeff))?;
        }
        Ok(s)
    }
}
