use nalgebra::{DMatrix, DVector};

use super::SwarmError;
use crate::elm::{Activation, ElmArchitecture};

/// Layout of the flat position vector `[a (L·n) | b (L) | s (n) | cf (L)]`,
/// every entry stored in [0, 1]. `a` is row-major per neuron.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodingSpec {
    pub features: usize,
    pub hidden: usize,
}

impl EncodingSpec {
    pub fn new(features: usize, hidden: usize) -> Result<Self, SwarmError> {
        if features == 0 || hidden == 0 {
            return Err(SwarmError::InvalidConfig(format!(
                "encoding needs at least one feature and one neuron, got n = {features}, L = {hidden}"
            )));
        }
        Ok(Self { features, hidden })
    }

    pub fn dimension(&self) -> usize {
        self.hidden * self.features + 2 * self.hidden + self.features
    }

    pub fn weights(&self) -> std::ops::Range<usize> {
        0..self.hidden * self.features
    }

    pub fn biases(&self) -> std::ops::Range<usize> {
        let s = self.hidden * self.features;
        s..s + self.hidden
    }

    pub fn mask(&self) -> std::ops::Range<usize> {
        let s = self.biases().end;
        s..s + self.features
    }

    pub fn codes(&self) -> std::ops::Range<usize> {
        let s = self.mask().end;
        s..s + self.hidden
    }
}

/// A position mapped to its true values. The architecture only sees the
/// masked-in features, in their original order.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedParticle {
    pub architecture: ElmArchitecture,
    pub mask: Vec<bool>,
}

impl DecodedParticle {
    pub fn selected(&self) -> Vec<usize> {
        self.mask.iter().enumerate().filter(|(_, m)| **m).map(|(j, _)| j).collect()
    }
}

fn unit_to_weight(raw: f64) -> f64 {
    2.0 * raw - 1.0
}

fn code_of(raw: f64) -> u8 {
    ((raw * 3.0).floor() as u8).min(2)
}

/// Index of the largest value; the first one on ties.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Maps a position in [0,1]^D to an architecture and feature mask. Weights
/// and biases map affinely onto [−1, 1]; a feature is kept iff its raw
/// value is ≥ 0.5; activation codes are thirds of the unit interval. An
/// empty mask or an all-off hidden layer is repaired by switching on the
/// entry with the largest raw value.
pub fn decode_particle(position: &[f64], spec: &EncodingSpec) -> Result<DecodedParticle, SwarmError> {
    if position.len() != spec.dimension() {
        return Err(SwarmError::Domain(format!(
            "position has {} entries, encoding needs {}",
            position.len(),
            spec.dimension()
        )));
    }
    if let Some(v) = position.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(SwarmError::Domain(format!("position entry {v} outside [0, 1]")));
    }

    let raw_mask = &position[spec.mask()];
    let mut mask: Vec<bool> = raw_mask.iter().map(|r| *r >= 0.5).collect();
    if !mask.iter().any(|m| *m) {
        mask[argmax(raw_mask)] = true;
    }
    let raw_codes = &position[spec.codes()];
    let mut codes: Vec<u8> = raw_codes.iter().map(|r| code_of(*r)).collect();
    if codes.iter().all(|c| *c == 0) {
        codes[argmax(raw_codes)] = 1;
    }

    let selected: Vec<usize> = (0..spec.features).filter(|&j| mask[j]).collect();
    let a = &position[spec.weights()];
    let weights = DMatrix::from_fn(spec.hidden, selected.len(), |i, c| {
        unit_to_weight(a[i * spec.features + selected[c]])
    });
    let biases = DVector::from_iterator(spec.hidden, position[spec.biases()].iter().map(|r| unit_to_weight(*r)));
    let activations = codes
        .into_iter()
        .map(|c| Activation::from_code(c).expect("code is at most 2"))
        .collect();
    let architecture = ElmArchitecture::new(weights, biases, activations).map_err(|e| SwarmError::Domain(e.to_string()))?;
    Ok(DecodedParticle { architecture, mask })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec() -> EncodingSpec {
        EncodingSpec::new(3, 3).unwrap()
    }

    fn position(a: f64, b: f64, s: [f64; 3], cf: [f64; 3]) -> Vec<f64> {
        let mut p = vec![a; 9];
        p.extend([b; 3]);
        p.extend(s);
        p.extend(cf);
        p
    }

    #[test]
    fn layout() {
        let s = spec();
        assert_eq!(s.dimension(), 9 + 3 + 3 + 3);
        assert_eq!((s.biases(), s.mask(), s.codes()), (9..12, 12..15, 15..18));
    }

    #[test]
    fn decode_rules() {
        let d = decode_particle(&position(0.5, 1.0, [0.7, 0.2, 0.5], [0.1, 0.4, 0.9]), &spec()).unwrap();
        assert_eq!(d.mask, vec![true, false, true]);
        assert_eq!(d.selected(), vec![0, 2]);
        let codes: Vec<u8> = d.architecture.activations().iter().map(|a| a.code()).collect();
        assert_eq!(codes, vec![0, 1, 2]);
        assert!(d.architecture.input_weights().iter().all(|w| *w == 0.0));
        assert_eq!(d.architecture.input_weights().shape(), (3, 2));
        assert!(d.architecture.biases().iter().all(|b| *b == 1.0));
    }

    #[test]
    fn weights_follow_selected_columns() {
        let s = EncodingSpec::new(2, 1).unwrap();
        let d = decode_particle(&[0.0, 1.0, 0.5, 0.1, 0.9, 0.9], &s).unwrap();
        assert_eq!(d.mask, vec![false, true]);
        assert_eq!(d.architecture.input_weights()[(0, 0)], 1.0);
    }

    #[test]
    fn repairs() {
        let d = decode_particle(&position(0.5, 0.5, [0.1, 0.3, 0.2], [0.0, 0.2, 0.3]), &spec()).unwrap();
        assert_eq!(d.mask, vec![false, true, false]);
        let codes: Vec<u8> = d.architecture.activations().iter().map(|a| a.code()).collect();
        assert_eq!(codes, vec![0, 0, 1]);
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(decode_particle(&position(1.5, 0.5, [0.5; 3], [0.5; 3]), &spec()).is_err());
        assert!(decode_particle(&[0.5; 4], &spec()).is_err());
    }

    proptest! {
        #[test]
        fn decode_is_total(raw in proptest::collection::vec(0.0f64..=1.0, 18)) {
            let d = decode_particle(&raw, &spec()).unwrap();
            prop_assert!(d.mask.iter().any(|m| *m));
            prop_assert!(d.architecture.effective_hidden() >= 1);
            prop_assert!(d.architecture.input_weights().iter().all(|w| (-1.0..=1.0).contains(w)));
        }
    }
}
