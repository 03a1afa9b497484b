use std::fmt;

/// Turbine-presence bit vector over the candidate positions of a layout.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Genome(Vec<bool>);

impl Genome {
    pub fn new(bits: Vec<bool>) -> Self {
        Genome(bits)
    }

    pub fn zeros(len: usize) -> Self {
        Genome(vec![false; len])
    }

    pub fn ones(len: usize) -> Self {
        Genome(vec![true; len])
    }

    /// Genome of length `len` with exactly the listed positions set.
    pub fn from_indices(len: usize, active: &[usize]) -> Self {
        let mut bits = vec![false; len];
        for &i in active {
            bits[i] = true;
        }
        Genome(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub(crate) fn bits_mut(&mut self) -> &mut [bool] {
        &mut self.0
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn active_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn hamming(&self, other: &Genome) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl fmt::Debug for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Genome(")?;
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Genome {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(format!("invalid genome character `{other}`")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Genome)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let g: Genome = "10110".parse().unwrap();
        assert_eq!(g.count_ones(), 3);
        assert_eq!(g.active_indices().collect::<Vec<_>>(), vec![0, 2, 3]);
        assert_eq!(g.to_string(), "10110");
        assert!("10a".parse::<Genome>().is_err());
    }

    #[test]
    fn hamming_counts_differences() {
        let a: Genome = "1111".parse().unwrap();
        let b: Genome = "1001".parse().unwrap();
        assert_eq!(a.hamming(&b), 2);
        assert_eq!(Genome::from_indices(4, &[0, 3]), b);
    }
}
