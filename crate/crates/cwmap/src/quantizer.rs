//! Linear weight quantization: k evenly spaced centers spanning the weight
//! range, endpoint-inclusive so the extreme weights survive exactly.

use crate::error::{Error, Result};

/// The quantization table: k representative centers plus the range they
/// were fit on. Index width is `ceil(log2(max(k, 2)))` bits.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizerTable {
    centers: Vec<f64>,
    min_w: f64,
    max_w: f64,
}

impl QuantizerTable {
    /// Fits k centers evenly over `[min, max]` of the weights. For k >= 2
    /// the centers sit at `min + i * step` with `step = (max - min)/(k-1)`;
    /// a single center sits at the midpoint. Equal min and max collapse
    /// every center onto that value.
    pub fn fit_linear<I>(weights: I, k: u32) -> Result<QuantizerTable>
    where
        I: IntoIterator<Item = f64>,
    {
        if k == 0 {
            return Err(Error::invalid("quantizer cluster count k must be >= 1"));
        }
        let mut min_w = f64::INFINITY;
        let mut max_w = f64::NEG_INFINITY;
        let mut n = 0usize;
        for w in weights {
            if !w.is_finite() {
                return Err(Error::invalid(format!("non-finite weight {w}")));
            }
            min_w = min_w.min(w);
            max_w = max_w.max(w);
            n += 1;
        }
        if n == 0 {
            return Err(Error::empty("cannot fit a quantizer on no weights"));
        }

        let centers = if k == 1 {
            vec![(min_w + max_w) / 2.0]
        } else {
            let step = (max_w - min_w) / (k - 1) as f64;
            let mut c: Vec<f64> = (0..k).map(|i| min_w + i as f64 * step).collect();
            c[0] = min_w;
            c[k as usize - 1] = max_w;
            c
        };
        Ok(QuantizerTable { centers, min_w, max_w })
    }

    /// Rebuilds a table from serialized centers.
    pub(crate) fn from_centers(centers: Vec<f64>) -> Result<QuantizerTable> {
        if centers.is_empty() {
            return Err(Error::Corrupt("quantizer table has no centers".into()));
        }
        if centers.iter().any(|c| !c.is_finite()) {
            return Err(Error::Corrupt("quantizer table has non-finite centers".into()));
        }
        if centers.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Corrupt("quantizer centers are not sorted".into()));
        }
        let min_w = centers[0];
        let max_w = *centers.last().unwrap();
        Ok(QuantizerTable { centers, min_w, max_w })
    }

    pub fn k(&self) -> u32 {
        self.centers.len() as u32
    }

    /// Bits needed to store one quantized index.
    pub fn index_bits(&self) -> u8 {
        let k = self.k().max(2);
        ((k - 1).ilog2() + 1) as u8
    }

    /// Distance between adjacent centers; 0 for degenerate tables.
    pub fn step(&self) -> f64 {
        if self.centers.len() < 2 {
            0.0
        } else {
            (self.max_w - self.min_w) / (self.centers.len() - 1) as f64
        }
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    /// Index of the nearest center: `round((w - min)/step)` with midpoint
    /// ties toward the larger index, clamped to the table. Out-of-range
    /// weights clamp to the end centers.
    pub fn quantize(&self, w: f64) -> u32 {
        let k = self.centers.len();
        let step = self.step();
        if step == 0.0 {
            return 0;
        }
        let x = (w - self.min_w) / step;
        let mut idx = (x + 0.5).floor();
        if idx < 0.0 {
            idx = 0.0;
        }
        let mut idx = (idx as usize).min(k - 1);
        // Counter float rounding in the division: keep the truly nearest
        // center, with strict comparisons so exact ties stay half-up.
        if idx > 0 && (w - self.centers[idx - 1]).abs() < (w - self.centers[idx]).abs() {
            idx -= 1;
        } else if idx + 1 < k && (w - self.centers[idx + 1]).abs() < (w - self.centers[idx]).abs() {
            idx += 1;
        }
        idx as u32
    }

    /// The representative weight for an index, `None` past the table.
    pub fn dequantize(&self, index: u32) -> Option<f64> {
        self.centers.get(index as usize).copied()
    }
}
