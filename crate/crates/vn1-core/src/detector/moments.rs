//! Detector-side averages consumed by the closed-form measurement formulas.
//!
//! Two shapes exist. [`DetectorMoments`] holds phase-space quasi-averages of
//! trigonometric functions of the coupling variable (canonical detectors:
//! Gaussian, discrete). [`OperatorAverages`] holds the operator averages for
//! an arbitrary detector with an explicit readout matrix. Both expose the
//! five pure-coupling averages needed by the postselection probability
//! through [`ShiftMoments`].
//!
//! All P-type quantities are centered: the readout mean is subtracted and
//! recorded in `readout_offset`, so every formula downstream can assume an
//! unbiased readout.

/// Averages of functions of the coupling variable alone, enough for the
/// postselection probability.
pub trait ShiftMoments {
    /// ⟦sin λQ⟧
    fn sin_avg(&self) -> f64;
    /// ⟦sin² λQ⟧
    fn sin_sq_avg(&self) -> f64;
    /// ⟦1 − cos λQ⟧
    fn vers_avg(&self) -> f64;
    /// ⟦sin λQ (1 − cos λQ)⟧
    fn sin_vers_avg(&self) -> f64;
    /// ⟦(1 − cos λQ)²⟧
    fn vers_sq_avg(&self) -> f64;
}

/// Phase-space quasi-averages for a canonical detector at coupling λ.
///
/// Base moments are first and second harmonics of λQ, optionally weighted by
/// the centered readout P. Composites are the specific combinations entering
/// the canonical readout formula; constructors may fill them independently
/// (quadrature, discrete sums), in which case [`DetectorMoments::consistency_error`]
/// measures how well the double-angle identities hold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorMoments {
    pub lambda: f64,
    /// Mean readout subtracted from every P factor.
    pub readout_offset: f64,

    /// ⟦cos λQ⟧
    pub m_cos: f64,
    /// ⟦sin λQ⟧
    pub m_sin: f64,
    /// ⟦cos 2λQ⟧
    pub m_cos2: f64,
    /// ⟦sin 2λQ⟧
    pub m_sin2: f64,
    /// ⟦P cos λQ⟧
    pub m_p_cos: f64,
    /// ⟦P sin λQ⟧
    pub m_p_sin: f64,
    /// ⟦P cos 2λQ⟧
    pub m_p_cos2q: f64,
    /// ⟦P sin 2λQ⟧
    pub m_p_sin2q: f64,
    /// ⟦P⟧ after centering (zero up to the provider's accuracy).
    pub m_p: f64,

    /// ⟦sin² λQ⟧
    pub sin_sq: f64,
    /// ⟦1 − cos λQ⟧
    pub vers: f64,
    /// ⟦(1 − cos λQ)²⟧
    pub vers_sq: f64,
    /// ⟦sin λQ (1 − cos λQ)⟧
    pub sin_vers: f64,
    /// ⟦cos λQ (1 − cos λQ)⟧
    pub cos_vers: f64,
    /// ⟦P sin² λQ⟧
    pub p_sin_sq: f64,
    /// ⟦P (1 − cos λQ)⟧
    pub p_vers: f64,
    /// ⟦P sin λQ (1 − cos λQ)⟧
    pub p_sin_vers: f64,
    /// ⟦P (1 − cos λQ)²⟧
    pub p_vers_sq: f64,
}

impl DetectorMoments {
    /// Fill the composites from the base moments through the double-angle
    /// identities.
    #[allow(clippy::too_many_arguments)]
    pub fn from_base(
        lambda: f64,
        readout_offset: f64,
        m_cos: f64,
        m_sin: f64,
        m_cos2: f64,
        m_sin2: f64,
        m_p_cos: f64,
        m_p_sin: f64,
        m_p_cos2q: f64,
        m_p_sin2q: f64,
        m_p: f64,
    ) -> Self {
        Self {
            lambda,
            readout_offset,
            m_cos,
            m_sin,
            m_cos2,
            m_sin2,
            m_p_cos,
            m_p_sin,
            m_p_cos2q,
            m_p_sin2q,
            m_p,
            sin_sq: (1.0 - m_cos2) / 2.0,
            vers: 1.0 - m_cos,
            vers_sq: 1.0 - 2.0 * m_cos + (1.0 + m_cos2) / 2.0,
            sin_vers: m_sin - m_sin2 / 2.0,
            cos_vers: m_cos - (1.0 + m_cos2) / 2.0,
            p_sin_sq: (m_p - m_p_cos2q) / 2.0,
            p_vers: m_p - m_p_cos,
            p_sin_vers: m_p_sin - m_p_sin2q / 2.0,
            p_vers_sq: 1.5 * m_p - 2.0 * m_p_cos + m_p_cos2q / 2.0,
        }
    }

    /// Largest deviation of a composite from its double-angle reconstruction.
    pub fn consistency_error(&self) -> f64 {
        let rebuilt = Self::from_base(
            self.lambda,
            self.readout_offset,
            self.m_cos,
            self.m_sin,
            self.m_cos2,
            self.m_sin2,
            self.m_p_cos,
            self.m_p_sin,
            self.m_p_cos2q,
            self.m_p_sin2q,
            self.m_p,
        );
        self.max_difference(&rebuilt)
    }

    /// Largest absolute difference across all moment fields.
    pub fn max_difference(&self, other: &Self) -> f64 {
        [
            self.m_cos - other.m_cos,
            self.m_sin - other.m_sin,
            self.m_cos2 - other.m_cos2,
            self.m_sin2 - other.m_sin2,
            self.m_p_cos - other.m_p_cos,
            self.m_p_sin - other.m_p_sin,
            self.m_p_cos2q - other.m_p_cos2q,
            self.m_p_sin2q - other.m_p_sin2q,
            self.m_p - other.m_p,
            self.sin_sq - other.sin_sq,
            self.vers - other.vers,
            self.vers_sq - other.vers_sq,
            self.sin_vers - other.sin_vers,
            self.cos_vers - other.cos_vers,
            self.p_sin_sq - other.p_sin_sq,
            self.p_vers - other.p_vers,
            self.p_sin_vers - other.p_sin_vers,
            self.p_vers_sq - other.p_vers_sq,
        ]
        .iter()
        .map(|d| d.abs())
        .fold(0.0, f64::max)
    }
}

impl ShiftMoments for DetectorMoments {
    fn sin_avg(&self) -> f64 {
        self.m_sin
    }
    fn sin_sq_avg(&self) -> f64 {
        self.sin_sq
    }
    fn vers_avg(&self) -> f64 {
        self.vers
    }
    fn sin_vers_avg(&self) -> f64 {
        self.sin_vers
    }
    fn vers_sq_avg(&self) -> f64 {
        self.vers_sq
    }
}

/// Operator averages for an explicit detector (state ρ_D, coupling operator
/// Q, readout O) at coupling λ, with s = sin λQ and t = 1 − cos λQ.
///
/// The readout is centered before any product is formed; `readout_offset`
/// holds the subtracted mean. `imag_residue` is the largest imaginary part
/// encountered across the traces (every average is of a Hermitian
/// combination, so it measures numerical error only).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorAverages {
    pub lambda: f64,
    pub readout_offset: f64,
    pub imag_residue: f64,

    /// ⟦s⟧
    pub sin: f64,
    /// ⟦s²⟧
    pub sin_sq: f64,
    /// ⟦t⟧
    pub vers: f64,
    /// ⟦s t⟧
    pub sin_vers: f64,
    /// ⟦t²⟧
    pub vers_sq: f64,
    /// ⟦i[O, s]⟧
    pub comm_sin: f64,
    /// ⟦{O, s}⟧
    pub anti_sin: f64,
    /// ⟦{O, t}⟧
    pub anti_vers: f64,
    /// ⟦i[O, t]⟧
    pub comm_vers: f64,
    /// ⟦s O s⟧
    pub sin_o_sin: f64,
    /// ⟦i (t O s − s O t)⟧
    pub comm_vers_sin: f64,
    /// ⟦t O s + s O t⟧
    pub anti_vers_sin: f64,
    /// ⟦t O t⟧
    pub vers_o_vers: f64,
}

impl ShiftMoments for OperatorAverages {
    fn sin_avg(&self) -> f64 {
        self.sin
    }
    fn sin_sq_avg(&self) -> f64 {
        self.sin_sq
    }
    fn vers_avg(&self) -> f64 {
        self.vers
    }
    fn sin_vers_avg(&self) -> f64 {
        self.sin_vers
    }
    fn vers_sq_avg(&self) -> f64 {
        self.vers_sq
    }
}

/// First and second moments of the coupling variable together with the
/// readout cross-moments entering the small-λ expansions. The readout is
/// centered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakMoments {
    /// ⟦Q⟧
    pub q: f64,
    /// ⟦Q²⟧
    pub q_sq: f64,
    /// ⟦i[O, Q]⟧
    pub comm_q: f64,
    /// ⟦{O, Q}⟧
    pub anti_q: f64,
    /// ⟦{O, Q²}⟧
    pub anti_q_sq: f64,
    /// ⟦i[O, Q²]⟧
    pub comm_q_sq: f64,
    /// ⟦Q O Q⟧
    pub q_o_q: f64,
}
