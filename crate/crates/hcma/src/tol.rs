//! Central numeric tolerances.
//!
//! Every threshold used by the library and its verification suite lives
//! here, with a note on where it comes from. Integration tests pin these
//! same values, so loosening one is an API change, not a tweak.

/// Unit-speed defect allowed on geodesic initial data, `|g(v,v) - 1|`.
pub const UNIT_SPEED: f64 = 1e-9;

/// Wronskian drift `|Y·Z' − Y'·Z − 1|` allowed along any strip path.
pub const WRONSKIAN: f64 = 1e-9;

/// Closure defect accepted before a trajectory counts as a closed geodesic.
pub const GEODESIC_CLOSURE: f64 = 1e-6;

/// `|Y|` below this, off the real axis, flags a tube-radius breach rather
/// than a genuine pole (poles of `a` sit on the axis).
pub const POLE_THRESHOLD: f64 = 1e-8;

/// Truncation-tail budget for the spectral continuation certificate of
/// `K∘γ` into the strip.
pub const CONTINUATION_TAIL: f64 = 1e-10;

/// Bisection width for localizing the first `Im a ≤ 0` crossing in τ.
pub const BREACH_BISECTION: f64 = 1e-6;

/// Sup-oscillation of `a` over σ at the top of the scan, below which the
/// compactification check accepts extension across the puncture.
pub const COMPACTIFICATION_OSC: f64 = 1e-4;

/// `J² = −I` defect allowed for the adapted-structure matrix.
pub const J_SQUARED: f64 = 1e-9;

/// Exactness of the ξ-flow scaling `τ∘ψ_t = e^t τ` (relative) and of
/// τ-conservation along the η-flow (relative).
pub const FLOW_EXACTNESS: f64 = 1e-9;

/// Poincaré return-map refinement width for period detection.
pub const PERIOD_BISECTION: f64 = 1e-8;

/// Cauchy-Riemann residual allowed for leaf uniformizers.
pub const LEAF_CR: f64 = 1e-7;

/// Boundary residual `max |r − 1|` required of a solved disk.
pub const BOUNDARY_RESIDUAL: f64 = 1e-10;

/// Pointwise root-finding tolerance inside the boundary fixed-point solve.
pub const POINTWISE_ROOT: f64 = 1e-13;

/// Gradient sup-norm at which a disk counts as extremal.
pub const GRAD_NORM: f64 = 1e-10;

/// Negative-mode energy above which `r_ℓ/ρ` fails to extend
/// holomorphically (criticality cross-check).
pub const NEG_MODE_ENERGY: f64 = 1e-9;

/// Residual of the tangency identity `β = −ζ ∂u_λ` along a leaf.
pub const TANGENCY_RESIDUAL: f64 = 1e-7;

/// Fraction of trailing modes whose energy must stay below this for a
/// truncated boundary loop to count as spectrally resolved.
pub const SPECTRAL_TAIL: f64 = 1e-10;

/// Agreement required between the two Robin-constant routes.
pub const ROBIN_AGREEMENT: f64 = 1e-6;

/// Relative error allowed between `⟨∇E, δf⟩` and central differences of
/// the distortion energy.
pub const GRAD_CONSISTENCY: f64 = 1e-5;

/// Entry-wise defect allowed on the finite-difference second variation
/// against `2·Identity`.
pub const SECOND_VARIATION: f64 = 1e-5;

/// θ₀ margin: the linearization is rejected when `|θ₀| ≥ π/2 − 0.1`.
pub const THETA0_MARGIN: f64 = 0.1;

/// Iteration cap for the boundary fixed-point solve.
pub const MAX_FIXED_POINT_ITERS: usize = 200;
