//! Pinned numerical tolerances.
//!
//! Every gate in the engine reads its tolerance from here so that a bound
//! is declared once, with its justification, and tests cannot drift from
//! the library. Relative tolerances are applied as `tol * (1 + |value|)`
//! unless a doc comment says otherwise.

/// Round trip `exp(x, log(x,y), 1) ~ y`. Closed-form chart maps are exact
/// to rounding; the bound leaves two digits of slack for trig/atanh chains.
pub const EXP_LOG_ROUNDTRIP: f64 = 1e-8;

/// Constancy of geodesic speed along `t -> exp(x, v, t)`, checked by
/// divided differences (the finite-difference error dominates).
pub const GEODESIC_SPEED_DRIFT: f64 = 1e-7;

/// Triangle inequality slack on sampled triples.
pub const TRIANGLE_SLACK: f64 = 1e-9;

/// `legendre_inverse . fiber_derivative = id`, fiber norm of the defect.
pub const LEGENDRE_ROUNDTRIP: f64 = 1e-8;

/// Derivative identities of the Hamiltonian recovered by central finite
/// differences (truncation error of the stencil dominates).
pub const HAMILTONIAN_FD: f64 = 1e-5;

/// Agreement of `fiber_derivative` with central finite differences of the
/// Lagrangian in `v`, relative.
pub const FIBER_FD_REL: f64 = 1e-6;

/// Energy drift along RK4 trajectories on flat models at step 1e-3; the
/// flow is linear there, so only rounding accumulates.
pub const ENERGY_DRIFT_FLAT: f64 = 1e-8;

/// Energy drift along RK4 trajectories on curved models; fourth-order
/// global error at step 1e-3 leaves ample margin.
pub const ENERGY_DRIFT_CURVED: f64 = 1e-6;

/// Newton residual required of a converged two-point shooting solve,
/// measured in chart coordinates of the endpoint defect.
pub const SHOOTING_RESIDUAL: f64 = 1e-7;

/// Relative spread of the energy along an accepted minimizer's nodes.
pub const MINIMIZER_ENERGY_SPREAD: f64 = 1e-6;

/// Two converged minimizers whose actions differ by less than this
/// (relative) are treated as one cut-locus ambiguity.
pub const ACTION_TIE: f64 = 1e-9;

/// Agreement between the action of the two-point solver and the closed
/// form `t^(1-r) d^r` for power-metric costs, relative.
pub const COST_CLOSED_FORM_REL: f64 = 1e-5;

/// Cost superdifferential versus central finite differences of the cost,
/// relative, away from cut loci.
pub const SUPERDIFF_FD_REL: f64 = 1e-4;

/// Endpoint reconstruction through the flow from `-dc/dx`, chart distance.
pub const TWIST_RECONSTRUCTION: f64 = 1e-6;

/// Minimum pairwise separation of `dc/dx(x, y_j)` declared injective.
pub const TWIST_SEPARATION_MARGIN: f64 = 1e-8;

/// Semigroup identity residual at interior points of a minimizer.
pub const SEMIGROUP_RESIDUAL: f64 = 1e-6;

/// Strong-duality gap `|primal - dual|` of the exact transport solver.
pub const DUALITY_GAP: f64 = 1e-9;

/// Subsolution slack `psi_j - phi_i - c_ij` allowed everywhere.
pub const SUBSOLUTION_SLACK: f64 = 1e-9;

/// Calibration equality residual on plan support.
pub const SUPPORT_EQUALITY: f64 = 1e-9;

/// Plan marginal defect against the input measures (absolute).
pub const MARGINAL_DEFECT: f64 = 1e-10;

/// Weight-sum defect tolerated by a discrete measure (absolute).
pub const WEIGHT_SUM: f64 = 1e-12;

/// Weights within this of `1/n` count as uniform for solver routing.
pub const UNIFORM_WEIGHTS: f64 = 1e-15;

/// Two c-transform scores within this absolute slack are a tie.
pub const CTRANSFORM_TIE: f64 = 1e-10;

/// c-transform of LP duals must reproduce the phi potentials (absolute).
pub const CTRANSFORM_ROUNDTRIP: f64 = 1e-9;

/// Agreement of the two map formulas (potential flow versus closed-form
/// scaled exponential), chart distance.
pub const MAP_FORMULA_AGREEMENT: f64 = 1e-5;

/// Reconstruction of the argmax target by the flow inside potential-based
/// map extraction, chart distance.
pub const MAP_FLOW_LANDING: f64 = 1e-5;

/// Gradient law `dc/dx(x, T(x)) = -d_x phi`, relative.
pub const GRADIENT_LAW_REL: f64 = 1e-5;

/// Calibration along the extracted graph, absolute.
pub const GRAPH_CALIBRATION: f64 = 1e-8;

/// Snapping radius from a flow image to its nearest target atom; snap
/// distances are always reported, never silently absorbed.
pub const IMAGE_SNAP: f64 = 1e-4;

/// Total-variation defect of the pushforward against the target measure.
pub const PUSHFORWARD_TV: f64 = 1e-9;

/// Transport cost of an extracted map versus the LP optimum, relative.
pub const MAP_COST_REL: f64 = 1e-6;

/// Mean absolute error allowed of the 1-D rearrangement oracle map.
pub const REARRANGEMENT_MAE: f64 = 1e-3;

/// Residual of the interpolation restriction identity
/// `c_t(x, T_t x) = c_s(x, T_s x) + c_(t-s)(T_s x, T_t x)`, relative.
pub const RESTRICTION_RESIDUAL_REL: f64 = 1e-6;

/// Midpoint LP optimum versus the interpolated pairing cost, relative.
pub const MIDPOINT_LP_REL: f64 = 1e-6;

/// Endpoint consistency of interpolated curves with the terminal map.
pub const INTERP_ENDPOINT: f64 = 1e-6;

/// Slack of a semi-concavity certificate, scaled by `1 + max |f|`.
pub const CERTIFICATE_SLACK: f64 = 1e-7;

/// Contact-set equality required by the touching criterion (absolute).
pub const CONTACT_EQUALITY: f64 = 1e-10;

/// Gradient agreement at touching points (absolute).
pub const TOUCHING_GRADIENT: f64 = 1e-5;

/// Step used for certificate and oracle finite differences. Large enough
/// to keep rounding noise (eps/h ~ 2e-10) under the certificate slack,
/// small enough for O(h^2) truncation to vanish below it.
pub const FD_STEP: f64 = 1e-6;

/// Momentum norm below which power-family flows with r < 2 freeze; the
/// fiber inverse is singular at p = 0 and the rest point is the solution.
pub const MOMENTUM_FREEZE: f64 = 1e-12;

/// Default RK4 steps per unit of flow time.
pub const STEPS_PER_UNIT_TIME: usize = 1000;
