#pragma once

#include <optional>

#include "fintime/rates.hpp"

namespace fintime {

// Spectral endpoints closer than this merge into one interval, and
// hyperbolicity verdicts demand at least this much clearance around zero.
inline constexpr double kMergeTolerance = 1e-6;

// Extremal growth rates over k-planes, k = 0..n, with the realizing
// subspaces.  Conventions at k = 0: elgr = +inf, eugr = -inf (zero subspace).
struct ExtremalRates {
  Eigen::Index n = 0;
  std::vector<double> elgr;               // index k, size n+1
  std::vector<double> eugr;               // index k, size n+1
  std::vector<Subspace> argmax_subspace;  // realizes elgr[k]
  std::vector<Subspace> argmin_subspace;  // realizes eugr[k]
  std::vector<std::vector<Subspace>> elgr_runners_up;  // fallback candidates
  std::vector<std::vector<Subspace>> eugr_runners_up;
  bool certified = true;  // false once a heuristic grid was involved
};

ExtremalRates extremal_growth_rates(const LinearProcess& P, const NormSpec& nm,
                                    std::size_t resolution,
                                    std::uint64_t seed = detail::kDefaultSeed);

// Checks the ordering chain -inf = eugr_0 < elgr_n <= eugr_1 <= elgr_{n-1}
// <= ... <= eugr_n < elgr_0 = +inf up to `slack`; returns the worst violation
// (<= 0 when the chain holds).
double ordering_chain_violation(const ExtremalRates& R);

struct EmdResult {
  bool hyperbolic = false;
  Eigen::Index k = -1;
  std::optional<Subspace> image;   // decaying subspace, dim k
  std::optional<Subspace> kernel;  // growing complement, dim n-k
  bool attractive = false;         // k == n
  bool repulsive = false;          // k == 0
};

EmdResult emd_from_extremal(const ExtremalRates& R);
EmdResult emd_check(const LinearProcess& P, const NormSpec& nm, std::size_t resolution,
                    std::uint64_t seed = detail::kDefaultSeed);

struct SpectralInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct ResolventGap {
  double lo = 0.0;  // -inf allowed
  double hi = 0.0;  // +inf allowed
  Eigen::Index rank = 0;
};

struct SpectrumResult {
  ExtremalRates extremal;
  std::vector<SpectralInterval> intervals;      // merged, ascending
  std::vector<SpectralInterval> raw_intervals;  // before merging (diagnostics)
  std::vector<ResolventGap> resolvent_gaps;     // includes the unbounded ends
  bool hyperbolic = false;
  std::optional<Eigen::Index> emd_k;
  std::optional<Subspace> emd_image;
  std::optional<Subspace> emd_kernel;
  std::optional<double> radius;  // dist(0, spectrum); present iff hyperbolic
  bool certified = true;
};

// Interval assembly from extremal rates (shared with the two-point oracle).
SpectrumResult assemble_spectrum(const ExtremalRates& R);

SpectrumResult compute_spectrum(const LinearProcess& P, const NormSpec& nm,
                                std::size_t resolution,
                                std::uint64_t seed = detail::kDefaultSeed);

// dist(0, spectrum) of a hyperbolic process; throws NotHyperbolic otherwise.
double hyperbolicity_radius(const SpectrumResult& S);

// Grid estimates of process distances; lower bounds that tighten with
// resolution, reported together with the resolution used.
struct DistanceEstimate {
  double value = 0.0;
  std::size_t resolution = 0;
};

DistanceEstimate semimetric_dtilde(const LinearProcess& P, const LinearProcess& Q,
                                   const NormSpec& nm, std::size_t resolution);
DistanceEstimate metric_d(const LinearProcess& P, const LinearProcess& Q,
                          const NormSpec& nm, std::size_t resolution);

// Perturbations closer than this bound keep the dichotomy with the same k.
double robustness_certificate(const LinearProcess& P, const NormSpec& nm,
                              const SpectrumResult& S);

// -ugr(R^n) for attractive processes; throws NotAttractive otherwise.
double stability_radius(const LinearProcess& P, const NormSpec& nm,
                        std::size_t resolution = 128);

// Spectra of restrictions of P to subsets of its grid.
std::vector<SpectrumResult> spectrum_timeset_sweep(const LinearProcess& P,
                                                   const NormSpec& nm,
                                                   const std::vector<TimeSet>& subsets,
                                                   std::size_t resolution);

}  // namespace fintime
