#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "race/array_channel.hpp"

namespace race {

/// Raised when a beam design system is singular.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Branching factors [K_1, ..., K_S] of the multi-stage search. Each K_s >= 2
/// and their product equals the antenna count, so stage S reaches single
/// grid points.
///
/// Stages are numbered 1..S throughout the library; stage 0 is the root.
class StagePlan {
 public:
  StagePlan(std::vector<std::size_t> k_vector, std::size_t n_antennas);
  /// N is taken as the product of the branching factors.
  explicit StagePlan(std::vector<std::size_t> k_vector);

  static StagePlan uniform(std::size_t k, std::size_t n_antennas);

  const std::vector<std::size_t>& k_vector() const noexcept { return k_; }
  std::size_t n_antennas() const noexcept { return n_; }
  std::size_t stage_count() const noexcept { return k_.size(); }
  std::size_t branching(std::size_t stage) const;
  /// Grid points covered by one stage-`stage` sub-range (N_s); N at stage 0.
  std::size_t subrange_width(std::size_t stage) const;
  /// M_T = sum_s K_s^2.
  std::size_t total_measurements() const noexcept;
  std::string to_string() const;

  friend bool operator==(const StagePlan&, const StagePlan&) = default;

 private:
  std::vector<std::size_t> k_;
  std::size_t n_;
};

/// Contiguous block of grid indices [first, first + count) reached after
/// `stage` divisions, following `branch_path` (0-based choice at each stage).
struct SubRange {
  std::size_t stage = 0;
  std::vector<std::size_t> branch_path;
  std::size_t first = 0;
  std::size_t count = 0;

  bool contains(std::size_t grid_index) const noexcept {
    return grid_index >= first && grid_index < first + count;
  }
  /// Position of this block among all blocks of its stage.
  std::size_t block() const noexcept { return count == 0 ? 0 : first / count; }

  friend bool operator==(const SubRange&, const SubRange&) = default;
};

SubRange root_subrange(const StagePlan& plan);

/// The K_{s+1} children of `parent`, ordered by increasing grid index.
/// Throws std::invalid_argument when `parent` is already at the final stage.
std::vector<SubRange> enumerate_subranges(const StagePlan& plan, const SubRange& parent);

/// Unit-norm beamforming vector with a flat response C over its sub-range.
struct BeamVector {
  CVector coefficients;
  SubRange subrange;
  double gain_constant = 0.0;
};

/// Solves U^H f = z (z_i = C on the sub-range, 0 elsewhere) through the left
/// pseudo-inverse f = (U U^H)^{-1} U z, with C fixed by ||f|| = 1.
BeamVector design_beam(const SubRange& subrange, const AngleGrid& grid);

/// Every beam of every stage, materialized once. Immutable after construction;
/// the same vectors serve as transmit (f) and receive (w) beams.
class Codebook {
 public:
  Codebook(StagePlan plan, AngleGrid grid);

  const StagePlan& plan() const noexcept { return plan_; }
  const AngleGrid& grid() const noexcept { return grid_; }
  std::size_t stage_count() const noexcept { return plan_.stage_count(); }
  std::size_t beams_in_stage(std::size_t stage) const;
  double gain_constant(std::size_t stage) const;

  /// Beam number `block` of `stage` (blocks ordered by grid index).
  const BeamVector& beam(std::size_t stage, std::size_t block) const;
  /// The k-th child beam of the stage-(stage-1) block `parent_block`.
  const BeamVector& child(std::size_t stage, std::size_t parent_block, std::size_t k) const;
  /// Lookup by full branch path; its length selects the stage.
  const BeamVector& lookup(std::span<const std::size_t> branch_path) const;

 private:
  StagePlan plan_;
  AngleGrid grid_;
  std::vector<std::vector<BeamVector>> stages_;
  std::vector<double> gain_;
};

Codebook build_codebook(const StagePlan& plan, const AngleGrid& grid);

/// Beam-pattern table for plotting: `stage,beam,grid_index,magnitude`, one row
/// per (beam, grid point) with magnitude |u(eps_i)^H f|.
void write_beam_patterns_csv(const Codebook& codebook, std::ostream& out);

}  // namespace race
